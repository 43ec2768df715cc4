#include "scobot/vision.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "scobot/kernels.hpp"

namespace scobot {

namespace {

constexpr char kBackgroundMagic[4] = {'S', 'C', 'B', 'G'};
constexpr std::uint32_t kBackgroundVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is, const std::filesystem::path& path) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw CorruptFileError("truncated background model: " + path.string());
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

// Union-find over provisional labels.
int find_root(std::vector<int>& parent, int x) {
  while (parent[static_cast<std::size_t>(x)] != x) {
    parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    x = parent[static_cast<std::size_t>(x)];
  }
  return x;
}

void unite(std::vector<int>& parent, int a, int b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a == b) return;
  if (a < b)
    parent[static_cast<std::size_t>(b)] = a;
  else
    parent[static_cast<std::size_t>(a)] = b;
}

}  // namespace

BackgroundModel build_background(std::span<const Frame> frames) {
  if (frames.empty()) throw ContractError("build_background: no frames");
  std::vector<const Frame*> ptrs;
  for (const Frame& f : frames) ptrs.push_back(&f);
  BackgroundModel bg;
  bg.width = frames[0].width;
  bg.height = frames[0].height;
  kernels::background_mode(ptrs, bg.rgb);
  return bg;
}

void save_background(const BackgroundModel& bg, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CorruptFileError("cannot write background model: " + path.string());
  os.write(kBackgroundMagic, 4);
  put_u32(os, kBackgroundVersion);
  put_u32(os, static_cast<std::uint32_t>(bg.width));
  put_u32(os, static_cast<std::uint32_t>(bg.height));
  os.write(reinterpret_cast<const char*>(bg.rgb.data()), static_cast<std::streamsize>(bg.rgb.size()));
}

BackgroundModel load_background(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CorruptFileError("missing background model: " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kBackgroundMagic, 4) != 0)
    throw CorruptFileError("not a background model: " + path.string());
  if (get_u32(is, path) != kBackgroundVersion)
    throw CorruptFileError("unsupported background model version: " + path.string());
  BackgroundModel bg;
  bg.width = static_cast<int>(get_u32(is, path));
  bg.height = static_cast<int>(get_u32(is, path));
  bg.rgb.resize(static_cast<std::size_t>(bg.width) * bg.height * 3);
  if (!is.read(reinterpret_cast<char*>(bg.rgb.data()), static_cast<std::streamsize>(bg.rgb.size())))
    throw CorruptFileError("truncated background model: " + path.string());
  return bg;
}

Mask foreground_mask(const Frame& frame, const BackgroundModel& bg, double tau) {
  if (frame.width != bg.width || frame.height != bg.height)
    throw ContractError("foreground_mask: frame and background dimensions differ");
  Mask m;
  kernels::foreground_mask(frame, bg.rgb, tau * 255.0, m);
  return m;
}

std::vector<Detection> detect_blobs(const Mask& mask, const Frame& frame, int min_area) {
  if (min_area < 1) throw ContractError("detect_blobs: min_area must be >= 1");
  const int w = mask.width, h = mask.height;
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<int> parent;

  // First pass: provisional labels from the already-visited 8-neighbours.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      int cur = -1;
      const int nbr[4][2] = {{x - 1, y}, {x - 1, y - 1}, {x, y - 1}, {x + 1, y - 1}};
      for (const auto& n : nbr) {
        if (n[0] < 0 || n[1] < 0 || n[0] >= w) continue;
        const int l = label[static_cast<std::size_t>(n[1]) * w + n[0]];
        if (l < 0) continue;
        if (cur < 0)
          cur = l;
        else
          unite(parent, cur, l);
      }
      if (cur < 0) {
        cur = static_cast<int>(parent.size());
        parent.push_back(cur);
      }
      label[static_cast<std::size_t>(y) * w + x] = cur;
    }
  }

  // Second pass: accumulate boxes per root.
  struct Acc {
    int x0, y0, x1, y1, area;
  };
  std::vector<Acc> acc(parent.size(), Acc{w, h, -1, -1, 0});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int l = label[static_cast<std::size_t>(y) * w + x];
      if (l < 0) continue;
      Acc& a = acc[static_cast<std::size_t>(find_root(parent, l))];
      a.x0 = std::min(a.x0, x);
      a.y0 = std::min(a.y0, y);
      a.x1 = std::max(a.x1, x);
      a.y1 = std::max(a.y1, y);
      ++a.area;
    }

  std::vector<Detection> out;
  for (const Acc& a : acc) {
    if (a.area < min_area) continue;
    Detection d;
    d.box = {static_cast<double>(a.x0) / w, static_cast<double>(a.y0) / h,
             static_cast<double>(a.x1 + 1) / w, static_cast<double>(a.y1 + 1) / h};
    d.confidence = std::min(1.0, static_cast<double>(a.area) / (2.0 * min_area));
    d.encoding = encode_patch(frame, d.box);
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    if (a.box.y_min != b.box.y_min) return a.box.y_min < b.box.y_min;
    return a.box.x_min < b.box.x_min;
  });
  return out;
}

std::vector<double> encode_patch(const Frame& frame, const BBox& box) {
  const int x0 = std::max(0, static_cast<int>(std::floor(box.x_min * frame.width + 1e-9)));
  const int y0 = std::max(0, static_cast<int>(std::floor(box.y_min * frame.height + 1e-9)));
  const int x1 = std::min(frame.width, static_cast<int>(std::ceil(box.x_max * frame.width - 1e-9)));
  const int y1 = std::min(frame.height, static_cast<int>(std::ceil(box.y_max * frame.height - 1e-9)));
  if (x1 <= x0 || y1 <= y0) throw ContractError("encode_patch: box covers no pixels");

  const double n = static_cast<double>(x1 - x0) * (y1 - y0);
  double sum[3] = {0, 0, 0}, sq[3] = {0, 0, 0}, hue[3] = {0, 0, 0};
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      const Rgb c = frame.at(x, y);
      const double v[3] = {c.r / 255.0, c.g / 255.0, c.b / 255.0};
      for (int k = 0; k < 3; ++k) {
        sum[k] += v[k];
        sq[k] += v[k] * v[k];
      }
      const double mx = std::max({v[0], v[1], v[2]}), mn = std::min({v[0], v[1], v[2]});
      if (mx == mn) continue;  // achromatic, no hue
      double hdeg;
      if (mx == v[0])
        hdeg = 60.0 * std::fmod((v[1] - v[2]) / (mx - mn) + 6.0, 6.0);
      else if (mx == v[1])
        hdeg = 60.0 * ((v[2] - v[0]) / (mx - mn) + 2.0);
      else
        hdeg = 60.0 * ((v[0] - v[1]) / (mx - mn) + 4.0);
      hue[std::min(2, static_cast<int>(hdeg / 120.0))] += 1.0;
    }

  std::vector<double> enc(kEncodingDim);
  for (int k = 0; k < 3; ++k) {
    const double mean = sum[k] / n;
    enc[static_cast<std::size_t>(k)] = mean;
    enc[static_cast<std::size_t>(3 + k)] = std::sqrt(std::max(0.0, sq[k] / n - mean * mean));
    enc[static_cast<std::size_t>(6 + k)] = hue[k] / n;
  }
  enc[9] = std::clamp(box.width(), 0.0, 1.0);
  enc[10] = std::clamp(box.height(), 0.0, 1.0);
  return enc;
}

bool RegionFilterRule::keep(const BBox& b) const {
  switch (game) {
    case GameId::Brawl: return 0.148 < b.y_min && b.y_max < 0.859;
    case GameId::Paddles: return 0.164 < b.y_max && 0.031 < b.y_min;
    case GameId::Slalom: return true;
  }
  return true;
}

std::vector<Detection> region_filter(std::span<const Detection> dets, const RegionFilterRule& rule) {
  std::vector<Detection> out;
  for (const Detection& d : dets)
    if (rule.keep(d.box)) out.push_back(d);
  return out;
}

std::vector<Detection> localize(const Frame& frame, const BackgroundModel& bg, GameId game,
                                const VisionParams& params) {
  const Mask m = foreground_mask(frame, bg, params.tau);
  const auto blobs = detect_blobs(m, frame, params.min_area);
  return region_filter(blobs, RegionFilterRule{game});
}

}  // namespace scobot
