#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "scobot/env.hpp"
#include "scobot/eval.hpp"
#include "scobot/vision.hpp"

using namespace scobot;
namespace fs = std::filesystem;

namespace {

std::vector<Frame> random_play(GameId g, int n, std::uint64_t seed) {
  GameState s = reset(g, seed);
  Rng agent(seed + 1);
  std::vector<Frame> out;
  std::uint64_t episode = 0;
  while (static_cast<int>(out.size()) < n) {
    for (int k = 0; k < 16; ++k)
      if (step(s, agent.below(action_count(g))).done) s = reset(g, derive_seed(seed, ++episode));
    out.push_back(render(s));
  }
  return out;
}

}  // namespace

TEST_CASE("background of identical frames is that frame") {
  const Frame f = render(reset(GameId::Brawl, 3));
  const std::vector<Frame> frames(100, f);
  const BackgroundModel bg = build_background(frames);
  CHECK(bg.rgb == f.rgb);
  CHECK(bg.width == f.width);
}

TEST_CASE("background takes the majority colour per pixel") {
  Frame base(4, 4, {10, 20, 30});
  std::vector<Frame> frames(100, base);
  frames[7].set(2, 2, {200, 0, 0});
  CHECK(build_background(frames).rgb == base.rgb);
  CHECK_THROWS_AS(build_background(std::vector<Frame>{}), ContractError);
  CHECK_THROWS_AS(build_background(std::vector<Frame>{Frame(2, 2), Frame(3, 3)}), ContractError);
}

TEST_CASE("paddles background from random play matches the backdrop") {
  const auto frames = random_play(GameId::Paddles, 100, 4);
  const BackgroundModel bg = build_background(frames);
  const Frame backdrop = render_backdrop(GameId::Paddles);
  long same = 0;
  const long pixels = static_cast<long>(bg.width) * bg.height;
  for (long i = 0; i < pixels; ++i)
    same += bg.rgb[3 * i] == backdrop.rgb[3 * i] && bg.rgb[3 * i + 1] == backdrop.rgb[3 * i + 1] &&
            bg.rgb[3 * i + 2] == backdrop.rgb[3 * i + 2];
  CHECK(static_cast<double>(same) / pixels >= 0.99);
}

TEST_CASE("background file round trip and corruption") {
  const fs::path dir = fs::temp_directory_path() / "scobot_test_vision";
  fs::create_directories(dir);
  const BackgroundModel bg = build_background(random_play(GameId::Brawl, 5, 1));
  save_background(bg, dir / "bg.bin");
  CHECK(load_background(dir / "bg.bin") == bg);
  fs::resize_file(dir / "bg.bin", fs::file_size(dir / "bg.bin") - 10);
  try {
    load_background(dir / "bg.bin");
    FAIL("expected an error");
  } catch (const CorruptFileError& e) {
    CHECK(std::string(e.what()).find("bg.bin") != std::string::npos);
  }
  CHECK_THROWS_AS(load_background(dir / "absent.bin"), CorruptFileError);
  fs::remove_all(dir);
}

TEST_CASE("foreground mask properties") {
  const Frame backdrop = render_backdrop(GameId::Paddles);
  const BackgroundModel bg{backdrop.width, backdrop.height, backdrop.rgb};
  const Mask empty = foreground_mask(backdrop, bg, 0.1);
  CHECK(std::count(empty.bits.begin(), empty.bits.end(), 1) == 0);

  // A lone sprite on the backdrop: mask support equals the sprite pixels.
  GameState s = reset(GameId::Paddles, 2);
  s.entities.erase(s.entities.begin(), s.entities.begin() + 2);  // keep only the ball
  const Frame f = render(s);
  GameState bare = s;
  bare.entities.clear();
  const Frame bf = render(bare);
  const Mask m = foreground_mask(f, {bf.width, bf.height, bf.rgb}, 0.1);
  const PixelRect r = sprite_rect(s.entities[0], f.width, f.height);
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x) CHECK(m.at(x, y) == (x >= r.x0 && x < r.x1 && y >= r.y0 && y < r.y1));

  // Lower tau never removes foreground.
  Rng rng(3);
  Frame noisy = render(reset(GameId::Brawl, 1));
  for (auto& b : noisy.rgb) b = static_cast<std::uint8_t>(std::clamp(int(b) + rng.below(41) - 20, 0, 255));
  const Frame bb = render_backdrop(GameId::Brawl);
  const BackgroundModel bgb{bb.width, bb.height, bb.rgb};
  const Mask loose = foreground_mask(noisy, bgb, 0.0), strict = foreground_mask(noisy, bgb, 0.1);
  for (std::size_t i = 0; i < loose.bits.size(); ++i)
    if (strict.bits[i]) CHECK(loose.bits[i]);
  CHECK_THROWS_AS(foreground_mask(Frame(3, 3), bg, 0.1), ContractError);
}

TEST_CASE("detect_blobs equals the flood-fill oracle") {
  Rng r(11);
  for (int trial = 0; trial < 500; ++trial) {
    const Mask m = oracle::random_mask(r);
    const Frame f(m.width, m.height, {50, 60, 70});
    const int min_area = 1 + r.below(6);
    const auto dets = detect_blobs(m, f, min_area);
    REQUIRE(oracle::blobs_agree(dets, oracle::flood_fill(m, min_area), m.width, m.height, min_area));
  }
}

TEST_CASE("detect_blobs basics") {
  Mask m(10, 10);
  const Frame f(10, 10);
  CHECK(detect_blobs(m, f, 4).empty());
  for (int y = 1; y < 4; ++y)
    for (int x = 1; x < 4; ++x) m.set(x, y, true);
  for (int y = 6; y < 9; ++y)
    for (int x = 5; x < 8; ++x) m.set(x, y, true);
  const auto d = detect_blobs(m, f, 4);
  REQUIRE(d.size() == 2);
  CHECK(d[0].box == BBox{0.1, 0.1, 0.4, 0.4});
  CHECK(d[1].box == BBox{0.5, 0.6, 0.8, 0.9});
  CHECK(d[0].confidence == 1.0);
  CHECK(d[0].encoding.size() == static_cast<std::size_t>(kEncodingDim));
  // Diagonal neighbours join.
  Mask diag(4, 4);
  diag.set(0, 0, true);
  diag.set(1, 1, true);
  CHECK(detect_blobs(diag, Frame(4, 4), 1).size() == 1);
  CHECK_THROWS_AS(detect_blobs(m, f, 0), ContractError);
}

TEST_CASE("paddles frames yield one detection per object") {
  GameState s = reset(GameId::Paddles, 6);
  const Frame backdrop = render_backdrop(GameId::Paddles);
  const BackgroundModel bg{backdrop.width, backdrop.height, backdrop.rgb};
  Rng agent(1);
  int checked = 0;
  for (int t = 0; t < 400 && !s.done; ++t) {
    step(s, agent.below(3));
    const auto gts = ground_truth(s);
    const Entity& ball = *s.find("ball");
    const Entity& player = *s.find("player");
    const Entity& enemy = *s.find("enemy");
    // Skip frames where the ball touches a paddle.
    if (std::abs(ball.x - player.x) < 0.06 || std::abs(ball.x - enemy.x) < 0.06 || gts.size() != 3) continue;
    const auto dets = localize(render(s), bg, GameId::Paddles, VisionParams{});
    REQUIRE(dets.size() == 3);
    for (const auto& g : gts) {
      double best = 0.0;
      for (const auto& d : dets) best = std::max(best, center_divergence_score(d.box, g.box));
      CHECK(best >= 0.5);
    }
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("encode_patch") {
  Frame red(8, 8, {255, 0, 0});
  const auto e = encode_patch(red, {0.25, 0.25, 0.75, 0.5});
  REQUIRE(e.size() == static_cast<std::size_t>(kEncodingDim));
  CHECK(e[0] == 1.0);
  CHECK(e[1] == 0.0);
  CHECK(e[2] == 0.0);
  CHECK(e[3] == 0.0);
  CHECK(e[4] == 0.0);
  CHECK(e[5] == 0.0);
  CHECK(e[6] == 1.0);  // all pixels in the red hue bin
  CHECK(e[9] == 0.5);
  CHECK(e[10] == 0.25);
  CHECK_THROWS_AS(encode_patch(red, {0.5, 0.5, 0.5, 0.6}), ContractError);

  // Translation invariance and bounds on rendered sprites.
  GameState s = reset(GameId::Brawl, 2);
  const Frame f1 = render(s);
  const Entity p = *s.find("player");
  const BBox b1{(p.x - p.w / 2), (p.y - p.h / 2), (p.x + p.w / 2), (p.y + p.h / 2)};
  s.find("player")->x += 8.0 / kFrameSize;
  const Frame f2 = render(s);
  const BBox b2{b1.x_min + 8.0 / kFrameSize, b1.y_min, b1.x_max + 8.0 / kFrameSize, b1.y_max};
  const auto e1 = encode_patch(f1, b1), e2 = encode_patch(f2, b2);
  for (std::size_t i = 0; i < e1.size(); ++i) {
    CHECK(e1[i] == doctest::Approx(e2[i]).epsilon(1e-12));
    CHECK(e1[i] >= 0.0);
    CHECK(e1[i] <= 1.0);
  }
}

TEST_CASE("paddles ball and paddle encodings are far apart") {
  const GameState s = reset(GameId::Paddles, 1);
  const Frame f = render(s);
  std::vector<std::vector<double>> enc;
  for (const auto& g : ground_truth(s)) enc.push_back(encode_patch(f, g.box));
  for (std::size_t i = 0; i < enc.size(); ++i)
    for (std::size_t j = i + 1; j < enc.size(); ++j) {
      double d = 0;
      for (std::size_t k = 0; k < enc[i].size(); ++k) d += (enc[i][k] - enc[j][k]) * (enc[i][k] - enc[j][k]);
      CHECK(std::sqrt(d) > 0.1);
    }
}

TEST_CASE("region filters follow the closed-form predicates") {
  for (const BBox& b : oracle::boundary_boxes({0.148, 0.859}))
    CHECK(RegionFilterRule{GameId::Brawl}.keep(b) == oracle::brawl_keeps(b));
  for (const BBox& b : oracle::boundary_boxes({0.164, 0.031}))
    CHECK(RegionFilterRule{GameId::Paddles}.keep(b) == oracle::paddles_keeps(b));
  CHECK(RegionFilterRule{GameId::Brawl}.keep({0.1, 0.20, 0.2, 0.80}));
  CHECK_FALSE(RegionFilterRule{GameId::Brawl}.keep({0.1, 0.10, 0.2, 0.80}));
  CHECK(RegionFilterRule{GameId::Slalom}.keep({0.0, 0.0, 0.01, 0.01}));
}

TEST_CASE("region filter keeps order and is idempotent") {
  Rng r(9);
  std::vector<Detection> dets;
  for (int i = 0; i < 200; ++i) {
    const double y0 = r.uniform(0.0, 0.9);
    dets.push_back({{0.1, y0, 0.2, y0 + r.uniform(0.01, 0.1)}, r.uniform(), {}});
  }
  for (GameId g : {GameId::Paddles, GameId::Brawl, GameId::Slalom}) {
    const RegionFilterRule rule{g};
    const auto once = region_filter(dets, rule);
    CHECK(region_filter(once, rule) == once);
    std::size_t j = 0;
    for (const auto& d : dets)
      if (j < once.size() && d == once[j]) ++j;
    CHECK(j == once.size());
    if (g == GameId::Slalom) CHECK(once.size() == dets.size());
  }
}
