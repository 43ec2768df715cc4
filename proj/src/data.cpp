#include "scobot/data.hpp"

#include <sstream>

#include "scobot/common.hpp"

namespace scobot {

namespace fs = std::filesystem;

std::string_view split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

Split parse_split(std::string_view s) {
  for (Split sp : kSplits)
    if (split_name(sp) == s) return sp;
  throw ContractError("unknown split '" + std::string(s) + "'");
}

void generate_sequences(GameId game, const SplitSizes& sizes, std::uint64_t seed, const SequenceSink& sink,
                        int sequence_length, int gap) {
  if (sizes.train < 1 || sizes.val < 1 || sizes.test < 1) throw ContractError("split sizes must be positive");
  if (sequence_length < 1 || gap < 0) throw ContractError("invalid sequence length or gap");
  const int n_actions = action_count(game);
  for (Split split : kSplits) {
    const auto stream = static_cast<std::uint64_t>(split);
    const std::uint64_t episode_base = derive_seed(seed, 10 + stream);
    Rng agent(derive_seed(seed, 20 + stream));
    std::uint64_t episode = 0;
    long t = 0;
    GameState state = reset(game, derive_seed(episode_base, episode++));

    auto advance = [&]() {
      // One random step; a finished episode is replaced by a fresh one.
      if (step(state, agent.below(n_actions)).done) state = reset(game, derive_seed(episode_base, episode++));
      ++t;
    };

    for (int index = 0; index < sizes.of(split);) {
      // `gap` unseen steps after the previous sequence's last frame.
      for (int i = 0; i <= gap; ++i) advance();
      Sequence seq;
      const std::uint64_t start_episode = episode;
      for (int f = 0; f < sequence_length; ++f) {
        if (f > 0) advance();
        if (episode != start_episode) break;  // the episode ended inside the sequence
        Frame frame = render(state);
        frame.timestep = t;
        seq.frames.push_back({std::move(frame), ground_truth(state)});
      }
      if (static_cast<int>(seq.frames.size()) != sequence_length) continue;
      sink(split, index++, seq);
    }
  }
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

namespace {

std::string read_all(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CorruptFileError("missing file: " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_all(const fs::path& path, std::string_view bytes) {
  std::ofstream os(path, std::ios::binary);
  if (!os || !os.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
    throw CorruptFileError("cannot write file: " + path.string());
}

}  // namespace

void write_frame(const Frame& frame, const fs::path& path) {
  write_all(path, std::string_view(reinterpret_cast<const char*>(frame.rgb.data()), frame.rgb.size()));
}

Frame read_frame(const fs::path& path, int width, int height) {
  const std::string bytes = read_all(path);
  Frame f(width, height);
  if (bytes.size() != f.rgb.size())
    throw CorruptFileError("truncated or oversized frame file: " + path.string());
  std::copy(bytes.begin(), bytes.end(), f.rgb.begin());
  return f;
}

std::string annotations_to_text(const std::vector<GroundTruthObject>& objects) {
  std::string s;
  for (const auto& o : objects)
    s += o.cls + ' ' + format_exact(o.box.x_min) + ' ' + format_exact(o.box.y_min) + ' ' +
         format_exact(o.box.x_max) + ' ' + format_exact(o.box.y_max) + '\n';
  return s;
}

std::vector<GroundTruthObject> annotations_from_text(std::string_view text) {
  std::vector<GroundTruthObject> out;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 5) throw ContractError("malformed annotation line '" + line + "'");
    out.push_back({tok[0], BBox{parse_double(tok[1]), parse_double(tok[2]), parse_double(tok[3]), parse_double(tok[4])}});
  }
  return out;
}

std::string DatasetManifest::to_text() const {
  std::ostringstream os;
  os << "scobot-dataset 1\n"
     << "game " << game_name(game) << '\n'
     << "seed " << seed << '\n'
     << "frame_size " << frame_width << ' ' << frame_height << '\n'
     << "sequence_length " << sequence_length << '\n'
     << "gap " << gap << '\n'
     << "splits " << sizes.train << ' ' << sizes.val << ' ' << sizes.test << '\n';
  for (Split s : kSplits) {
    const auto& seqs = split(s);
    for (std::size_t q = 0; q < seqs.size(); ++q)
      for (std::size_t f = 0; f < seqs[q].size(); ++f) {
        const FrameRecord& r = seqs[q][f];
        os << "frame " << split_name(s) << ' ' << q << ' ' << f << ' ' << r.timestep << ' ' << r.frame_file << ' '
           << r.gt_file << ' ' << hex64(r.frame_checksum) << ' ' << hex64(r.gt_checksum) << '\n';
      }
  }
  return os.str();
}

namespace {

std::uint64_t parse_hex(const std::string& s) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used, 16);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw ContractError("malformed checksum '" + s + "'");
  return v;
}

}  // namespace

DatasetManifest DatasetManifest::parse(std::string_view text) {
  DatasetManifest m;
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line) || trim(line) != "scobot-dataset 1") throw ContractError("not a dataset manifest");
  auto expect = [&](std::string_view key, std::size_t n) {
    if (!std::getline(is, line)) throw ContractError("manifest ends before '" + std::string(key) + "'");
    auto tok = split_ws(line);
    if (tok.size() != n + 1 || tok[0] != key) throw ContractError("expected '" + std::string(key) + "' line");
    tok.erase(tok.begin());
    return tok;
  };
  m.game = parse_game(expect("game", 1)[0]);
  m.seed = static_cast<std::uint64_t>(parse_long(expect("seed", 1)[0]));
  auto fs_tok = expect("frame_size", 2);
  m.frame_width = static_cast<int>(parse_long(fs_tok[0]));
  m.frame_height = static_cast<int>(parse_long(fs_tok[1]));
  m.sequence_length = static_cast<int>(parse_long(expect("sequence_length", 1)[0]));
  m.gap = static_cast<int>(parse_long(expect("gap", 1)[0]));
  auto sz = expect("splits", 3);
  m.sizes = {static_cast<int>(parse_long(sz[0])), static_cast<int>(parse_long(sz[1])),
             static_cast<int>(parse_long(sz[2]))};
  while (std::getline(is, line)) {
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 9 || tok[0] != "frame") throw ContractError("malformed frame record '" + line + "'");
    auto& seqs = m.sequences[static_cast<std::size_t>(parse_split(tok[1]))];
    const long q = parse_long(tok[2]), f = parse_long(tok[3]);
    if (q == static_cast<long>(seqs.size())) seqs.emplace_back();
    if (q != static_cast<long>(seqs.size()) - 1 || f != static_cast<long>(seqs.back().size()))
      throw ContractError("frame records out of order at '" + line + "'");
    seqs.back().push_back({tok[5], tok[6], parse_long(tok[4]), parse_hex(tok[7]), parse_hex(tok[8])});
  }
  for (Split s : kSplits)
    if (static_cast<int>(m.split(s).size()) != m.sizes.of(s))
      throw ContractError("manifest lists a different number of sequences than its split sizes");
  return m;
}

DatasetManifest generate_dataset(GameId game, const SplitSizes& sizes, std::uint64_t seed, const fs::path& dir,
                                 int gap) {
  DatasetManifest m;
  m.game = game;
  m.seed = seed;
  m.gap = gap;
  m.sizes = sizes;
  for (Split s : kSplits) fs::create_directories(dir / split_name(s));
  generate_sequences(
      game, sizes, seed,
      [&](Split s, int index, const Sequence& seq) {
        std::vector<FrameRecord> records;
        for (std::size_t f = 0; f < seq.frames.size(); ++f) {
          char stem[64];
          std::snprintf(stem, sizeof stem, "s%05d_f%zu", index, f);
          const std::string rel = std::string(split_name(s)) + "/" + stem;
          const AnnotatedFrame& af = seq.frames[f];
          const std::string gt = annotations_to_text(af.objects);
          write_frame(af.frame, dir / (rel + ".rgb"));
          write_all(dir / (rel + ".gt"), gt);
          records.push_back({rel + ".rgb", rel + ".gt", af.frame.timestep,
                             fnv1a(af.frame.rgb.data(), af.frame.rgb.size()), fnv1a(gt)});
        }
        m.sequences[static_cast<std::size_t>(s)].push_back(std::move(records));
      },
      kSequenceLength, gap);
  write_all(dir / "manifest.txt", m.to_text());
  return m;
}

DatasetManifest load_manifest(const fs::path& manifest_path) {
  const std::string text = read_all(manifest_path);
  try {
    return DatasetManifest::parse(text);
  } catch (const ContractError& e) {
    throw CorruptFileError(manifest_path.string() + ": " + e.what());
  }
}

SplitReader::SplitReader(const DatasetManifest& manifest, const fs::path& dir, Split split)
    : manifest_(manifest), dir_(dir), split_(split) {}

Sequence read_sequence(const DatasetManifest& manifest, const fs::path& dir, Split split, std::size_t index) {
  const auto& seqs = manifest.split(split);
  if (index >= seqs.size()) throw ContractError("sequence index out of range");
  Sequence out;
  for (const FrameRecord& r : seqs[index]) {
    const fs::path fp = dir / r.frame_file, gp = dir / r.gt_file;
    Frame frame = read_frame(fp, manifest.frame_width, manifest.frame_height);
    if (fnv1a(frame.rgb.data(), frame.rgb.size()) != r.frame_checksum)
      throw CorruptFileError("checksum mismatch: " + fp.string());
    frame.timestep = r.timestep;
    const std::string gt = read_all(gp);
    if (fnv1a(gt) != r.gt_checksum) throw CorruptFileError("checksum mismatch: " + gp.string());
    std::vector<GroundTruthObject> objects;
    try {
      objects = annotations_from_text(gt);
    } catch (const ContractError& e) {
      throw CorruptFileError(gp.string() + ": " + e.what());
    }
    out.frames.push_back({std::move(frame), std::move(objects)});
  }
  return out;
}

bool SplitReader::next(Sequence& out) {
  if (pos_ >= manifest_.split(split_).size()) return false;
  out = read_sequence(manifest_, dir_, split_, pos_++);
  return true;
}

std::vector<Frame> calibration_frames(const DatasetManifest& manifest, const fs::path& dir, int count) {
  const std::size_t n = manifest.split(Split::Train).size();
  const std::size_t take = std::min(n, static_cast<std::size_t>(std::max(count, 1)));
  std::vector<Frame> out;
  for (std::size_t i = 0; i < take; ++i)
    out.push_back(read_sequence(manifest, dir, Split::Train, i * n / take).frames.front().frame);
  return out;
}

std::vector<Sequence> load_split(const DatasetManifest& manifest, const fs::path& dir, Split split) {
  std::vector<Sequence> out;
  SplitReader reader(manifest, dir, split);
  Sequence seq;
  while (reader.next(seq)) out.push_back(seq);
  return out;
}

}  // namespace scobot
