#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "scobot/env.hpp"
#include "scobot/pipeline.hpp"

namespace scobot {

enum class Split { Train = 0, Val = 1, Test = 2 };
inline constexpr std::array<Split, 3> kSplits = {Split::Train, Split::Val, Split::Test};

std::string_view split_name(Split s);
Split parse_split(std::string_view s);

struct SplitSizes {
  int train = 2048;
  int val = 128;
  int test = 128;

  int of(Split s) const { return s == Split::Train ? train : s == Split::Val ? val : test; }
  bool operator==(const SplitSizes&) const = default;
};

inline constexpr int kSequenceLength = 4;
inline constexpr int kSequenceGap = 16;

/// Consecutive frames with their annotations.
struct Sequence {
  std::vector<AnnotatedFrame> frames;
};

struct FrameRecord {
  std::string frame_file;  // relative to the manifest
  std::string gt_file;
  long timestep = 0;
  std::uint64_t frame_checksum = 0;  // FNV-1a of the frame file
  std::uint64_t gt_checksum = 0;     // FNV-1a of the annotation file

  bool operator==(const FrameRecord&) const = default;
};

// Manifest text, one field per line:
//
//   scobot-dataset 1
//   game <name>
//   seed <integer>
//   frame_size <width> <height>
//   sequence_length <n>
//   gap <steps>
//   splits <train> <val> <test>
//   frame <split> <sequence> <index> <timestep> <frame file> <gt file> <frame fnv> <gt fnv>
//
// Frame files hold width*height*3 raw RGB bytes. Annotation files hold one
// line per object: "<class> <x_min> <y_min> <x_max> <y_max>".
struct DatasetManifest {
  GameId game = GameId::Paddles;
  std::uint64_t seed = 0;
  int frame_width = kFrameSize;
  int frame_height = kFrameSize;
  int sequence_length = kSequenceLength;
  int gap = kSequenceGap;
  SplitSizes sizes;
  std::array<std::vector<std::vector<FrameRecord>>, 3> sequences;  // [split][sequence][frame]

  const std::vector<std::vector<FrameRecord>>& split(Split s) const {
    return sequences[static_cast<std::size_t>(s)];
  }
  std::string to_text() const;
  static DatasetManifest parse(std::string_view text);

  bool operator==(const DatasetManifest&) const = default;
};

using SequenceSink = std::function<void(Split, int index, const Sequence&)>;

/// Random-agent rollouts cut into sequences of `sequence_length` consecutive
/// frames, `gap` random steps apart; splits use independent seed streams.
/// Frame timesteps count every simulated step of the split.
void generate_sequences(GameId game, const SplitSizes& sizes, std::uint64_t seed, const SequenceSink& sink,
                        int sequence_length = kSequenceLength, int gap = kSequenceGap);

/// Writes frames, annotations and `manifest.txt` under `dir`.
DatasetManifest generate_dataset(GameId game, const SplitSizes& sizes, std::uint64_t seed,
                                 const std::filesystem::path& dir, int gap = kSequenceGap);

DatasetManifest load_manifest(const std::filesystem::path& manifest_path);

/// Streams the sequences of one split in manifest order, verifying checksums.
class SplitReader {
 public:
  SplitReader(const DatasetManifest& manifest, const std::filesystem::path& dir, Split split);
  bool next(Sequence& out);

 private:
  const DatasetManifest& manifest_;
  std::filesystem::path dir_;
  Split split_;
  std::size_t pos_ = 0;
};

/// One sequence by index, verifying checksums.
Sequence read_sequence(const DatasetManifest& manifest, const std::filesystem::path& dir, Split split,
                       std::size_t index);

/// First frames of `count` training sequences spread evenly over the split,
/// so the background mode sees many episodes.
std::vector<Frame> calibration_frames(const DatasetManifest& manifest, const std::filesystem::path& dir, int count);

std::vector<Sequence> load_split(const DatasetManifest& manifest, const std::filesystem::path& dir, Split split);

void write_frame(const Frame& frame, const std::filesystem::path& path);
Frame read_frame(const std::filesystem::path& path, int width, int height);
std::string annotations_to_text(const std::vector<GroundTruthObject>& objects);
std::vector<GroundTruthObject> annotations_from_text(std::string_view text);

}  // namespace scobot
