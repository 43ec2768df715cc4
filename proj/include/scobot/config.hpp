#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "scobot/data.hpp"
#include "scobot/pipeline.hpp"
#include "scobot/ppo.hpp"
#include "scobot/rules.hpp"

namespace scobot {

struct ConfigKey {
  std::string_view name;
  std::string_view default_value;
  std::string_view doc;
};

/// Every recognized key with its default and a one-line description.
const std::vector<ConfigKey>& config_keys();

/// Flat key=value run configuration. Lines starting with '#' are comments.
class RunConfig {
 public:
  RunConfig();  // all defaults

  static RunConfig load(const std::filesystem::path& path);
  void apply_text(std::string_view text);
  void set(std::string_view key, std::string_view value);  // throws on unknown keys
  void set_assignment(std::string_view key_eq_value);

  const std::string& get(std::string_view key) const;
  long get_long(std::string_view key) const;
  double get_double(std::string_view key) const;
  bool get_bool(std::string_view key) const;

  /// Every key in table order, "key=value" per line.
  std::string to_text() const;

  GameId game() const;
  std::filesystem::path work_dir() const;
  SplitSizes split_sizes() const;
  VisionParams vision_params() const;
  TrackerConfig tracker() const;
  PpoConfig ppo() const;
  ExtractOptions extract_options() const;
  PipelineSpec pipeline() const;  // without the vision model

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace scobot
