#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "scobot/config.hpp"

namespace scobot {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitMissingArtifact = 2, kExitNumerical = 3 };

/// An input produced by an earlier command is absent.
class MissingArtifactError : public std::runtime_error {
 public:
  MissingArtifactError(const std::filesystem::path& path, std::string_view producer);
};

const std::vector<std::string>& command_names();

/// Artifact locations under the work directory.
struct ArtifactPaths {
  std::filesystem::path root;

  std::filesystem::path data_dir() const { return root / "data"; }
  std::filesystem::path manifest() const { return data_dir() / "manifest.txt"; }
  std::filesystem::path background() const { return root / "vision" / "background.bin"; }
  std::filesystem::path centroids() const { return root / "vision" / "centroids.txt"; }
  std::filesystem::path vision_report() const { return root / "vision" / "report.txt"; }
  std::filesystem::path confusion_csv() const { return root / "vision" / "confusion.csv"; }
  std::filesystem::path checkpoint() const { return root / "policy" / "checkpoint.bin"; }
  std::filesystem::path reward_log() const { return root / "policy" / "reward_log.csv"; }
  std::filesystem::path episode_log() const { return root / "policy" / "episodes.csv"; }
  std::filesystem::path rules() const { return root / "rules" / "rules.txt"; }
  std::filesystem::path fidelity_report() const { return root / "rules" / "fidelity.txt"; }
  std::filesystem::path agent_report() const { return root / "eval" / "agent.csv"; }
};

/// Runs one pipeline stage; returns an ExitCode. Progress goes to `out`,
/// problems to `err`.
int run_command(std::string_view command, const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace scobot
