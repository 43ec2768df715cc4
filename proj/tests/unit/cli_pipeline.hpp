#pragma once

// Runs the command-line tool as a child process on a small configuration.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace cli {

inline const std::vector<std::string>& stages() {
  static const std::vector<std::string> s = {"gen-data", "fit-vision", "eval-vision", "train-ppo",
                                             "distill",  "eval-agent", "inspect-rules"};
  return s;
}

/// Small but complete Paddles run, a few seconds per stage.
inline std::string small_config(const std::filesystem::path& work) {
  return "game=paddles\nwork_dir=" + work.string() +
         "\nseed=3\ndata_train=24\ndata_val=12\ndata_test=6\ncalibration_frames=24\n"
         "total_frames=60000\nhorizon=1024\nenvs=2\neval_interval=3000\neval_episodes=2\n"
         "distill_samples=2000\nholdout_samples=500\n";
}

struct Run {
  int code = -1;
  std::string out;
};

inline Run run(const std::string& binary, const std::filesystem::path& config, const std::string& command,
               const std::string& extra = "") {
  const auto log = std::filesystem::path(config).replace_extension("out");
  const std::string cmd = "'" + binary + "' --config '" + config.string() + "' " + extra + " " + command + " > '" +
                          log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream is(log);
  std::ostringstream ss;
  ss << is.rdbuf();
  r.out = ss.str();
  return r;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/// Every regular file under `root`, keyed by relative path.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[std::filesystem::relative(e.path(), root).string()] = read_file(e.path());
  return files;
}

}  // namespace cli
