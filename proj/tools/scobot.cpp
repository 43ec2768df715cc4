#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scobot/commands.hpp"
#include "scobot/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"scobot: object-centric agents distilled into rule sets"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<std::string> overrides;
  bool show_config = false;
  app.add_option("--config", config_path, "flat key=value run configuration");
  app.add_option("--set", overrides, "override one key, key=value (repeatable)");
  app.add_flag("--show-config", show_config, "print the effective configuration and exit");

  const std::vector<std::string> about = {
      "generate frame sequences with ground truth",
      "fit the background model and the labeled centroids",
      "score the vision pipeline on the test split",
      "train the concept-based policy with PPO",
      "extract a rule set from the trained policy",
      "evaluate the neural policy and the rule set",
      "print the rule set with feature names",
  };
  for (std::size_t i = 0; i < scobot::command_names().size(); ++i)
    app.add_subcommand(scobot::command_names()[i], about[i])->fallthrough();

  std::string keys_help = "config keys:\n";
  for (const auto& k : scobot::config_keys())
    keys_help += "  " + std::string(k.name) + " (default " + std::string(k.default_value) + "): " +
                 std::string(k.doc) + "\n";
  app.footer(keys_help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : scobot::kExitUsage;
  }

  scobot::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = scobot::RunConfig::load(config_path);
    for (const auto& kv : overrides) cfg.set_assignment(kv);
  } catch (const scobot::ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return scobot::kExitUsage;
  }
  if (show_config) {
    std::cout << cfg.to_text();
    return scobot::kExitOk;
  }
  return scobot::run_command(app.get_subcommands().front()->get_name(), cfg, std::cout, std::cerr);
}
