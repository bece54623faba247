// levikit command-line runner: `run` executes a scenario config, `list`
// prints the registry. Exit codes: 0 pass, 1 assertion failure, 2 usage error.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "levikit/scenarios.hpp"

namespace {

levikit::Json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw levikit::UsageError("cannot open config '" + path + "'");
  levikit::Json j = levikit::Json::parse(f, nullptr, false);
  if (j.is_discarded()) throw levikit::UsageError("config '" + path + "' is not valid JSON");
  return j;
}

int run(const std::string& config_path, const std::vector<std::string>& sets, unsigned threads,
        const std::string& out_override) {
  levikit::Json config = load_config(config_path);
  for (const std::string& s : sets) levikit::apply_override(config, s);
  if (config.contains("threads")) {
    if (!config["threads"].is_number_unsigned()) throw levikit::UsageError("threads must be a positive integer");
    if (threads == 0) threads = config["threads"].get<unsigned>();
  }
  if (threads > 0) levikit::set_thread_count(threads);
  std::string out_dir = out_override;
  if (out_dir.empty()) {
    if (config.contains("output_dir") && !config["output_dir"].is_string()) throw levikit::UsageError("output_dir must be a string");
    out_dir = config.value("output_dir", std::string("out/") + config.value("scenario", std::string("run")));
  }
  const levikit::RunResult rr = levikit::run_scenario(config);
  levikit::write_outputs(rr, out_dir, levikit::thread_count());
  std::cout << rr.report["scenario"].get<std::string>() << ": " << (rr.exit_code == 0 ? "PASS" : "FAIL");
  if (!rr.failure.empty()) std::cout << " (" << rr.failure << ")";
  std::cout << "  -> " << out_dir << "/report.json\n";
  return rr.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"levikit scenario runner"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run a scenario config");
  std::string config_path, out_dir;
  std::vector<std::string> sets;
  unsigned threads = 0;
  run_cmd->add_option("--config", config_path, "scenario config (JSON)")->required();
  run_cmd->add_option("--set", sets, "override, e.g. --set params.h=0.01 (repeatable)");
  run_cmd->add_option("--threads", threads, "worker threads (default: hardware)");
  run_cmd->add_option("--output-dir", out_dir, "output directory (overrides the config)");

  auto* list_cmd = app.add_subcommand("list", "list scenarios and their parameters");
  bool as_json = false;
  list_cmd->add_flag("--json", as_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*list_cmd) {
      if (as_json) {
        std::cout << levikit::list_scenarios_json().dump(2) << '\n';
      } else {
        std::cout << levikit::list_scenarios_text();
      }
      return 0;
    }
    return run(config_path, sets, threads, out_dir);
  } catch (const levikit::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const levikit::Json::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
