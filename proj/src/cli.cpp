#include "zk/cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "zk/config.hpp"
#include "zk/errors.hpp"

namespace zk {

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"pseudospectral simulator and verification suite"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;

  auto* runc = app.add_subcommand("run", "run an experiment from a JSON config");
  runc->add_option("config", config_path, "config file path")->required();
  runc->add_option("--output", output, "output root directory (default ZK_OUTPUT_ROOT or ./runs)");
  runc->add_option("--jobs", jobs, "worker threads for sweep points")->check(CLI::PositiveNumber);
  auto* seed_opt = runc->add_option("--seed", seed, "override the config seed");
  runc->add_option("--override", overrides, "dotted-path config override, e.g. solver.dt=5e-4");

  std::string run_dir;
  auto* repc = app.add_subcommand("report", "print the report of a finished run");
  repc->add_option("run-dir", run_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (runc->parsed()) {
      ExperimentConfig cfg = load_config(config_path);
      for (const auto& ov : overrides) apply_override(cfg, ov);
      ExecuteOptions opts;
      if (!output.empty()) {
        opts.output_root = output;
      } else if (const char* env = std::getenv("ZK_OUTPUT_ROOT")) {
        opts.output_root = env;
      }
      opts.jobs = jobs;
      if (seed_opt->count() > 0) opts.seed = seed;
      const auto dir = execute(cfg, opts);
      std::cout << report_text(dir);
      std::cout << "run directory: " << dir.string() << "\n";
      return 0;
    }
    std::cout << report_text(run_dir);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("zk");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& s : full) argv.push_back(s.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace zk
