#include <CLI11.hpp>
#include <iostream>

#include "fieldlab/runner.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  long long reps = -1;
  int workers = -1;
  bool seed_set = false;
};

int run(const std::string& name, const Overrides& ov) {
  fieldlab::ParseResult parsed = fieldlab::parse_config_file(ov.config_path);
  if (!parsed.ok()) {
    for (const fieldlab::ParseIssue& e : parsed.errors)
      std::cerr << "config error: line " << e.line << ": " << e.message << "\n";
    return 2;
  }
  fieldlab::ExperimentConfig cfg = *parsed.config;
  if (ov.seed_set) cfg.mc.seed = ov.seed;
  if (ov.reps >= 0) cfg.mc.reps = ov.reps;
  if (ov.workers >= 0) cfg.mc.workers = ov.workers;
  if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
  try {
    const fieldlab::RunResult res = fieldlab::run_subcommand(name, cfg);
    for (const std::string& line : res.summary) std::cout << line << "\n";
    for (const std::string& f : res.csv_files)
      std::cout << "wrote " << f << "\n";
    return res.exit_code;
  } catch (const fieldlab::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification lab for max-stable and tail fields"};
  app.require_subcommand(1);

  Overrides ov;
  for (const std::string& name : fieldlab::subcommand_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", ov.config_path, "experiment config file")
        ->required();
    sub->add_option("--seed", ov.seed, "master seed (overrides config)")
        ->each([&](const std::string&) { ov.seed_set = true; });
    sub->add_option("--reps", ov.reps, "replications (overrides config)");
    sub->add_option("--workers", ov.workers, "worker threads (overrides config)");
    sub->add_option("--out", ov.out_dir, "output directory (overrides config)");
  }

  CLI11_PARSE(app, argc, argv);
  for (const std::string& name : fieldlab::subcommand_names()) {
    if (app.get_subcommand(name)->parsed()) return run(name, ov);
  }
  std::cerr << "no subcommand\n";
  return 2;
}
