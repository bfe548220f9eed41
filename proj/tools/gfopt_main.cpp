#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gfopt/config.hpp"
#include "gfopt/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string trace;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", flags.out_dir, "output directory (overrides out.dir)");
  auto* seed = cmd->add_option("--seed", flags.seed, "seed (overrides run.seed)");
  cmd->add_option("--trace", flags.trace, "trace level: none, thin or full")
      ->check(CLI::IsMember({"none", "thin", "full"}));
  cmd->callback([seed, &flags]() { flags.seed_set = seed->count() > 0; });
}

int execute(gfopt::RunMode mode, const CommonFlags& flags) {
  gfopt::ExperimentConfig config = gfopt::load_config(flags.config_path);
  config.mode = mode;
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (!flags.trace.empty()) config.trace = flags.trace;
  if (flags.seed_set) config.seed = flags.seed;

  for (const std::string& warning : config.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }

  const gfopt::ExperimentOutput output = gfopt::run_experiment(config);
  std::cout << "summary: " << output.summary_path.string() << "\n";
  std::cout << "config echo: " << output.echo_path.string() << "\n";
  if (!output.trace_path.empty()) {
    std::cout << "trace: " << output.trace_path.string() << "\n";
  }

  // A couple of headline cells so quick runs do not require opening the CSV.
  const auto& columns = output.summary.columns;
  if (!output.summary.rows.empty()) {
    const auto& last = output.summary.rows.back();
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == "window_cert_value" || columns[i] == "hull_cert_value" ||
          columns[i] == "slope" || columns[i] == "exceedance") {
        if (!last[i].empty()) {
          std::cout << columns[i] << " = " << last[i] << "\n";
        }
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-order nonsmooth nonconvex optimization experiments"};
  app.require_subcommand(1);

  CommonFlags run_flags, validate_flags, sweep_flags, conc_flags;
  add_common(app.add_subcommand("run", "single seeded optimization run"), run_flags);
  add_common(app.add_subcommand(
                 "validate", "restarted run with post-optimization validation"),
             validate_flags);
  add_common(app.add_subcommand("sweep", "dimension-scaling sweep"), sweep_flags);
  add_common(app.add_subcommand("concentration",
                                "tail bound check for sums of random vectors"),
             conc_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) return execute(gfopt::RunMode::run, run_flags);
    if (app.got_subcommand("validate")) {
      return execute(gfopt::RunMode::validated, validate_flags);
    }
    if (app.got_subcommand("sweep")) {
      return execute(gfopt::RunMode::sweep, sweep_flags);
    }
    return execute(gfopt::RunMode::concentration, conc_flags);
  } catch (const std::invalid_argument& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
}
