#include "gfopt/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gfopt/catalog.hpp"
#include "gfopt/concentration.hpp"
#include "gfopt/highprob.hpp"
#include "gfopt/optimizer.hpp"
#include "gfopt/parallel.hpp"
#include "gfopt/smoothing.hpp"
#include "gfopt/stationarity.hpp"

namespace gfopt {
namespace {

using Clock = std::chrono::steady_clock;

long long elapsed_ms(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start)
      .count();
}

struct Resolved {
  std::unique_ptr<StochasticObjective> objective;
  double lipschitz = 0.0;
  double value_gap = 0.0;
  Vector start;
  std::vector<std::string> notes;
};

Vector resolve_start(const ExperimentConfig& config, int dimension) {
  if (!config.start) return Vector(dimension, 0.0);
  const Vector& s = *config.start;
  if (static_cast<int>(s.size()) == dimension) return s;
  if (s.size() == 1) {
    Vector x0(dimension, 0.0);
    x0[0] = s[0];
    return x0;
  }
  throw std::invalid_argument("config: run.x0 has length " +
                              std::to_string(s.size()) + ", objective.d is " +
                              std::to_string(dimension));
}

Resolved resolve_problem(const ExperimentConfig& config) {
  Resolved r;
  r.objective = make_builtin(config.objective.name, config.objective.dimension,
                             config.objective.params);
  r.start = resolve_start(config, r.objective->dimension());

  r.lipschitz = config.lipschitz_override.value_or(r.objective->lipschitz_bound());
  if (!(r.lipschitz > 0.0)) {
    // A 0-Lipschitz objective admits any positive bound; pick one so the
    // hyper-parameter formulas stay defined.
    r.lipschitz = 1.0;
    r.notes.push_back("objective Lipschitz bound is 0; using 1.0 for derivation");
  }

  if (config.value_gap) {
    r.value_gap = *config.value_gap;
    if (!(r.value_gap > 0.0)) {
      throw std::invalid_argument("config: theory.Delta must be > 0");
    }
  } else {
    const auto infimum = r.objective->known_infimum();
    if (!infimum) {
      throw std::invalid_argument(
          "config: theory.Delta is required (objective has no known infimum)");
    }
    const double f0 =
        r.objective->evaluate(r.start, r.objective->neutral_component());
    r.value_gap = f0 - *infimum;
    if (!(r.value_gap > 0.0)) {
      r.value_gap = 1e-3;
      r.notes.push_back("inferred value gap was not positive; clamped to 1e-3");
    }
  }
  return r;
}

OptimizerConfig resolve_optimizer_config(const ExperimentConfig& config,
                                         const Resolved& problem) {
  const int d = problem.objective->dimension();
  if (config.budget) {
    return derive_hyperparams_for_budget(problem.value_gap, problem.lipschitz,
                                         config.delta, d, *config.budget,
                                         config.batch);
  }
  return derive_hyperparams(problem.value_gap, problem.lipschitz, config.delta,
                            config.eps, d, config.budget_scale, config.batch);
}

TraceOptions resolve_trace(const ExperimentConfig& config, long long budget) {
  TraceOptions trace;
  if (config.trace == "thin") {
    trace.stride = config.trace_stride > 0 ? config.trace_stride
                                           : std::max<long long>(1, budget / 1000);
  } else if (config.trace == "full") {
    trace.stride = config.trace_stride > 0 ? config.trace_stride : 1;
    trace.log_z = true;
  }
  return trace;
}

nlohmann::json optimizer_config_json(const OptimizerConfig& cfg) {
  return nlohmann::json{{"rho", cfg.rho},     {"nu", cfg.nu},
                        {"clip", cfg.clip},   {"step", cfg.step},
                        {"budget", cfg.budget}, {"batch", cfg.batch},
                        {"window_size", cfg.window_size()},
                        {"window_count", cfg.window_count()}};
}

nlohmann::json base_echo(const ExperimentConfig& config) {
  nlohmann::json echo;
  echo["mode"] = to_string(config.mode);
  echo["seed"] = config.seed;
  if (config.mode != RunMode::concentration) {
    echo["objective"] = {{"name", config.objective.name},
                         {"d", config.objective.dimension},
                         {"params", config.objective.params}};
    echo["accuracy"] = {{"delta", config.delta}, {"eps", config.eps}};
    if (config.gamma) echo["accuracy"]["gamma"] = *config.gamma;
  }
  if (!config.warnings.empty()) echo["warnings"] = config.warnings;
  return echo;
}

void write_trace(const std::filesystem::path& path,
                 const std::vector<IterationRecord>& trajectory) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  for (const IterationRecord& rec : trajectory) {
    nlohmann::json line{{"t", rec.t},
                        {"norm_delta", rec.displacement_norm},
                        {"norm_g", rec.grad_norm}};
    if (!rec.z.empty()) line["z"] = rec.z;
    out << line.dump() << '\n';
  }
}

std::string format_cert_value(double v) { return format_double(v); }

Report make_certificate_report() {
  Report report;
  report.columns = {"method", "delta", "value", "stderr", "n"};
  return report;
}

void add_certificate_row(Report& report, const StationarityCertificate& cert) {
  report.add_row({to_string(cert.method), format_double(cert.delta),
                  format_double(cert.value), format_double(cert.std_error),
                  format_int(cert.n_gradients)});
}

Report run_mode_report(const ExperimentConfig& config,
                       std::vector<IterationRecord>* trajectory_out,
                       Report* certificates_out) {
  const auto start_time = Clock::now();
  Resolved problem = resolve_problem(config);
  const StochasticObjective& obj = *problem.objective;
  const OptimizerConfig cfg = resolve_optimizer_config(config, problem);

  RunOptions options;
  options.trace = resolve_trace(config, cfg.budget);

  RandomStream rng(config.seed);
  RunResult result = run(obj, problem.start, cfg, rng, options);

  const StationarityCertificate window_cert = window_certificate(
      obj, result.window_points, cfg.rho, config.window_samples, rng);
  std::optional<StationarityCertificate> hull_cert;
  if (obj.has_gradient_oracle()) {
    hull_cert = goldstein_upper_certificate(obj, result.x_out, config.delta,
                                            config.hull_samples, rng);
  }
  const double f_out = obj.evaluate(result.x_out, obj.neutral_component());

  if (certificates_out != nullptr) {
    *certificates_out = make_certificate_report();
    add_certificate_row(*certificates_out, window_cert);
    if (hull_cert) add_certificate_row(*certificates_out, *hull_cert);
  }

  Report report;
  report.columns = {"mode",        "objective",   "d",
                    "seed",        "T",           "k",
                    "evaluations", "rho",         "nu",
                    "clip",        "step",        "M",
                    "K",           "chosen_window",
                    "window_cert_delta", "window_cert_value",
                    "window_cert_se",    "window_cert_n",
                    "hull_cert_delta",   "hull_cert_value",
                    "hull_cert_se",      "hull_cert_n",
                    "f_out",       "wall_ms"};
  std::vector<std::string> row{
      to_string(config.mode),
      config.objective.name,
      format_int(obj.dimension()),
      format_int(static_cast<long long>(config.seed)),
      format_int(cfg.budget),
      format_int(cfg.batch),
      format_int(result.evaluations_used),
      format_double(cfg.rho),
      format_double(cfg.nu),
      format_double(cfg.clip),
      format_double(cfg.step),
      format_int(cfg.window_size()),
      format_int(cfg.window_count()),
      format_int(result.chosen_window),
      format_double(window_cert.delta),
      format_cert_value(window_cert.value),
      format_double(window_cert.std_error),
      format_int(window_cert.n_gradients),
      hull_cert ? format_double(hull_cert->delta) : "",
      hull_cert ? format_cert_value(hull_cert->value) : "",
      hull_cert ? format_double(hull_cert->std_error) : "",
      hull_cert ? format_int(hull_cert->n_gradients) : "",
      format_double(f_out),
      format_int(elapsed_ms(start_time))};
  report.add_row(std::move(row));

  report.echo = base_echo(config);
  report.echo["theory"] = {{"Delta", problem.value_gap}, {"L0", problem.lipschitz}};
  report.echo["optimizer"] = optimizer_config_json(cfg);
  report.echo["cert"] = {{"hull_n", config.hull_samples},
                         {"window_n", config.window_samples}};
  report.echo["x0"] = problem.start;
  if (!problem.notes.empty()) report.echo["notes"] = problem.notes;

  if (trajectory_out != nullptr) *trajectory_out = std::move(result.trajectory);
  return report;
}

Report validated_mode_report(const ExperimentConfig& config,
                             Report* certificates_out) {
  const auto start_time = Clock::now();
  if (!config.gamma) {
    throw std::invalid_argument("config: accuracy.gamma is required for validated mode");
  }
  Resolved problem = resolve_problem(config);
  const StochasticObjective& obj = *problem.objective;
  const OptimizerConfig cfg = resolve_optimizer_config(config, problem);
  const ValidationParams vp = derive_validation_params(
      *config.gamma, obj.dimension(), problem.lipschitz, cfg.window_size(),
      config.eps, config.sample_scale);

  RandomStream rng(config.seed);
  ValidatedResult outcome = run_validated(obj, problem.start, cfg, vp, rng);

  const int chosen = outcome.chosen_round;
  const StationarityCertificate window_cert = window_certificate(
      obj, outcome.rounds[chosen - 1].run.window_points, cfg.rho,
      config.window_samples, rng);
  std::optional<StationarityCertificate> hull_cert;
  if (obj.has_gradient_oracle()) {
    hull_cert = goldstein_upper_certificate(obj, outcome.x_out, config.delta,
                                            config.hull_samples, rng);
  }

  if (certificates_out != nullptr) {
    *certificates_out = make_certificate_report();
    add_certificate_row(*certificates_out, window_cert);
    if (hull_cert) add_certificate_row(*certificates_out, *hull_cert);
  }

  Report report;
  report.columns = {"mode", "objective", "d", "seed", "round", "g_hat_norm",
                    "chosen", "T", "k", "evaluations",
                    "window_cert_delta", "window_cert_value", "window_cert_se",
                    "hull_cert_delta", "hull_cert_value", "hull_cert_se",
                    "wall_ms"};
  for (std::size_t r = 0; r < outcome.rounds.size(); ++r) {
    report.add_row({to_string(config.mode), config.objective.name,
                    format_int(obj.dimension()),
                    format_int(static_cast<long long>(config.seed)),
                    format_int(static_cast<long long>(r + 1)),
                    format_double(outcome.rounds[r].estimate_norm),
                    static_cast<int>(r + 1) == chosen ? "1" : "0",
                    format_int(cfg.budget), format_int(cfg.batch),
                    format_int(outcome.rounds[r].run.evaluations_used), "", "",
                    "", "", "", "", ""});
  }
  report.add_row({to_string(config.mode), config.objective.name,
                  format_int(obj.dimension()),
                  format_int(static_cast<long long>(config.seed)), "final",
                  format_double(outcome.rounds[chosen - 1].estimate_norm), "1",
                  format_int(cfg.budget), format_int(cfg.batch),
                  format_int(outcome.total_evaluations),
                  format_double(window_cert.delta),
                  format_cert_value(window_cert.value),
                  format_double(window_cert.std_error),
                  hull_cert ? format_double(hull_cert->delta) : "",
                  hull_cert ? format_cert_value(hull_cert->value) : "",
                  hull_cert ? format_double(hull_cert->std_error) : "",
                  format_int(elapsed_ms(start_time))});

  report.echo = base_echo(config);
  report.echo["theory"] = {{"Delta", problem.value_gap}, {"L0", problem.lipschitz}};
  report.echo["optimizer"] = optimizer_config_json(cfg);
  report.echo["validation"] = {{"gamma", vp.gamma},
                               {"rounds", vp.rounds},
                               {"samples", vp.samples},
                               {"tail_factor", vp.tail_factor},
                               {"window_size", vp.window_size},
                               {"sample_scale", config.sample_scale},
                               {"meets_theory", vp.meets_theory}};
  report.echo["x0"] = problem.start;
  if (!problem.notes.empty()) report.echo["notes"] = problem.notes;
  return report;
}

Report concentration_mode_report(const ExperimentConfig& config) {
  RandomStream rng(config.seed);
  const ConcentrationResult result =
      concentration_check(config.conc_count, config.conc_dim,
                          config.conc_lambdas, config.conc_trials, rng);

  Report report;
  report.columns = {"mode", "N", "d", "trials", "lambda", "exceedance",
                    "bound", "mean_square_ratio", "mean_square_se"};
  for (const ConcentrationRow& row : result.rows) {
    report.add_row({to_string(config.mode), format_int(result.count),
                    format_int(result.dimension), format_int(result.trials),
                    format_double(row.lambda), format_double(row.exceedance),
                    format_double(row.bound),
                    format_double(result.mean_square_ratio),
                    format_double(result.mean_square_se)});
  }
  report.echo = base_echo(config);
  report.echo["concentration"] = {{"N", config.conc_count},
                                  {"d", config.conc_dim},
                                  {"lambdas", config.conc_lambdas},
                                  {"trials", config.conc_trials}};
  return report;
}

struct SweepCell {
  bool baseline = false;
  int dimension = 0;
  int trial = 0;
};

struct SweepCellResult {
  long long budget_star = 0;
  double cert_value = 0.0;
  bool capped = false;
};

}  // namespace

Report sweep_dimension(const ExperimentConfig& config,
                       const std::vector<int>& dims, int trials) {
  if (dims.empty() || trials < 1) {
    throw std::invalid_argument("sweep: dims must be nonempty and trials >= 1");
  }
  if (!std::is_sorted(dims.begin(), dims.end())) {
    throw std::invalid_argument("sweep: dims must be ascending");
  }
  if (config.sweep_budget_floor < 1 ||
      config.sweep_budget_cap < config.sweep_budget_floor) {
    throw std::invalid_argument("sweep: need 1 <= T0 <= T_cap");
  }

  // Cells are (optimizer, dimension, trial), each with a pre-assigned
  // substream so they can run concurrently yet deterministically.
  std::vector<SweepCell> cells;
  for (int baseline = 0; baseline < 2; ++baseline) {
    for (int d : dims) {
      for (int trial = 1; trial <= trials; ++trial) {
        cells.push_back(SweepCell{baseline == 1, d, trial});
      }
    }
  }
  RandomStream master(config.seed);

  auto run_cell = [&](std::size_t index) -> SweepCellResult {
    const SweepCell cell = cells[index];
    RandomStream cell_stream = master.substream(index);
    const auto objective = make_builtin(config.objective.name, cell.dimension,
                                        config.objective.params);
    const StochasticObjective& obj = *objective;

    RandomStream start_stream = cell_stream.substream(0);
    Vector x0 = sample_unit_sphere(cell.dimension, start_stream);
    vec::scale_in_place(x0, config.sweep_start_norm);

    double lipschitz =
        config.lipschitz_override.value_or(obj.lipschitz_bound());
    if (!(lipschitz > 0.0)) lipschitz = 1.0;
    double value_gap = 0.0;
    if (config.value_gap) {
      value_gap = *config.value_gap;
    } else {
      const auto infimum = obj.known_infimum();
      if (!infimum) {
        throw std::invalid_argument(
            "sweep: theory.Delta is required (objective has no known infimum)");
      }
      value_gap = std::max(
          1e-3, obj.evaluate(x0, obj.neutral_component()) - *infimum);
    }

    SweepCellResult out;
    out.capped = true;
    long long rung_index = 0;
    for (long long budget = config.sweep_budget_floor;
         budget <= config.sweep_budget_cap; budget *= 2) {
      RandomStream rung_stream = cell_stream.substream(1 + rung_index++);
      double cert_value = 0.0;
      bool ok = false;
      if (!cell.baseline) {
        try {
          const OptimizerConfig cfg = derive_hyperparams_for_budget(
              value_gap, lipschitz, config.delta, cell.dimension, budget,
              config.batch);
          const RunResult result = run(obj, x0, cfg, rung_stream);
          const StationarityCertificate cert =
              window_certificate(obj, result.window_points, cfg.rho,
                                 config.window_samples, rung_stream);
          cert_value = cert.value;
          ok = cert.value <= config.eps;
        } catch (const std::invalid_argument&) {
          ok = false;  // budget too small for a single window; next rung
        }
      } else {
        // Smoothed-SGD baseline: smoothness H = sqrt(d) L0 / delta, estimator
        // second moment ~ d L0^2 / k, classic step min(1/H, sqrt(Dh/(H s^2 T))).
        const double smoothness =
            std::sqrt(static_cast<double>(cell.dimension)) * lipschitz /
            config.delta;
        const double second_moment = static_cast<double>(cell.dimension) *
                                     lipschitz * lipschitz /
                                     static_cast<double>(config.batch);
        const double step =
            std::min(1.0 / smoothness,
                     std::sqrt(value_gap / (smoothness * second_moment *
                                            static_cast<double>(budget))));
        const Vector returned =
            baseline_sgd_smoothed(obj, x0, config.delta, step, budget,
                                  config.batch, rung_stream);
        // Match the main method's certificate effort at this budget.
        long long cert_samples = config.window_samples * 50;
        try {
          const OptimizerConfig cfg = derive_hyperparams_for_budget(
              value_gap, lipschitz, config.delta, cell.dimension, budget,
              config.batch);
          cert_samples = cfg.window_size() * config.window_samples;
        } catch (const std::invalid_argument&) {
        }
        const StationarityCertificate cert = window_certificate(
            obj, {returned}, config.delta, cert_samples, rung_stream);
        cert_value = cert.value;
        ok = cert.value <= config.eps;
      }
      out.budget_star = budget;
      out.cert_value = cert_value;
      if (ok) {
        out.capped = false;
        break;
      }
    }
    return out;
  };

  const std::vector<SweepCellResult> results =
      parallel_map(cells.size(), run_cell);

  Report report;
  report.columns = {"row_type", "optimizer", "d",           "trial",
                    "T_star",   "cert_value", "capped",     "median_T_star",
                    "slope"};
  for (std::size_t i = 0; i < cells.size(); ++i) {
    report.add_row({"trial", cells[i].baseline ? "sgd_baseline" : "clipped",
                    format_int(cells[i].dimension), format_int(cells[i].trial),
                    format_int(results[i].budget_star),
                    format_double(results[i].cert_value),
                    results[i].capped ? "1" : "0", "", ""});
  }

  // Per-(optimizer, d) medians, then a log-log slope fit per optimizer.
  std::vector<double> slopes;
  for (int baseline = 0; baseline < 2; ++baseline) {
    std::vector<double> log_d;
    std::vector<double> log_median;
    for (int d : dims) {
      std::vector<double> budgets;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].baseline == (baseline == 1) && cells[i].dimension == d) {
          budgets.push_back(static_cast<double>(results[i].budget_star));
        }
      }
      std::sort(budgets.begin(), budgets.end());
      const std::size_t n = budgets.size();
      const double median = n % 2 == 1
                                ? budgets[n / 2]
                                : 0.5 * (budgets[n / 2 - 1] + budgets[n / 2]);
      report.add_row({"median", baseline ? "sgd_baseline" : "clipped",
                      format_int(d), "", "", "", "", format_double(median), ""});
      log_d.push_back(std::log(static_cast<double>(d)));
      log_median.push_back(std::log(median));
    }
    double slope = std::numeric_limits<double>::quiet_NaN();
    if (log_d.size() >= 2) {
      double mean_x = 0.0, mean_y = 0.0;
      for (std::size_t i = 0; i < log_d.size(); ++i) {
        mean_x += log_d[i];
        mean_y += log_median[i];
      }
      mean_x /= log_d.size();
      mean_y /= log_d.size();
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < log_d.size(); ++i) {
        num += (log_d[i] - mean_x) * (log_median[i] - mean_y);
        den += (log_d[i] - mean_x) * (log_d[i] - mean_x);
      }
      slope = num / den;
    }
    slopes.push_back(slope);
    report.add_row({"slope", baseline ? "sgd_baseline" : "clipped", "", "", "",
                    "", "", "",
                    std::isnan(slope) ? "" : format_double(slope)});
  }

  report.echo = base_echo(config);
  report.echo["sweep"] = {{"dims", dims},
                          {"trials", trials},
                          {"T0", config.sweep_budget_floor},
                          {"T_cap", config.sweep_budget_cap},
                          {"x0_norm", config.sweep_start_norm},
                          {"slope_clipped", slopes[0]},
                          {"slope_baseline", slopes[1]}};
  return report;
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  ExperimentOutput output;
  std::vector<IterationRecord> trajectory;
  Report certificates;

  switch (config.mode) {
    case RunMode::run:
      output.summary = run_mode_report(config, &trajectory, &certificates);
      break;
    case RunMode::validated:
      output.summary = validated_mode_report(config, &certificates);
      break;
    case RunMode::sweep:
      output.summary = sweep_dimension(config, config.sweep_dims, config.sweep_trials);
      break;
    case RunMode::concentration:
      output.summary = concentration_mode_report(config);
      break;
  }

  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  output.summary_path = dir / "summary.csv";
  output.echo_path = dir / "config_echo.json";
  write_csv(output.summary, output.summary_path);
  write_echo(output.summary, output.echo_path);
  if (!certificates.columns.empty()) {
    output.certificates_path = dir / "certificates.csv";
    write_csv(certificates, output.certificates_path);
  }
  if (!trajectory.empty()) {
    output.trace_path = dir / "trace.jsonl";
    write_trace(output.trace_path, trajectory);
  }
  return output;
}

}  // namespace gfopt
