#include "gfopt/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gfopt {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_line(int line, const std::string& text, const std::string& why) {
  std::ostringstream msg;
  msg << "config line " << line << " ('" << text << "'): " << why;
  throw std::invalid_argument(msg.str());
}

double to_double(int line, const std::string& text, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    bad_line(line, text, "expected a number");
  }
  if (pos != value.size() || !std::isfinite(v)) {
    bad_line(line, text, "expected a finite number");
  }
  return v;
}

long long to_int(int line, const std::string& text, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    bad_line(line, text, "expected an integer");
  }
  if (pos != value.size()) bad_line(line, text, "expected an integer");
  return v;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(value);
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::run:
      return "run";
    case RunMode::validated:
      return "validated";
    case RunMode::sweep:
      return "sweep";
    case RunMode::concentration:
      return "concentration";
  }
  return "unknown";
}

RunMode parse_run_mode(const std::string& name) {
  if (name == "run") return RunMode::run;
  if (name == "validated" || name == "validate") return RunMode::validated;
  if (name == "sweep") return RunMode::sweep;
  if (name == "concentration") return RunMode::concentration;
  throw std::invalid_argument("unknown mode '" + name +
                              "' (expected run, validated, sweep or concentration)");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::string raw;
  int line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    std::string line = raw;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) bad_line(line_number, raw, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) bad_line(line_number, raw, "empty key");
    if (value.empty()) bad_line(line_number, raw, "empty value");

    if (key == "mode") {
      config.mode = parse_run_mode(value);
    } else if (key == "objective.name") {
      config.objective.name = value;
    } else if (key == "objective.d") {
      config.objective.dimension = static_cast<int>(to_int(line_number, raw, value));
    } else if (key.rfind("objective.param.", 0) == 0) {
      const std::string param = key.substr(std::string("objective.param.").size());
      if (param.empty()) bad_line(line_number, raw, "empty objective param name");
      config.objective.params[param] = value;
    } else if (key == "accuracy.delta") {
      config.delta = to_double(line_number, raw, value);
    } else if (key == "accuracy.eps") {
      config.eps = to_double(line_number, raw, value);
    } else if (key == "accuracy.gamma") {
      config.gamma = to_double(line_number, raw, value);
    } else if (key == "theory.Delta") {
      config.value_gap = to_double(line_number, raw, value);
    } else if (key == "theory.L0") {
      config.lipschitz_override = to_double(line_number, raw, value);
    } else if (key == "constants.c_T") {
      config.budget_scale = to_double(line_number, raw, value);
    } else if (key == "constants.c_S") {
      config.sample_scale = to_double(line_number, raw, value);
    } else if (key == "run.k") {
      config.batch = to_int(line_number, raw, value);
    } else if (key == "run.T") {
      config.budget = to_int(line_number, raw, value);
    } else if (key == "run.seed") {
      config.seed = static_cast<std::uint64_t>(to_int(line_number, raw, value));
    } else if (key == "run.x0") {
      Vector x0;
      for (const std::string& item : split_list(value)) {
        x0.push_back(to_double(line_number, raw, item));
      }
      if (x0.empty()) bad_line(line_number, raw, "empty x0");
      config.start = std::move(x0);
    } else if (key == "optimizer.rho") {
      config.raw_rho = to_double(line_number, raw, value);
    } else if (key == "optimizer.nu") {
      config.raw_nu = to_double(line_number, raw, value);
    } else if (key == "optimizer.D") {
      config.raw_clip = to_double(line_number, raw, value);
    } else if (key == "optimizer.eta") {
      config.raw_step = to_double(line_number, raw, value);
    } else if (key == "cert.hull_n") {
      config.hull_samples = to_int(line_number, raw, value);
    } else if (key == "cert.window_n") {
      config.window_samples = to_int(line_number, raw, value);
    } else if (key == "trace.mode") {
      if (value != "none" && value != "thin" && value != "full") {
        bad_line(line_number, raw, "trace.mode must be none, thin or full");
      }
      config.trace = value;
    } else if (key == "trace.stride") {
      config.trace_stride = to_int(line_number, raw, value);
    } else if (key == "out.dir") {
      config.out_dir = value;
    } else if (key == "sweep.dims") {
      config.sweep_dims.clear();
      for (const std::string& item : split_list(value)) {
        config.sweep_dims.push_back(
            static_cast<int>(to_int(line_number, raw, item)));
      }
      if (config.sweep_dims.empty()) bad_line(line_number, raw, "empty dims list");
      if (!std::is_sorted(config.sweep_dims.begin(), config.sweep_dims.end())) {
        bad_line(line_number, raw, "sweep.dims must be ascending");
      }
    } else if (key == "sweep.trials") {
      config.sweep_trials = static_cast<int>(to_int(line_number, raw, value));
    } else if (key == "sweep.T0") {
      config.sweep_budget_floor = to_int(line_number, raw, value);
    } else if (key == "sweep.T_cap") {
      config.sweep_budget_cap = to_int(line_number, raw, value);
    } else if (key == "sweep.x0_norm") {
      config.sweep_start_norm = to_double(line_number, raw, value);
    } else if (key == "conc.N") {
      config.conc_count = to_int(line_number, raw, value);
    } else if (key == "conc.d") {
      config.conc_dim = static_cast<int>(to_int(line_number, raw, value));
    } else if (key == "conc.lambdas") {
      config.conc_lambdas.clear();
      for (const std::string& item : split_list(value)) {
        config.conc_lambdas.push_back(to_double(line_number, raw, item));
      }
      if (config.conc_lambdas.empty()) bad_line(line_number, raw, "empty lambda list");
    } else if (key == "conc.trials") {
      config.conc_trials = to_int(line_number, raw, value);
    } else {
      bad_line(line_number, raw, "unknown key '" + key + "'");
    }
  }

  if (config.mode != RunMode::concentration) {
    if (config.objective.name.empty()) {
      throw std::invalid_argument("config: objective.name is required");
    }
    const int raw_count = config.raw_rho.has_value() + config.raw_nu.has_value() +
                          config.raw_clip.has_value() + config.raw_step.has_value();
    if (raw_count > 0 && (raw_count < 4 || !config.budget)) {
      throw std::invalid_argument(
          "config: raw optimizer parameters need all of optimizer.rho, "
          "optimizer.nu, optimizer.D, optimizer.eta and run.T");
    }
    if (config.objective.dimension < 1) {
      throw std::invalid_argument("config: objective.d must be >= 1");
    }
    // The guarantees are stated for accuracy parameters inside (0, 1); runs
    // outside that range proceed with a warning.
    auto warn_range = [&config](const char* name, double v) {
      if (!(v > 0.0 && v < 1.0)) {
        std::ostringstream msg;
        msg << name << " = " << v << " lies outside (0, 1), the range the "
            << "stationarity guarantees are stated for; executing anyway";
        config.warnings.push_back(msg.str());
      }
    };
    warn_range("accuracy.delta", config.delta);
    warn_range("accuracy.eps", config.eps);
    if (config.gamma && !(*config.gamma > 0.0 && *config.gamma < 1.0)) {
      throw std::invalid_argument("config: accuracy.gamma must lie in (0, 1)");
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open '" + path + "'");
  }
  return parse_config(in);
}

}  // namespace gfopt
