#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace gfopt {

/// Tabular experiment output. Cells are preformatted so CSV bytes are stable
/// across runs with identical inputs.
struct Report {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  nlohmann::json echo;  // resolved configuration, for reproducibility

  void add_row(std::vector<std::string> row);
};

/// Shortest round-trip decimal form (std::to_chars); locale-independent.
std::string format_double(double value);
std::string format_int(long long value);

void write_csv(const Report& report, const std::filesystem::path& path);
void write_echo(const Report& report, const std::filesystem::path& path);

}  // namespace gfopt
