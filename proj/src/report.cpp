#include "gfopt/report.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace gfopt {

void Report::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("report row width does not match the header");
  }
  rows.push_back(std::move(row));
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) {
    throw std::logic_error("format_double: conversion failed");
  }
  return std::string(buffer, ptr);
}

std::string format_int(long long value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) {
    throw std::logic_error("format_int: conversion failed");
  }
  return std::string(buffer, ptr);
}

void write_csv(const Report& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    if (i > 0) out << ',';
    out << report.columns[i];
  }
  out << '\n';
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error("failed while writing " + path.string());
  }
}

void write_echo(const Report& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << report.echo.dump(2) << '\n';
}

}  // namespace gfopt
