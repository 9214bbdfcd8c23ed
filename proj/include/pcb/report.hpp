#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace pcb {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares of log y on log x. Throws pcb::Error on fewer than two
/// pairs, mismatched lengths or nonpositive values.
LogLogFit fit_loglog(std::span<const double> xs, std::span<const double> ys);

nlohmann::json to_json(const LogLogFit& fit);

using Cell = std::variant<double, std::int64_t, std::string>;

/// Tabulated experiment output. The CSV form starts with one '#' line holding
/// the config, seeds, fits and summary as compact JSON, then a header row.
struct ExperimentReport {
  std::string name;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, LogLogFit>> fits;
  nlohmann::json summary = nlohmann::json::object();

  void add_row(std::vector<Cell> row);
  std::size_t column_index(const std::string& column) const;
  /// Numeric value of a cell (integers widened to double).
  double number(std::size_t row, const std::string& column) const;
  std::string text(std::size_t row, const std::string& column) const;
  std::vector<double> numbers(const std::string& column) const;
  std::optional<LogLogFit> fit(const std::string& label) const;

  nlohmann::json header() const;
  std::string to_csv() const;
  void save(const std::filesystem::path& path) const;
};

}  // namespace pcb
