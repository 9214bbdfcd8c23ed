#include "pcb/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pcb/error.hpp"
#include "pcb/pointcloud.hpp"

namespace pcb {

LogLogFit fit_loglog(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error("fit_loglog: xs and ys differ in length");
  if (xs.size() < 2) throw Error("fit_loglog needs at least two pairs");
  const std::size_t m = xs.size();
  double sx = 0.0, sy = 0.0;
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw Error("fit_loglog: nonpositive value at pair " + std::to_string(i));
    }
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / static_cast<double>(m), my = sy / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw Error("fit_loglog: all x values are equal");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  fit.points = m;
  return fit;
}

nlohmann::json to_json(const LogLogFit& fit) {
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}, {"points", fit.points}};
}

void ExperimentReport::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw Error("report row has " + std::to_string(row.size()) + " cells, expected " +
                                                std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::size_t ExperimentReport::column_index(const std::string& column) const {
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] == column) return k;
  }
  throw Error("report has no column '" + column + "'");
}

double ExperimentReport::number(std::size_t row, const std::string& column) const {
  const Cell& c = rows.at(row).at(column_index(column));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  throw Error("report column '" + column + "' is not numeric");
}

std::string ExperimentReport::text(std::size_t row, const std::string& column) const {
  const Cell& c = rows.at(row).at(column_index(column));
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return format_double(std::get<double>(c));
}

std::vector<double> ExperimentReport::numbers(const std::string& column) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) out.push_back(number(r, column));
  return out;
}

std::optional<LogLogFit> ExperimentReport::fit(const std::string& label) const {
  for (const auto& [name, f] : fits) {
    if (name == label) return f;
  }
  return std::nullopt;
}

nlohmann::json ExperimentReport::header() const {
  nlohmann::json fit_json = nlohmann::json::object();
  for (const auto& [label, f] : fits) fit_json[label] = to_json(f);
  return {{"experiment", name}, {"config", config}, {"seeds", seeds}, {"fits", fit_json}, {"summary", summary}};
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream out;
  out << '#' << header().dump() << '\n';
  for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << columns[k];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out << format_double(v);
            } else {
              out << v;
            }
          },
          row[k]);
    }
    out << '\n';
  }
  return out.str();
}

void ExperimentReport::save(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << to_csv();
  if (!f) throw Error("failed writing " + path.string());
}

}  // namespace pcb
