#include "spectriple/test_functions.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "spectriple/errors.hpp"
#include "spectriple/io.hpp"

namespace spectriple {

std::vector<std::string> list_functions() { return {"const1", "linear", "square", "user-table"}; }

TestFunction make_function(const std::string& name, const std::filesystem::path& table) {
  if (name == "const1") return {name, "f(x) = 1", [](double) { return 1.0; }, 1.0, 1.0};
  if (name == "linear") return {name, "f(x) = x", [](double x) { return x; }, 0.5, 1.0};
  if (name == "square") return {name, "f(x) = x^2", [](double x) { return x * x; }, 1.0 / 3.0, 1.0};
  if (name == "user-table") {
    if (table.empty()) throw Error(ErrorKind::invalid_argument, "user-table needs a table path");
    return load_user_table(table);
  }
  throw Error(ErrorKind::invalid_argument, "unknown test function '" + name + "'");
}

TestFunction user_table_from_text(const std::string& text, const std::string& label) {
  auto rows = parse_csv(text, false);
  // Tolerate a textual header row.
  if (!rows.empty()) {
    try {
      parse_real(rows.front().at(0), label);
    } catch (const Error&) {
      rows.erase(rows.begin());
    }
  }
  auto table = std::make_shared<std::vector<std::pair<double, double>>>();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 2) {
      throw Error(ErrorKind::parse, label + ": row " + std::to_string(i) + " needs x,f(x)");
    }
    const std::string where = label + ": row " + std::to_string(i);
    table->emplace_back(parse_real(rows[i][0], where), parse_real(rows[i][1], where));
  }
  std::sort(table->begin(), table->end());
  if (table->size() < 2 || table->front().first > 0.0 || table->back().first < 1.0) {
    throw Error(ErrorKind::range, label + ": user table must cover [0,1]");
  }
  auto eval = [table](double x) {
    const auto& t = *table;
    auto it = std::lower_bound(t.begin(), t.end(), x,
                               [](const auto& p, double v) { return p.first < v; });
    if (it == t.begin()) return it->second;
    if (it == t.end()) return t.back().second;
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *std::prev(it);
    if (x1 == x0) return y1;
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
  };
  // Exact integral of the interpolant over [0,1] and its sup there.
  std::vector<double> knots{0.0, 1.0};
  for (const auto& [x, y] : *table)
    if (x > 0.0 && x < 1.0) knots.push_back(x);
  std::sort(knots.begin(), knots.end());
  double integral = 0.0, sup = 0.0;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    sup = std::max(sup, std::fabs(eval(knots[i])));
    if (i > 0) integral += 0.5 * (eval(knots[i - 1]) + eval(knots[i])) * (knots[i] - knots[i - 1]);
  }
  return {"user-table", "piecewise linear from " + label, eval, integral, sup};
}

TestFunction load_user_table(const std::filesystem::path& path) {
  return user_table_from_text(read_file(path), path.string());
}

}  // namespace spectriple
