#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spectriple/triple.hpp"

namespace spectriple {

// A nonnegative length or infinity.  Infinity marks points in different
// components of the module graph.
class Length {
 public:
  static Length infinite() { return Length(); }
  static Length finite(double v) { return Length(v); }

  bool is_finite() const noexcept { return finite_; }
  // Only meaningful when finite.
  double value() const noexcept { return value_; }
  std::string to_string() const;

  friend bool operator==(const Length& a, const Length& b) noexcept {
    return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
  }

 private:
  Length() = default;
  explicit Length(double v) : finite_(true), value_(v) {}
  bool finite_ = false;
  double value_ = 0.0;
};

struct MetricViolation {
  std::size_t s = 0;  // point indices
  std::size_t t = 0;
  double d = 0.0;
  Length induced;
};

struct InducedMetricReport {
  std::vector<std::size_t> support;
  std::vector<Length> d_induced;  // row-major |support| x |support|
  // Over distinct support pairs of d_induced / d; +inf if any pair is
  // disconnected.  Both are 1 for a report without pairs.
  double max_ratio = 1.0;
  double min_ratio = 1.0;
  std::vector<MetricViolation> violations;

  std::size_t size() const noexcept { return support.size(); }
  const Length& at(std::size_t a, std::size_t b) const { return d_induced[a * support.size() + b]; }
  // Position of a point index in `support`, if present.
  std::optional<std::size_t> position(std::size_t point) const;
  // Distance between any two points of the space: 0 on the diagonal,
  // infinite when either point lies outside the support.
  Length between(std::size_t s, std::size_t t) const;
};

// Shortest-path lengths over the module graph (edge {x, y} of weight d(x, y))
// between support points.
InducedMetricReport induced_metric(const SpectralTripleSum& triple);

// sup |f(s) - f(t)| over f with |f(x) - f(y)| <= d(x, y) for every module,
// computed by fixed-point constraint propagation and checked against a tight
// certificate path.  Support must have at most 64 points.
Length lp_oracle(const SpectralTripleSum& triple, std::size_t s, std::size_t t);

struct MetricCheck {
  enum class Mode { exact, sandwich } mode = Mode::exact;
  double delta = 0.0;

  static MetricCheck exact() { return {}; }
  static MetricCheck sandwich(double delta) { return {Mode::sandwich, delta}; }
};

// induced_metric plus violations: exact mode flags |d_induced - d| > tol,
// sandwich mode flags d_induced < d - tol or d_induced > (1 + delta) d + tol,
// with tol = 1e-9 * diam.
InducedMetricReport metric_report(const SpectralTripleSum& triple, MetricCheck check);

// CSV rows s-id, t-id, d, d_induced, ratio for s < t, then a `#` summary
// block.
void write_metric_csv(const InducedMetricReport& report, const FiniteMetricSpace& space,
                      std::ostream& out, char sep = ',');

}  // namespace spectriple
