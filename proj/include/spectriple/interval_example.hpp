#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spectriple/dyadic.hpp"
#include "spectriple/spectrum.hpp"
#include "spectriple/test_functions.hpp"
#include "spectriple/triple.hpp"

namespace spectriple::interval {

// ST(9) on [0,1] with theta = 1, rho = 1/2 (so k0 = l = 0).  Pairs are
// emitted for levels 5..n_max; T_4 only enters as partner of T_5 centers,
// through the cross-level pairs of level 4.
inline constexpr int kFirstLevel = 5;
inline constexpr int kPartnerLevel = 4;
inline constexpr int kMinNMax = 6;
inline constexpr int kMaxNMax = 30;
inline constexpr int kExplicitLimit = 16;
inline constexpr double kDelta = 9.0;

enum class Path { explicit_modules, aggregate };

// Center j of T_n: (2j+1) 2^{1-n} for n >= 3, 1/2 for n <= 2.
Dyadic center(int n, std::int64_t j);
std::int64_t center_count(int n);

struct ModuleRecord {
  int level = 0;  // level of x
  Dyadic x;
  Dyadic y;
  int y_level = 0;  // level or level + 1
  Dyadic d;
};

// Modules of one level sharing a distance.
struct DistanceClass {
  Dyadic d;
  std::int64_t count = 0;
};

class IntervalTriple {
 public:
  // Explicit module list when n_max <= 16; the aggregate path is always
  // available.
  static IntervalTriple build(int n_max);

  int n_min() const noexcept { return kFirstLevel; }
  int n_max() const noexcept { return n_max_; }
  StDeltaParams params() const;
  bool has_explicit() const noexcept { return explicit_.has_value(); }
  const SpectralTripleSum& explicit_triple() const;

  // Module levels present: 4..n_max.
  std::vector<int> levels() const;

  // Aggregate enumeration: interior centers follow the regular six-module
  // pattern, the two centers at each end are scanned against the rules.
  void for_each_module(int level, const std::function<void(const ModuleRecord&)>& fn) const;

  std::vector<DistanceClass> level_classes(int level, Path path) const;
  std::vector<LevelSpectrum> level_spectra(Path path) const;
  SpectrumHistogram spectrum(Path path) const;

  // Distances of all modules incident to center j of T_n (either endpoint).
  std::vector<Dyadic> incident_distances(int n, std::int64_t j, Path path) const;

  // tr(|D|^{-1} P_Lambda pi(f)).
  double weighted_trace(const std::function<double(double)>& f, double lambda, Path path) const;
  // Entry M holds the part of the weighted trace entering between
  // Lambda = 2^{M-1} (exclusive) and 2^M (inclusive); a module of distance d
  // enters at M = -floor(log2 d).  Prefix sums give the trace at Lambda = 2^M.
  std::vector<double> octave_traces(const std::function<double(double)>& f, Path path) const;

 private:
  explicit IntervalTriple(int n_max) : n_max_(n_max) {}
  int n_max_;
  std::optional<SpectralTripleSum> explicit_;
  std::vector<std::vector<std::size_t>> explicit_by_level_;  // module indices, levels 4..n_max
};

// Exact and idealized multiplicities of the |D| eigenvalues 2^n and 2^n/3.
struct MultiplicityRow {
  int n = 0;
  std::int64_t mult_pow2 = 0;
  std::int64_t mult_third = 0;
  std::int64_t ideal_pow2 = 0;   // 7 * 2^n
  std::int64_t ideal_third = 0;  // 2^n
  std::int64_t deficit_pow2 = 0;
  std::int64_t deficit_third = 0;
  // All contributing levels exist: n in [n_min + 4, n_max - 4].
  bool fully_realized = false;
};

std::vector<MultiplicityRow> multiplicity_table(const IntervalTriple& triple, int n_lo, int n_hi,
                                                Path path);

// True when every eigenvalue has the form 2^k or 2^k/3.
bool only_dyadic_and_third_shapes(const SpectrumHistogram& spec);

struct ExampleOptions {
  int n_max = 20;
  double lambda_lo = 512.0;
  double lambda_hi = 8192.0;
  int points_per_octave = 16;
  int metric_n_max = 9;
  std::vector<double> s_values{1.0, 1.2, 1.5};
  std::pair<int, int> summability_levels{8, 18};
  std::pair<int, int> dixmier_window{10, 18};
  std::vector<TestFunction> functions;  // const1, linear, square when empty
};

// Induced metric on the explicit triple.  Pairs of centers of one level
// T_n (5 <= n <= n_max) are joined by chains of consecutive same-level
// centers and must be recovered exactly, and d <= d_induced must hold on
// every support pair.  The upper bound d_induced <= 10 d needs the levels
// below the truncation, so its failures between fine and coarse points are
// counted but do not fail the item.
struct MetricItem {
  int n_max = 0;
  std::size_t support_points = 0;
  std::size_t level_pairs = 0;
  double level_max_abs_error = 0.0;
  std::size_t support_pairs = 0;
  std::size_t lower_violations = 0;
  std::size_t upper_violations = 0;
  double support_min_ratio = 1.0;
  double support_max_ratio = 1.0;
  bool pass = false;
};

struct SummabilityItem {
  std::vector<SummabilityProbe> probes;
  bool pass = false;
};

struct SweepItem {
  CountingSweep sweep;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::vector<std::pair<double, double>> octave_extremes;  // per octave (min, max)
  bool pass = false;
};

struct DixmierItem {
  std::string function;
  double integral = 0.0;
  std::vector<int> m_values;
  std::vector<double> s_values;  // S(M)
  double slope = 0.0;
  double slope_target = 0.0;  // 10 * integral
  double raw_quotient = 0.0;  // S(M_hi) / (M_hi log 2)
  double limit = 0.0;         // (10 / log 2) * integral
  bool pass = false;
};

struct ExampleReport {
  ExampleOptions options;
  MetricItem metric;
  SummabilityItem summability;
  SweepItem sweep;
  std::vector<DixmierItem> dixmier;
  std::vector<MultiplicityRow> multiplicities;
  bool pass() const;
};

ExampleReport example_report(const ExampleOptions& options);

// Writes item_a.csv .. item_d.csv, item_e.txt, multiplicities.csv and
// summary.csv into dir.  Every file starts with the given header lines.
void write_example_report(const ExampleReport& report, const std::filesystem::path& dir,
                          char sep, const std::vector<std::string>& header);

}  // namespace spectriple::interval
