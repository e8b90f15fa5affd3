#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "spectriple/triple.hpp"

namespace spectriple {

struct SpectrumEntry {
  Magnitude value;
  std::int64_t multiplicity = 0;
};

// Eigenvalues of |D| with multiplicity.  D's spectrum is the symmetric
// closure: every 2x2 block contributes +-|lambda|, so a module adds its
// magnitude here with multiplicity 2 and the total multiplicity equals the
// dimension of the Hilbert space.
class SpectrumHistogram {
 public:
  SpectrumHistogram() = default;

  static SpectrumHistogram from_modules(std::span<const TwoPointModule> modules);
  // Sorts and merges equal magnitudes (exact for dyadic reciprocals, relative
  // 1e-12 otherwise).
  static SpectrumHistogram from_entries(std::vector<SpectrumEntry> entries);

  const std::vector<SpectrumEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  bool symmetric() const noexcept { return true; }
  std::int64_t total_multiplicity() const noexcept;
  // Sum of multiplicities of entries with value <= lambda.
  std::int64_t count_at_most(double lambda) const;

 private:
  std::vector<SpectrumEntry> entries_;
  std::vector<double> values_;
  std::vector<std::int64_t> cumulative_;
};

SpectrumHistogram spectrum(const SpectralTripleSum& triple);

enum class CountMode {
  eigenvalues,  // N(Lambda): eigenvalues of D with |lambda| <= Lambda
  blocks,       // 2x2 blocks with |lambda| <= Lambda
};

std::int64_t counting(const SpectrumHistogram& spec, double lambda,
                      CountMode mode = CountMode::eigenvalues);

struct CountingSweep {
  std::vector<double> grid;
  std::vector<std::int64_t> counts;
  std::vector<double> ratios;  // N(Lambda) / Lambda
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

// Geometric grid on [lambda_min, lambda_max] with points_per_octave points
// per doubling, refined with every eigenvalue in the window and its
// predecessor double so the extrema of the step function are hit.
CountingSweep counting_sweep(const SpectrumHistogram& spec, double lambda_min, double lambda_max,
                             int points_per_octave);

// Extremes of N(Lambda)/Lambda restricted to [lo, hi] of an existing sweep.
std::pair<double, double> ratio_extremes(const CountingSweep& sweep, double lo, double hi);

enum class ZetaForm { abs, resolvent };

// abs: tr |D|^{-s};  resolvent: tr (1 + D^2)^{-s/2}.
double zeta(const SpectrumHistogram& spec, double s, ZetaForm form);

struct LevelSpectrum {
  int level = 0;
  SpectrumHistogram spectrum;
};

std::vector<LevelSpectrum> level_spectra(const SpectralTripleSum& triple);

struct SummabilityProbe {
  double s = 0.0;
  std::vector<int> levels;
  std::vector<double> level_sums;  // tr |D|^{-s} restricted to each level
  // exp of the least-squares slope of log(level sum) against level over the
  // fit window; < 1 means the level sums decay geometrically.
  double tail_ratio = 0.0;
};

// Per-level sums for each s and their geometric tail ratio.  The fit uses
// levels in fit_levels (inclusive) when given, all levels otherwise; it
// needs at least 4 levels with positive sums.
std::vector<SummabilityProbe> summability_probe(
    const std::vector<LevelSpectrum>& levels, std::span<const double> s_values,
    std::optional<std::pair<int, int>> fit_levels = std::nullopt);
std::vector<SummabilityProbe> summability_probe(
    const SpectralTripleSum& triple, std::span<const double> s_values,
    std::optional<std::pair<int, int>> fit_levels = std::nullopt);

// tr(|D|^{-1} P_Lambda pi(f)) with f given per point of the space.  A block
// on {x, y} contributes (f(x) + f(y)) / |lambda|.
double weighted_trace(const SpectralTripleSum& triple, std::span<const double> f, double lambda);

// weighted_trace / log(lambda); lambda must exceed 1.
double dixmier_estimate(const SpectralTripleSum& triple, std::span<const double> f, double lambda);

void write_spectrum_csv(const SpectrumHistogram& spec, std::ostream& out, char sep = ',');
void write_sweep_csv(const CountingSweep& sweep, std::ostream& out, char sep = ',');

}  // namespace spectriple
