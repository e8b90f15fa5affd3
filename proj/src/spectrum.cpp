#include "spectriple/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "spectriple/errors.hpp"
#include "spectriple/fit.hpp"
#include "spectriple/io.hpp"

namespace spectriple {

SpectrumHistogram SpectrumHistogram::from_modules(std::span<const TwoPointModule> modules) {
  std::vector<SpectrumEntry> entries;
  entries.reserve(modules.size());
  for (const auto& m : modules) entries.push_back({m.magnitude(), 2});
  return from_entries(std::move(entries));
}

SpectrumHistogram SpectrumHistogram::from_entries(std::vector<SpectrumEntry> entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.value < b.value; });
  SpectrumHistogram h;
  for (auto& e : entries) {
    if (e.multiplicity <= 0) continue;
    if (!h.entries_.empty() && same_eigenvalue(h.entries_.back().value, e.value)) {
      h.entries_.back().multiplicity += e.multiplicity;
    } else {
      h.entries_.push_back(std::move(e));
    }
  }
  std::int64_t running = 0;
  for (const auto& e : h.entries_) {
    running += e.multiplicity;
    h.values_.push_back(e.value.value());
    h.cumulative_.push_back(running);
  }
  return h;
}

std::int64_t SpectrumHistogram::total_multiplicity() const noexcept {
  return cumulative_.empty() ? 0 : cumulative_.back();
}

std::int64_t SpectrumHistogram::count_at_most(double lambda) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), lambda);
  if (it == values_.begin()) return 0;
  return cumulative_[static_cast<std::size_t>(it - values_.begin()) - 1];
}

SpectrumHistogram spectrum(const SpectralTripleSum& triple) {
  return SpectrumHistogram::from_modules(triple.modules());
}

std::int64_t counting(const SpectrumHistogram& spec, double lambda, CountMode mode) {
  const std::int64_t n = spec.count_at_most(lambda);
  return mode == CountMode::eigenvalues ? n : n / 2;
}

CountingSweep counting_sweep(const SpectrumHistogram& spec, double lambda_min, double lambda_max,
                             int points_per_octave) {
  if (!(lambda_min > 0.0) || !(lambda_min < lambda_max)) {
    throw Error(ErrorKind::invalid_argument, "sweep needs 0 < lambda_min < lambda_max");
  }
  if (points_per_octave < 8) {
    throw Error(ErrorKind::invalid_argument, "sweep needs points_per_octave >= 8");
  }
  CountingSweep sweep;
  for (int k = 0;; ++k) {
    const double v = lambda_min * std::exp2(static_cast<double>(k) / points_per_octave);
    if (v >= lambda_max) break;
    sweep.grid.push_back(v);
  }
  sweep.grid.push_back(lambda_max);
  for (const auto& e : spec.entries()) {
    const double v = e.value.value();
    if (v < lambda_min || v > lambda_max) continue;
    sweep.grid.push_back(v);
    const double before = std::nextafter(v, 0.0);
    if (before >= lambda_min) sweep.grid.push_back(before);
  }
  std::sort(sweep.grid.begin(), sweep.grid.end());
  sweep.grid.erase(std::unique(sweep.grid.begin(), sweep.grid.end()), sweep.grid.end());
  for (double v : sweep.grid) {
    const auto n = spec.count_at_most(v);
    sweep.counts.push_back(n);
    sweep.ratios.push_back(static_cast<double>(n) / v);
  }
  sweep.min_ratio = *std::min_element(sweep.ratios.begin(), sweep.ratios.end());
  sweep.max_ratio = *std::max_element(sweep.ratios.begin(), sweep.ratios.end());
  return sweep;
}

std::pair<double, double> ratio_extremes(const CountingSweep& sweep, double lo, double hi) {
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
    if (sweep.grid[i] < lo || sweep.grid[i] > hi) continue;
    mn = std::min(mn, sweep.ratios[i]);
    mx = std::max(mx, sweep.ratios[i]);
  }
  return {mn, mx};
}

double zeta(const SpectrumHistogram& spec, double s, ZetaForm form) {
  if (!(s > 0.0)) throw Error(ErrorKind::invalid_argument, "zeta needs s > 0");
  double sum = 0.0;
  for (const auto& e : spec.entries()) {
    const double term = form == ZetaForm::abs ? e.value.inverse_power(s) : e.value.resolvent_power(s);
    sum += static_cast<double>(e.multiplicity) * term;
  }
  return sum;
}

std::vector<LevelSpectrum> level_spectra(const SpectralTripleSum& triple) {
  std::map<int, std::vector<TwoPointModule>> by_level;
  for (const auto& m : triple.modules()) by_level[m.level].push_back(m);
  std::vector<LevelSpectrum> out;
  for (const auto& [level, mods] : by_level) {
    out.push_back({level, SpectrumHistogram::from_modules(mods)});
  }
  return out;
}

std::vector<SummabilityProbe> summability_probe(const std::vector<LevelSpectrum>& levels,
                                                std::span<const double> s_values,
                                                std::optional<std::pair<int, int>> fit_levels) {
  std::vector<SummabilityProbe> out;
  for (double s : s_values) {
    if (!(s > 0.0)) throw Error(ErrorKind::invalid_argument, "summability probe needs s > 0");
    SummabilityProbe probe;
    probe.s = s;
    std::vector<double> xs, ys;
    for (const auto& lv : levels) {
      const double sum = zeta(lv.spectrum, s, ZetaForm::abs);
      probe.levels.push_back(lv.level);
      probe.level_sums.push_back(sum);
      const bool in_window =
          !fit_levels || (lv.level >= fit_levels->first && lv.level <= fit_levels->second);
      if (in_window && sum > 0.0) {
        xs.push_back(lv.level);
        ys.push_back(std::log(sum));
      }
    }
    if (xs.size() < 4) {
      throw Error(ErrorKind::insufficient_data,
                  "summability probe needs >= 4 levels with modules, got " +
                      std::to_string(xs.size()));
    }
    probe.tail_ratio = std::exp(least_squares(xs, ys).slope);
    out.push_back(std::move(probe));
  }
  return out;
}

std::vector<SummabilityProbe> summability_probe(const SpectralTripleSum& triple,
                                                std::span<const double> s_values,
                                                std::optional<std::pair<int, int>> fit_levels) {
  return summability_probe(level_spectra(triple), s_values, fit_levels);
}

double weighted_trace(const SpectralTripleSum& triple, std::span<const double> f, double lambda) {
  if (f.size() != triple.space().size()) {
    throw Error(ErrorKind::invalid_argument, "function needs one value per point of the space");
  }
  double sum = 0.0;
  for (const auto& m : triple.modules()) {
    const Magnitude mag = m.magnitude();
    if (mag.value() <= lambda) sum += (f[m.x.point] + f[m.y.point]) / mag.value();
  }
  return sum;
}

double dixmier_estimate(const SpectralTripleSum& triple, std::span<const double> f, double lambda) {
  if (!(lambda > 1.0)) throw Error(ErrorKind::invalid_argument, "dixmier estimate needs lambda > 1");
  return weighted_trace(triple, f, lambda) / std::log(lambda);
}

void write_spectrum_csv(const SpectrumHistogram& spec, std::ostream& out, char sep) {
  out << "eigenvalue" << sep << "multiplicity" << sep << "abs_value" << sep << "d\n";
  auto row = [&](const SpectrumEntry& e, int sign) {
    const double v = e.value.value();
    out << (sign < 0 ? format_real(-v) : format_real(v)) << sep << e.multiplicity / 2 << sep
        << format_real(v) << sep << e.value.distance().to_string() << '\n';
  };
  const auto& es = spec.entries();
  for (auto it = es.rbegin(); it != es.rend(); ++it) row(*it, -1);
  for (const auto& e : es) row(e, +1);
}

void write_sweep_csv(const CountingSweep& sweep, std::ostream& out, char sep) {
  out << "lambda" << sep << "N" << sep << "N_over_lambda\n";
  for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
    out << format_real(sweep.grid[i]) << sep << sweep.counts[i] << sep
        << format_real(sweep.ratios[i]) << '\n';
  }
}

}  // namespace spectriple
