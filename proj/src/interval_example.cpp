#include "spectriple/interval_example.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>

#include "spectriple/connes_metric.hpp"
#include "spectriple/covering.hpp"
#include "spectriple/errors.hpp"
#include "spectriple/fit.hpp"
#include "spectriple/io.hpp"
#include "spectriple/parallel.hpp"

namespace spectriple::interval {
namespace {

using ModuleFn = std::function<void(const ModuleRecord&)>;

// Scans center j of T_n against the pair rules: same-level partners to the
// right (each unordered pair once) and partners in T_{n+1}.
void scan_center(const StDeltaParams& params, int n, std::int64_t j, bool same_level,
                 const ModuleFn& fn) {
  const Dyadic x = center(n, j);
  if (same_level) {
    const Distance bound = params.same_level_bound(n);
    const std::int64_t last = std::min(center_count(n) - 1, j + 4);
    for (std::int64_t k = j + 1; k <= last; ++k) {
      const Dyadic y = center(n, k);
      const Dyadic d = (y - x).abs();
      if (within_bound(Distance::of(d), bound)) fn({n, x, y, n, d});
    }
  }
  const Distance bound = params.next_level_bound(n);
  const std::int64_t first = std::max<std::int64_t>(0, 2 * j - 4);
  const std::int64_t last = std::min(center_count(n + 1) - 1, 2 * j + 5);
  for (std::int64_t k = first; k <= last; ++k) {
    const Dyadic y = center(n + 1, k);
    const Dyadic d = (y - x).abs();
    if (!d.is_zero() && within_bound(Distance::of(d), bound)) fn({n, x, y, n + 1, d});
  }
}

bool is_boundary(std::int64_t j, std::int64_t count) { return j < 2 || j >= count - 2; }

// Regular modules owned by interior center j of T_n, in units of 2^{-n}:
// same-level 4 and 8 to the right, next-level 3, 1, 1, 3.
void interior_modules(int n, std::int64_t j, const ModuleFn& fn) {
  const Dyadic x = center(n, j);
  fn({n, x, center(n, j + 1), n, Dyadic(4, n)});
  fn({n, x, center(n, j + 2), n, Dyadic(8, n)});
  fn({n, x, center(n + 1, 2 * j - 1), n + 1, Dyadic(3, n)});
  fn({n, x, center(n + 1, 2 * j), n + 1, Dyadic(1, n)});
  fn({n, x, center(n + 1, 2 * j + 1), n + 1, Dyadic(1, n)});
  fn({n, x, center(n + 1, 2 * j + 2), n + 1, Dyadic(3, n)});
}

SpectrumHistogram histogram_of(const std::vector<DistanceClass>& classes) {
  std::vector<SpectrumEntry> entries;
  entries.reserve(classes.size());
  for (const auto& c : classes) {
    entries.push_back({Magnitude::reciprocal(Distance::of(c.d)), 2 * c.count});
  }
  return SpectrumHistogram::from_entries(std::move(entries));
}

std::vector<DistanceClass> to_classes(const std::map<Dyadic, std::int64_t>& counts) {
  std::vector<DistanceClass> out;
  for (const auto& [d, c] : counts) out.push_back({d, c});
  return out;
}

std::ofstream open_output(const std::filesystem::path& path,
                          const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::invalid_argument, "cannot write " + path.string());
  for (const auto& line : header) out << "# " << line << '\n';
  return out;
}

}  // namespace

Dyadic center(int n, std::int64_t j) {
  if (n <= 2) return Dyadic(1, 1);
  return Dyadic(2 * j + 1, n - 1);
}

std::int64_t center_count(int n) { return n <= 2 ? 1 : std::int64_t{1} << (n - 2); }

IntervalTriple IntervalTriple::build(int n_max) {
  if (n_max < kMinNMax || n_max > kMaxNMax) {
    throw Error(ErrorKind::invalid_argument,
                "interval example needs n_max in [" + std::to_string(kMinNMax) + ", " +
                    std::to_string(kMaxNMax) + "], got " + std::to_string(n_max));
  }
  IntervalTriple t(n_max);
  if (n_max > kExplicitLimit) return t;

  // The endpoints 0 and 1 pin the diameter to 1; they never enter a module.
  std::vector<Dyadic> points{Dyadic::integer(0), Dyadic::integer(1)};
  for (int n = 2; n <= n_max + 1; ++n) {
    for (std::int64_t j = 0; j < center_count(n); ++j) points.push_back(center(n, j));
  }
  std::sort(points.begin(), points.end());
  const auto space = FiniteMetricSpace::from_dyadic_points(points, "interval centers");
  const auto chain = covering_chain(space, 1.0, 0.5, n_max + 1, CoveringStrategy::dyadic_interval);
  const auto full = build_st_delta(space, chain, kDelta, kPartnerLevel, n_max);

  std::vector<TwoPointModule> modules;
  for (const auto& m : full.modules()) {
    if (m.level == kPartnerLevel && m.y.level == kPartnerLevel) continue;
    modules.push_back(m);
  }
  t.explicit_.emplace(space, std::move(modules), TripleKind::st_delta, t.params());
  t.explicit_by_level_.resize(static_cast<std::size_t>(n_max - kPartnerLevel + 1));
  const auto& mods = t.explicit_->modules();
  for (std::size_t i = 0; i < mods.size(); ++i) {
    t.explicit_by_level_[static_cast<std::size_t>(mods[i].level - kPartnerLevel)].push_back(i);
  }
  return t;
}

StDeltaParams IntervalTriple::params() const {
  StDeltaParams p;
  p.theta = 1.0;
  p.rho = 0.5;
  p.delta = kDelta;
  p.k0 = 0;
  p.l = 0;
  p.n_min = kFirstLevel;
  p.n_max = n_max_;
  return p;
}

const SpectralTripleSum& IntervalTriple::explicit_triple() const {
  if (!explicit_) {
    throw Error(ErrorKind::size_limit, "explicit modules are only kept for n_max <= " +
                                           std::to_string(kExplicitLimit));
  }
  return *explicit_;
}

std::vector<int> IntervalTriple::levels() const {
  std::vector<int> out;
  for (int n = kPartnerLevel; n <= n_max_; ++n) out.push_back(n);
  return out;
}

void IntervalTriple::for_each_module(int level, const ModuleFn& fn) const {
  if (level < kPartnerLevel || level > n_max_) return;
  const auto p = params();
  const std::int64_t count = center_count(level);
  for (std::int64_t j = 0; j < count; ++j) {
    if (level == kPartnerLevel) {
      scan_center(p, level, j, false, fn);
    } else if (is_boundary(j, count)) {
      scan_center(p, level, j, true, fn);
    } else {
      interior_modules(level, j, fn);
    }
  }
}

std::vector<DistanceClass> IntervalTriple::level_classes(int level, Path path) const {
  std::map<Dyadic, std::int64_t> counts;
  if (level < kPartnerLevel || level > n_max_) return {};
  if (path == Path::explicit_modules) {
    const auto& mods = explicit_triple().modules();
    for (auto i : explicit_by_level_[static_cast<std::size_t>(level - kPartnerLevel)]) {
      ++counts[*mods[i].d.exact];
    }
    return to_classes(counts);
  }
  const auto p = params();
  const std::int64_t count = center_count(level);
  auto add = [&](const ModuleRecord& r) { ++counts[r.d]; };
  if (level == kPartnerLevel) {
    for (std::int64_t j = 0; j < count; ++j) scan_center(p, level, j, false, add);
    return to_classes(counts);
  }
  const std::int64_t interior = count - 4;
  for (const int c : {4, 8, 3, 3}) counts[Dyadic(c, level)] += interior;
  counts[Dyadic(1, level)] += 2 * interior;
  for (const std::int64_t j : {std::int64_t{0}, std::int64_t{1}, count - 2, count - 1}) {
    scan_center(p, level, j, true, add);
  }
  return to_classes(counts);
}

std::vector<LevelSpectrum> IntervalTriple::level_spectra(Path path) const {
  std::vector<LevelSpectrum> out;
  for (int n : levels()) out.push_back({n, histogram_of(level_classes(n, path))});
  return out;
}

SpectrumHistogram IntervalTriple::spectrum(Path path) const {
  std::vector<DistanceClass> all;
  for (int n : levels()) {
    const auto cls = level_classes(n, path);
    all.insert(all.end(), cls.begin(), cls.end());
  }
  return histogram_of(all);
}

std::vector<Dyadic> IntervalTriple::incident_distances(int n, std::int64_t j, Path path) const {
  if (n < kPartnerLevel || n > n_max_ + 1 || j < 0 || j >= center_count(n)) {
    throw Error(ErrorKind::invalid_argument, "no center " + std::to_string(j) + " in level " +
                                                 std::to_string(n));
  }
  const Dyadic x = center(n, j);
  std::vector<Dyadic> out;
  if (path == Path::explicit_modules) {
    const auto& triple = explicit_triple();
    const auto idx = triple.space().find_dyadic(x);
    for (int level : {n - 1, n}) {
      if (level < kPartnerLevel || level > n_max_) continue;
      for (auto i : explicit_by_level_[static_cast<std::size_t>(level - kPartnerLevel)]) {
        const auto& m = triple.modules()[i];
        if ((m.x.point == *idx && m.x.level == n) || (m.y.point == *idx && m.y.level == n)) {
          out.push_back(*m.d.exact);
        }
      }
    }
  } else {
    for (int level : {n - 1, n}) {
      for_each_module(level, [&](const ModuleRecord& r) {
        if ((r.level == n && r.x == x) || (r.y_level == n && r.y == x)) out.push_back(r.d);
      });
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> IntervalTriple::octave_traces(const std::function<double(double)>& f,
                                                  Path path) const {
  std::vector<double> total(static_cast<std::size_t>(n_max_ + 1), 0.0);
  if (path == Path::explicit_modules) {
    const auto& triple = explicit_triple();
    const auto& space = triple.space();
    for (const auto& m : triple.modules()) {
      const auto octave = static_cast<std::size_t>(-m.d.exact->floor_log2());
      total[octave] += m.d.value * (f(space.coordinates(m.x.point)[0]) +
                                    f(space.coordinates(m.y.point)[0]));
    }
    return total;
  }
  const auto lv = levels();
  std::vector<std::vector<double>> parts(lv.size(), total);
  parallel_for(lv.size(), [&](std::size_t i) {
    auto& part = parts[i];
    for_each_module(lv[i], [&](const ModuleRecord& r) {
      const auto octave = static_cast<std::size_t>(-r.d.floor_log2());
      part[octave] += r.d.to_double() * (f(r.x.to_double()) + f(r.y.to_double()));
    });
  });
  for (const auto& part : parts)
    for (std::size_t m = 0; m < total.size(); ++m) total[m] += part[m];
  return total;
}

double IntervalTriple::weighted_trace(const std::function<double(double)>& f, double lambda,
                                      Path path) const {
  if (path == Path::explicit_modules) {
    const auto& triple = explicit_triple();
    std::vector<double> values(triple.space().size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = f(triple.space().coordinates(i)[0]);
    return spectriple::weighted_trace(triple, values, lambda);
  }
  const auto lv = levels();
  std::vector<double> parts(lv.size(), 0.0);
  parallel_for(lv.size(), [&](std::size_t i) {
    // Every module of level n has d <= 8 * 2^{-n}.
    if (Dyadic(8, lv[i]).reciprocal_double() > lambda) return;
    for_each_module(lv[i], [&](const ModuleRecord& r) {
      if (r.d.reciprocal_double() <= lambda) {
        parts[i] += r.d.to_double() * (f(r.x.to_double()) + f(r.y.to_double()));
      }
    });
  });
  double sum = 0.0;
  for (double v : parts) sum += v;
  return sum;
}

std::vector<MultiplicityRow> multiplicity_table(const IntervalTriple& triple, int n_lo, int n_hi,
                                                Path path) {
  std::map<Dyadic, std::int64_t> mult;
  for (const auto& e : triple.spectrum(path).entries()) mult[*e.value.exact_reciprocal()] += e.multiplicity;
  std::vector<MultiplicityRow> rows;
  for (int n = n_lo; n <= n_hi; ++n) {
    MultiplicityRow row;
    row.n = n;
    const auto pow2 = mult.find(Dyadic(1, n));
    const auto third = mult.find(Dyadic(3, n));
    row.mult_pow2 = pow2 == mult.end() ? 0 : pow2->second;
    row.mult_third = third == mult.end() ? 0 : third->second;
    row.ideal_pow2 = 7 * (std::int64_t{1} << n);
    row.ideal_third = std::int64_t{1} << n;
    row.deficit_pow2 = row.ideal_pow2 - row.mult_pow2;
    row.deficit_third = row.ideal_third - row.mult_third;
    row.fully_realized = n >= triple.n_min() + 4 && n <= triple.n_max() - 4;
    rows.push_back(row);
  }
  return rows;
}

bool only_dyadic_and_third_shapes(const SpectrumHistogram& spec) {
  return std::all_of(spec.entries().begin(), spec.entries().end(), [](const SpectrumEntry& e) {
    const auto& d = e.value.exact_reciprocal();
    return d && (d->num() == 1 || d->num() == 3);
  });
}

bool ExampleReport::pass() const {
  return metric.pass && summability.pass && sweep.pass &&
         std::all_of(dixmier.begin(), dixmier.end(), [](const DixmierItem& d) { return d.pass; });
}

namespace {

MetricItem metric_item(int n_max) {
  const auto triple = IntervalTriple::build(n_max);
  const auto& st = triple.explicit_triple();
  const auto& space = st.space();
  const auto report = induced_metric(st);
  MetricItem item;
  item.n_max = n_max;
  item.support_points = report.size();
  constexpr double tol = 1e-9;
  std::vector<int> level_of(report.size(), 0);
  for (std::size_t a = 0; a < report.size(); ++a) {
    // T_n centers are odd multiples of 2^{1-n}.
    level_of[a] = space.dyadic_coordinate(report.support[a])->log2_den() + 1;
  }
  item.support_min_ratio = std::numeric_limits<double>::infinity();
  item.support_max_ratio = 0.0;
  for (std::size_t a = 0; a < report.size(); ++a) {
    for (std::size_t b = a + 1; b < report.size(); ++b) {
      const double d = space.distance(report.support[a], report.support[b]);
      const auto& len = report.at(a, b);
      const double induced = len.is_finite() ? len.value() : std::numeric_limits<double>::infinity();
      ++item.support_pairs;
      item.support_min_ratio = std::min(item.support_min_ratio, induced / d);
      item.support_max_ratio = std::max(item.support_max_ratio, induced / d);
      if (induced < d - tol) ++item.lower_violations;
      if (induced > (1.0 + kDelta) * d + tol) ++item.upper_violations;
      if (level_of[a] == level_of[b] && level_of[a] >= kFirstLevel && level_of[a] <= n_max) {
        ++item.level_pairs;
        item.level_max_abs_error = std::max(item.level_max_abs_error, std::fabs(induced - d));
      }
    }
  }
  item.pass = item.lower_violations == 0 && item.level_max_abs_error <= tol && item.level_pairs > 0;
  return item;
}

}  // namespace

ExampleReport example_report(const ExampleOptions& options) {
  ExampleReport rep;
  rep.options = options;
  if (rep.options.functions.empty()) {
    for (const char* name : {"const1", "linear", "square"}) rep.options.functions.push_back(make_function(name));
  }
  const auto& opt = rep.options;
  const auto triple = IntervalTriple::build(opt.n_max);

  rep.metric = metric_item(opt.metric_n_max);

  auto [s_lo, s_hi] = opt.summability_levels;
  s_hi = std::min(s_hi, opt.n_max);
  rep.summability.probes =
      summability_probe(triple.level_spectra(Path::aggregate), opt.s_values, std::pair{s_lo, s_hi});
  rep.summability.pass = true;
  for (const auto& p : rep.summability.probes) {
    if (p.s == 1.0) rep.summability.pass &= p.tail_ratio >= 0.95 && p.tail_ratio <= 1.05;
    if (p.s > 1.0) rep.summability.pass &= p.tail_ratio < 1.0;
    if (p.s == 1.5) rep.summability.pass &= p.tail_ratio >= 0.66 && p.tail_ratio <= 0.76;
  }

  const auto spec = triple.spectrum(Path::aggregate);
  rep.sweep.sweep = counting_sweep(spec, opt.lambda_lo, opt.lambda_hi, opt.points_per_octave);
  rep.sweep.min_ratio = rep.sweep.sweep.min_ratio;
  rep.sweep.max_ratio = rep.sweep.sweep.max_ratio;
  bool octaves_ok = true;
  for (double lo = opt.lambda_lo; lo * 2.0 <= opt.lambda_hi * (1.0 + 1e-12); lo *= 2.0) {
    const auto ext = ratio_extremes(rep.sweep.sweep, lo, lo * 2.0);
    rep.sweep.octave_extremes.push_back(ext);
    octaves_ok &= ext.second - ext.first >= 3.0;
  }
  rep.sweep.pass = rep.sweep.min_ratio >= 9.8 && rep.sweep.min_ratio <= 13.2 &&
                   rep.sweep.max_ratio >= 16.8 && rep.sweep.max_ratio <= 20.2 && octaves_ok &&
                   !rep.sweep.octave_extremes.empty();

  // The trace at Lambda = 2^M is complete once levels up to M + 3 exist.
  const int m_lo = opt.dixmier_window.first;
  const int m_hi = std::min(opt.dixmier_window.second, opt.n_max - 3);
  for (const auto& fn : opt.functions) {
    DixmierItem item;
    item.function = fn.name;
    item.integral = fn.integral;
    item.slope_target = 10.0 * fn.integral;
    item.limit = 10.0 / std::numbers::ln2 * fn.integral;
    const auto octaves = triple.octave_traces(fn.eval, Path::aggregate);
    double running = 0.0;
    std::vector<double> xs;
    for (int m = 0; m <= m_hi; ++m) {
      running += octaves[static_cast<std::size_t>(m)];
      if (m < m_lo) continue;
      item.m_values.push_back(m);
      item.s_values.push_back(running);
      xs.push_back(m);
    }
    if (xs.size() >= 2) {
      item.slope = least_squares(xs, item.s_values).slope;
      item.raw_quotient = item.s_values.back() / (m_hi * std::numbers::ln2);
      const double scale = 10.0 * std::max(fn.sup_norm, 1e-300);
      item.pass = std::fabs(item.slope - item.slope_target) <= 0.02 * scale &&
                  std::fabs(item.raw_quotient - item.limit) <= 0.3 * std::fabs(item.limit);
    }
    rep.dixmier.push_back(std::move(item));
  }

  rep.multiplicities = multiplicity_table(triple, kFirstLevel, opt.n_max, Path::aggregate);
  return rep;
}

void write_example_report(const ExampleReport& rep, const std::filesystem::path& dir, char sep,
                          const std::vector<std::string>& header) {
  std::filesystem::create_directories(dir);
  const auto& opt = rep.options;
  {
    auto out = open_output(dir / "item_a.csv", header);
    out << "# induced metric on the explicit triple, n_max = " << rep.metric.n_max << '\n';
    out << "quantity" << sep << "value\n";
    out << "support_points" << sep << rep.metric.support_points << '\n';
    out << "level_pairs" << sep << rep.metric.level_pairs << '\n';
    out << "level_max_abs_error" << sep << format_real(rep.metric.level_max_abs_error) << '\n';
    out << "support_pairs" << sep << rep.metric.support_pairs << '\n';
    out << "lower_violations" << sep << rep.metric.lower_violations << '\n';
    out << "upper_violations_informational" << sep << rep.metric.upper_violations << '\n';
    out << "support_min_ratio" << sep << format_real(rep.metric.support_min_ratio) << '\n';
    out << "support_max_ratio" << sep << format_real(rep.metric.support_max_ratio) << '\n';
  }
  {
    auto out = open_output(dir / "item_b.csv", header);
    out << "s" << sep << "level" << sep << "level_sum" << sep << "tail_ratio\n";
    for (const auto& p : rep.summability.probes) {
      for (std::size_t i = 0; i < p.levels.size(); ++i) {
        out << format_real(p.s) << sep << p.levels[i] << sep << format_real(p.level_sums[i]) << sep
            << format_real(p.tail_ratio) << '\n';
      }
    }
  }
  {
    auto out = open_output(dir / "item_c.csv", header);
    out << "# window [" << format_real(opt.lambda_lo) << ", " << format_real(opt.lambda_hi)
        << "], min_ratio " << format_real(rep.sweep.min_ratio) << ", max_ratio "
        << format_real(rep.sweep.max_ratio) << '\n';
    write_sweep_csv(rep.sweep.sweep, out, sep);
  }
  {
    auto out = open_output(dir / "item_d.csv", header);
    out << "function" << sep << "M" << sep << "S_M" << sep << "quotient\n";
    for (const auto& d : rep.dixmier) {
      for (std::size_t i = 0; i < d.m_values.size(); ++i) {
        out << d.function << sep << d.m_values[i] << sep << format_real(d.s_values[i]) << sep
            << format_real(d.s_values[i] / (d.m_values[i] * std::numbers::ln2)) << '\n';
      }
    }
    for (const auto& d : rep.dixmier) {
      out << "# " << d.function << ": slope " << format_real(d.slope) << " target "
          << format_real(d.slope_target) << ", quotient " << format_real(d.raw_quotient)
          << " limit " << format_real(d.limit) << '\n';
    }
  }
  {
    auto out = open_output(dir / "item_e.txt", header);
    out << "The log-limit of item (d) is the Dixmier trace of |D|^{-1} pi(f); its estimates are\n"
           "in item_d.csv and no separate computation is performed.\n";
  }
  {
    auto out = open_output(dir / "multiplicities.csv", header);
    out << "n" << sep << "mult_2^n" << sep << "ideal_2^n" << sep << "deficit_2^n" << sep
        << "mult_2^n/3" << sep << "ideal_2^n/3" << sep << "deficit_2^n/3" << sep
        << "fully_realized\n";
    for (const auto& r : rep.multiplicities) {
      out << r.n << sep << r.mult_pow2 << sep << r.ideal_pow2 << sep << r.deficit_pow2 << sep
          << r.mult_third << sep << r.ideal_third << sep << r.deficit_third << sep
          << (r.fully_realized ? "true" : "false") << '\n';
    }
  }
  {
    auto out = open_output(dir / "summary.csv", header);
    out << "item" << sep << "pass\n";
    auto b = [](bool v) { return v ? "true" : "false"; };
    out << "a" << sep << b(rep.metric.pass) << '\n';
    out << "b" << sep << b(rep.summability.pass) << '\n';
    out << "c" << sep << b(rep.sweep.pass) << '\n';
    for (const auto& d : rep.dixmier) out << "d:" << d.function << sep << b(d.pass) << '\n';
    out << "e" << sep << b(std::all_of(rep.dixmier.begin(), rep.dixmier.end(),
                                       [](const DixmierItem& d) { return d.pass; }))
        << '\n';
  }
}

}  // namespace spectriple::interval
