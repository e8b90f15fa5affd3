#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "spectriple/covering.hpp"
#include "spectriple/errors.hpp"
#include "spectriple/spectrum.hpp"

using namespace spectriple;

namespace {

SpectralTripleSum grid_triple(int m_log2, int n_max, double delta = 9.0) {
  const auto s = build_interval_grid((std::int64_t{1} << m_log2) + 1);
  const auto chain = covering_chain(s, 1.0, 0.5, n_max + 1, CoveringStrategy::dyadic_interval);
  return build_st_delta(s, chain, delta, 1, n_max);
}

// Eigenvalue magnitudes straight from the modules, two per module.
std::vector<double> magnitudes(const SpectralTripleSum& t) {
  std::vector<double> out;
  for (const auto& m : t.modules()) {
    out.push_back(m.magnitude().value());
    out.push_back(m.magnitude().value());
  }
  return out;
}

}  // namespace

TEST_CASE("one module has the eigenvalues plus and minus 1/d") {
  const auto s = FiniteMetricSpace::from_dyadic_points({Dyadic(0, 0), Dyadic(1, 0)}, "pair");
  const SpectralTripleSum t(s, {two_point_module(0, 1, s.exact_distance(0, 1))}, TripleKind::st_delta);
  const auto spec = spectrum(t);
  REQUIRE(spec.entries().size() == 1);
  CHECK(spec.entries()[0].value.value() == 1.0);
  CHECK(spec.entries()[0].multiplicity == 2);
  CHECK(spec.total_multiplicity() == 2);
  CHECK(zeta(spec, 1.0, ZetaForm::abs) == 2.0);
  CHECK(zeta(spec, 2.0, ZetaForm::resolvent) == doctest::Approx(1.0));
  CHECK(counting(spec, 1.0) == 2);
  CHECK(counting(spec, 1.0, CountMode::blocks) == 1);
  CHECK(counting(spec, 0.999) == 0);
}

TEST_CASE("histogram merges equal eigenvalues") {
  const auto t = grid_triple(6, 6);
  const auto spec = spectrum(t);
  CHECK(spec.total_multiplicity() == 2 * static_cast<std::int64_t>(t.modules().size()));
  for (std::size_t i = 1; i < spec.entries().size(); ++i) {
    CHECK(spec.entries()[i - 1].value < spec.entries()[i].value);
    CHECK_FALSE(same_eigenvalue(spec.entries()[i - 1].value, spec.entries()[i].value));
  }
  // Dyadic distances make every entry an exact reciprocal.
  for (const auto& e : spec.entries()) CHECK(e.value.exact_reciprocal());

  std::vector<SpectrumEntry> raw;
  raw.push_back({Magnitude::reciprocal(Distance{0.3, std::nullopt}), 2});
  raw.push_back({Magnitude::reciprocal(Distance{0.1 + 0.2, std::nullopt}), 4});
  raw.push_back({Magnitude::reciprocal(Distance::of(Dyadic(1, 1))), 2});
  const auto merged = SpectrumHistogram::from_entries(raw);
  REQUIRE(merged.entries().size() == 2);
  CHECK(merged.entries()[0].multiplicity == 2);
  CHECK(merged.entries()[1].multiplicity == 6);
}

TEST_CASE("counting function matches a direct scan") {
  const auto t = grid_triple(7, 7);
  const auto spec = spectrum(t);
  const auto mags = magnitudes(t);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 9.0);
  for (int i = 0; i < 300; ++i) {
    const double lambda = std::exp2(u(rng));
    std::int64_t n = 0;
    for (double v : mags) n += v <= lambda;
    CHECK(counting(spec, lambda) == n);
    CHECK(counting(spec, lambda, CountMode::blocks) == n / 2);
  }
  for (const auto& e : spec.entries()) {
    const double v = e.value.value();
    std::int64_t n = 0;
    for (double w : mags) n += w <= v;
    CHECK(counting(spec, v) == n);
  }
}

TEST_CASE("counting sweep hits the step extremes") {
  const auto t = grid_triple(7, 7);
  const auto spec = spectrum(t);
  const auto sweep = counting_sweep(spec, 4.0, 256.0, 8);
  CHECK(sweep.grid.front() == 4.0);
  CHECK(sweep.grid.back() == 256.0);
  for (std::size_t i = 1; i < sweep.grid.size(); ++i) CHECK(sweep.grid[i - 1] < sweep.grid[i]);
  for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
    CHECK(sweep.counts[i] == counting(spec, sweep.grid[i]));
    CHECK(sweep.ratios[i] == static_cast<double>(sweep.counts[i]) / sweep.grid[i]);
  }
  // The true supremum of N/Lambda on the window is attained at an eigenvalue
  // and the infimum just below one, or at an endpoint.
  double sup = 0.0, inf = 1e300;
  for (double v : {4.0, 256.0}) {
    sup = std::max(sup, counting(spec, v) / v);
    inf = std::min(inf, counting(spec, v) / v);
  }
  for (const auto& e : spec.entries()) {
    const double v = e.value.value();
    if (v < 4.0 || v > 256.0) continue;
    sup = std::max(sup, counting(spec, v) / v);
    const double b = std::nextafter(v, 0.0);
    if (b >= 4.0) inf = std::min(inf, counting(spec, b) / b);
  }
  CHECK(sweep.max_ratio == sup);
  CHECK(sweep.min_ratio == inf);

  const auto [lo, hi] = ratio_extremes(sweep, 8.0, 64.0);
  CHECK(lo >= sweep.min_ratio);
  CHECK(hi <= sweep.max_ratio);

  const auto below = counting_sweep(spec, 0.01, 0.5, 8);
  for (double r : below.ratios) CHECK(r == 0.0);
  CHECK_THROWS_AS(counting_sweep(spec, 4.0, 256.0, 7), Error);
  CHECK_THROWS_AS(counting_sweep(spec, 4.0, 2.0, 16), Error);
  CHECK_THROWS_AS(counting_sweep(spec, 0.0, 2.0, 16), Error);
}

TEST_CASE("zeta traces") {
  const auto t = grid_triple(7, 7);
  const auto spec = spectrum(t);
  double direct = 0.0;
  for (double v : magnitudes(t)) direct += std::pow(v, -1.5);
  CHECK(zeta(spec, 1.5, ZetaForm::abs) == doctest::Approx(direct).epsilon(1e-13));

  double prev = zeta(spec, 0.5, ZetaForm::abs);
  for (double s : {1.0, 1.5, 2.0, 3.0}) {
    const double z = zeta(spec, s, ZetaForm::abs);
    CHECK(z < prev);  // every eigenvalue exceeds 1 on this grid
    CHECK(zeta(spec, s, ZetaForm::resolvent) <= z);
    prev = z;
  }
  CHECK_THROWS_AS(zeta(spec, 0.0, ZetaForm::abs), Error);
  CHECK_THROWS_AS(zeta(spec, -1.0, ZetaForm::resolvent), Error);
}

TEST_CASE("ST(d) resolvent traces converge for every positive s") {
  const auto s = build_random_cloud(20, 2, 9);
  const auto spec = spectrum(build_st_d(s));
  for (double p : {0.5, 1.0, 2.0}) {
    double bound = 0.0;
    for (int n = 1; n <= 190; ++n) bound += 2.0 * std::exp2(-n * p);
    const double z = zeta(spec, p, ZetaForm::resolvent);
    CHECK(z > 0.0);
    CHECK(z <= bound);
  }
}

TEST_CASE("summability probe") {
  const auto t = grid_triple(10, 9);
  const std::vector<double> s_values = {1.0, 2.0};
  const auto probes = summability_probe(t, s_values, std::pair{4, 9});
  REQUIRE(probes.size() == 2);
  for (const auto& p : probes) {
    CHECK(p.levels.size() == p.level_sums.size());
    for (std::size_t i = 0; i < p.levels.size(); ++i) {
      double direct = 0.0;
      for (const auto& m : t.modules())
        if (m.level == p.levels[i]) direct += 2.0 * std::pow(m.magnitude().value(), -p.s);
      CHECK(p.level_sums[i] == doctest::Approx(direct).epsilon(1e-12));
    }
  }
  // Level n holds about 2^n modules of eigenvalue about 2^n.
  CHECK(probes[0].tail_ratio == doctest::Approx(1.0).epsilon(0.05));
  CHECK(probes[1].tail_ratio == doctest::Approx(0.5).epsilon(0.05));

  try {
    summability_probe(t, s_values, std::pair{8, 9});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_data);
  }
  const std::vector<double> bad = {0.0};
  CHECK_THROWS_AS(summability_probe(t, bad), Error);
}

TEST_CASE("weighted traces") {
  const auto t = grid_triple(7, 7);
  const std::size_t n = t.space().size();
  std::vector<double> one(n, 1.0), x(n), mix(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = t.space().coordinates(i)[0];
    mix[i] = 2.0 * one[i] - 3.0 * x[i];
  }
  for (double lambda : {8.0, 64.0, 1000.0}) {
    const double a = weighted_trace(t, one, lambda), b = weighted_trace(t, x, lambda);
    CHECK(weighted_trace(t, mix, lambda) == doctest::Approx(2.0 * a - 3.0 * b));
    CHECK(b <= a);
    double direct = 0.0;
    for (const auto& m : t.modules())
      if (m.magnitude().value() <= lambda) direct += 2.0 / m.magnitude().value();
    CHECK(a == doctest::Approx(direct));
    CHECK(dixmier_estimate(t, one, lambda) == doctest::Approx(a / std::log(lambda)));
  }
  CHECK(weighted_trace(t, one, 8.0) <= weighted_trace(t, one, 64.0));
  CHECK_THROWS_AS(dixmier_estimate(t, one, 1.0), Error);
  const std::vector<double> short_f(3, 1.0);
  CHECK_THROWS_AS(weighted_trace(t, short_f, 8.0), Error);
}

TEST_CASE("spectrum and sweep CSV layout") {
  const auto s = FiniteMetricSpace::from_dyadic_points({Dyadic(0, 0), Dyadic(1, 1), Dyadic(1, 0)}, "line");
  const SpectralTripleSum t(s,
                            {two_point_module(0, 1, s.exact_distance(0, 1)),
                             two_point_module(1, 2, s.exact_distance(1, 2)),
                             two_point_module(0, 2, s.exact_distance(0, 2))},
                            TripleKind::st_delta);
  std::ostringstream out;
  write_spectrum_csv(spectrum(t), out);
  CHECK(out.str() ==
        "eigenvalue,multiplicity,abs_value,d\n"
        "-2,2,2,1/2^1\n"
        "-1,1,1,1/2^0\n"
        "1,1,1,1/2^0\n"
        "2,2,2,1/2^1\n");

  std::ostringstream sw;
  write_sweep_csv(counting_sweep(spectrum(t), 1.0, 2.0, 8), sw, '\t');
  std::istringstream in(sw.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "lambda\tN\tN_over_lambda");
  std::getline(in, line);
  CHECK(line == "1\t2\t2");
}
