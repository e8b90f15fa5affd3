#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

#include "spectriple/covering.hpp"
#include "spectriple/errors.hpp"
#include "spectriple/triple.hpp"

using namespace spectriple;

namespace {

struct OracleParams {
  int k0 = 0;
  int l = 0;
};

// Direct evaluation of the defining inequalities by linear search.
OracleParams oracle_params(double theta, double rho, double delta, double diam) {
  OracleParams p;
  p.k0 = -200;
  while (!(theta * std::pow(rho, p.k0 + 1) < diam && diam <= theta * std::pow(rho, p.k0))) ++p.k0;
  p.l = std::max(0, -p.k0);
  while (!(4.0 * std::pow(rho, p.l) / (1.0 - rho) < delta)) ++p.l;
  return p;
}

using PairKey = std::tuple<int, std::size_t, std::size_t, int>;  // level, x, y, y-level

// Every candidate pair rescanned against the bounds in floating point.
std::vector<PairKey> rescan(const FiniteMetricSpace& s, const CoveringChain& chain, double delta,
                            int n_min, int n_max) {
  const auto p = oracle_params(chain.theta, chain.rho, delta, s.diameter());
  std::vector<PairKey> out;
  for (int n = n_min; n <= n_max; ++n) {
    const double same = (2.0 + std::pow(chain.rho, -(p.l + 1))) * chain.theta *
                        std::pow(chain.rho, n - 1);
    const double next = (1.0 + chain.rho) * chain.theta * std::pow(chain.rho, n - 1);
    const auto& tn = chain.centers(n);
    const auto& tn1 = chain.centers(n + 1);
    for (std::size_t a = 0; a < tn.size(); ++a) {
      for (std::size_t b = a + 1; b < tn.size(); ++b) {
        if (tn[a] != tn[b] && s.distance(tn[a], tn[b]) <= same * (1 + 1e-12)) {
          out.emplace_back(n, std::min(tn[a], tn[b]), std::max(tn[a], tn[b]), n);
        }
      }
      for (auto y : tn1) {
        if (tn[a] != y && s.distance(tn[a], y) <= next * (1 + 1e-12)) out.emplace_back(n, tn[a], y, n + 1);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PairKey> keys(const SpectralTripleSum& t) {
  std::vector<PairKey> out;
  for (const auto& m : t.modules()) {
    if (m.y.level == m.level) {
      out.emplace_back(m.level, std::min(m.x.point, m.y.point), std::max(m.x.point, m.y.point), m.level);
    } else {
      out.emplace_back(m.level, m.x.point, m.y.point, m.y.level);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("two-point modules") {
  const auto m = two_point_module(0, 1, Distance::of(Dyadic(1, 2)));
  CHECK(m.diag() == 0.0);
  CHECK(m.magnitude().value() == 4.0);
  REQUIRE(m.magnitude().exact_reciprocal());
  CHECK(*m.magnitude().exact_reciprocal() == Dyadic(1, 2));

  const auto odd = two_point_module(2, 5, Distance::of(0.3));
  CHECK(odd.magnitude().value() == doctest::Approx(1.0 / 0.3).epsilon(1e-15));

  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::invalid_argument;
  };
  CHECK(kind_of([] { two_point_module(3, 3, Distance::of(1.0)); }) == ErrorKind::degenerate_pair);
  CHECK(kind_of([] { two_point_module(0, 1, Distance::of(0.0)); }) == ErrorKind::degenerate_pair);
  CHECK(kind_of([] { two_point_module(0, 1, Distance::of(-1.0)); }) == ErrorKind::degenerate_pair);
}

TEST_CASE("ST(d) modules carry growing diagonal shifts") {
  SUBCASE("two points at distance 1") {
    const auto s = FiniteMetricSpace::from_matrix({0, 1, 1, 0}, 2, "pair");
    const auto t = build_st_d(s);
    REQUIRE(t.modules().size() == 1);
    CHECK(t.modules()[0].diag() == 2.0);
    CHECK(t.modules()[0].magnitude().value() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
  }
  SUBCASE("two points at distance 1/4") {
    const auto s = FiniteMetricSpace::from_dyadic_points({Dyadic(0, 0), Dyadic(1, 2)}, "pair");
    const auto t = build_st_d(s);
    CHECK(t.modules()[0].magnitude().value() == doctest::Approx(std::sqrt(20.0)).epsilon(1e-15));
  }
  SUBCASE("ordering, shifts and magnitudes on a cloud") {
    const auto s = build_random_cloud(12, 3, 7);
    const auto t = build_st_d(s);
    REQUIRE(t.modules().size() == 66);
    int n = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        const auto& m = t.modules()[static_cast<std::size_t>(n)];
        ++n;
        CHECK(m.x.point == i);
        CHECK(m.y.point == j);
        CHECK(m.level == n);
        REQUIRE(m.diag_log2);
        CHECK(*m.diag_log2 == n);
        CHECK(m.magnitude().exceeds_power_of_two(n));
        const double expect = std::sqrt(std::ldexp(1.0, 2 * n) + 1.0 / (s.distance(i, j) * s.distance(i, j)));
        CHECK(m.magnitude().value() == doctest::Approx(expect).epsilon(1e-14));
      }
    }
  }
  SUBCASE("large spaces stay finite in log2") {
    const auto t = build_st_d(build_interval_grid(60));
    const auto& last = t.modules().back();
    CHECK(*last.diag_log2 == 1770);
    CHECK(std::isinf(last.magnitude().value()));
    CHECK(last.magnitude().log2() == doctest::Approx(1770.0));
    CHECK(last.magnitude().exceeds_power_of_two(1770));
  }
  SUBCASE("fewer than two points") {
    const auto s = FiniteMetricSpace::from_matrix({0}, 1, "single");
    try {
      build_st_d(s);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::empty_triple);
    }
  }
}

TEST_CASE("interaction parameters") {
  auto check = [](double theta, double rho, double delta, double diam, int k0, int l) {
    const auto p = interaction_params(theta, rho, delta, diam);
    CHECK(p.k0 == k0);
    CHECK(p.l == l);
    const auto o = oracle_params(theta, rho, delta, diam);
    CHECK(p.k0 == o.k0);
    CHECK(p.l == o.l);
  };
  check(1.0, 0.5, 9.0, 1.0, 0, 0);
  check(1.0, 0.5, 0.1, 1.0, 0, 7);
  check(1.0, 0.5, 1.0, 1.0, 0, 4);
  check(0.5, 1.0 / 3.0, 9.0, build_cantor(6).diameter(), -1, 1);
  check(1.0, 0.5, 9.0, 0.25, 2, 0);
  check(1.0, 0.5, 9.0, 8.0, -3, 3);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 200; ++i) {
    const double theta = 4 * u(rng), rho = u(rng), delta = 20 * u(rng), diam = 10 * u(rng);
    const auto p = interaction_params(theta, rho, delta, diam);
    const auto o = oracle_params(theta, rho, delta, diam);
    CHECK(p.k0 == o.k0);
    CHECK(p.l == o.l);
  }
  CHECK_THROWS_AS(interaction_params(1, 1.5, 9, 1), Error);
  CHECK_THROWS_AS(interaction_params(1, 0.5, 0, 1), Error);
}

TEST_CASE("ST(delta) bounds are exact for dyadic ratios") {
  StDeltaParams p;
  p.l = 0;
  CHECK(p.same_level_bound(1).exact == Dyadic::integer(4));
  CHECK(p.same_level_bound(5).exact == Dyadic(1, 2));
  CHECK(p.next_level_bound(5).exact == Dyadic(3, 5));
  p.l = 4;
  CHECK(p.same_level_bound(1).exact == Dyadic::integer(34));
  p.rho = 1.0 / 3.0;
  p.theta = 0.5;
  p.l = 1;
  CHECK_FALSE(p.same_level_bound(2).exact);
  CHECK(p.same_level_bound(2).value == doctest::Approx(11.0 / 6.0));
  CHECK(p.next_level_bound(2).value == doctest::Approx(2.0 / 9.0));
}

TEST_CASE("ST(delta) modules match an exhaustive rescan") {
  SUBCASE("dyadic grid") {
    const auto s = build_interval_grid(257);
    const auto chain = covering_chain(s, 1.0, 0.5, 10, CoveringStrategy::dyadic_interval);
    for (double delta : {9.0, 1.0}) {
      const auto t = build_st_delta(s, chain, delta, 1, 9);
      CHECK(keys(t) == rescan(s, chain, delta, 1, 9));
      for (const auto& m : t.modules()) CHECK(m.d.exact);
    }
  }
  SUBCASE("cantor set") {
    const auto s = build_cantor(6);
    const auto chain = covering_chain(s, 0.5, 1.0 / 3.0, 7, CoveringStrategy::cantor);
    const auto t = build_st_delta(s, chain, 9.0, 1, 6);
    CHECK(t.params()->k0 == -1);
    CHECK(t.params()->l == 1);
    CHECK(keys(t) == rescan(s, chain, 9.0, 1, 6));
  }
  SUBCASE("random cloud with greedy nets") {
    const auto s = build_random_cloud(60, 2, 3);
    const auto chain = covering_chain(s, 1.0, 0.5, 8);
    const auto t = build_st_delta(s, chain, 4.0, 1, 7);
    CHECK(keys(t) == rescan(s, chain, 4.0, 1, 7));
    CHECK_FALSE(t.empty());
  }
}

TEST_CASE("ST(delta) eigenvalues respect the level bounds") {
  const auto s = build_random_cloud(80, 2, 5);
  const auto chain = covering_chain(s, 1.0, 0.5, 9);
  const auto t = build_st_delta(s, chain, 9.0, 1, 8);
  const auto& p = *t.params();
  for (const auto& m : t.modules()) {
    const double v = m.magnitude().value();
    if (m.y.level == m.level) {
      CHECK(v >= 1.0 / p.same_level_bound(m.level).value * (1 - 1e-12));
      // Centers of one greedy net are more than the radius apart.
      CHECK(v < 1.0 / chain.radius(m.level));
    } else {
      CHECK(v >= 1.0 / p.next_level_bound(m.level).value * (1 - 1e-12));
    }
  }
}

TEST_CASE("ST(delta) is invariant under relabeling") {
  const auto s = build_interval_grid(129);
  std::vector<std::size_t> perm(s.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(17));
  const auto q = s.permuted(perm);

  auto signature = [](const FiniteMetricSpace& sp) {
    const auto chain = covering_chain(sp, 1.0, 0.5, 9, CoveringStrategy::dyadic_interval);
    const auto t = build_st_delta(sp, chain, 9.0, 1, 8);
    std::vector<std::tuple<int, double, double, double>> sig;
    for (const auto& m : t.modules()) {
      const double a = sp.coordinates(m.x.point)[0], b = sp.coordinates(m.y.point)[0];
      sig.emplace_back(m.level, std::min(a, b), std::max(a, b), m.d.value);
    }
    std::sort(sig.begin(), sig.end());
    return sig;
  };
  CHECK(signature(s) == signature(q));
}

TEST_CASE("ST(delta) edge cases") {
  const auto s = build_interval_grid(17);
  const auto chain = covering_chain(s, 1.0, 0.5, 4, CoveringStrategy::dyadic_interval);
  CHECK(build_st_delta(s, chain, 9.0, 3, 2).empty());
  try {
    build_st_delta(s, chain, 9.0, 1, 4);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_chain);
  }
  CHECK_THROWS_AS(build_st_delta(s, chain, 0.0, 1, 2), Error);
  CHECK_THROWS_AS(build_st_delta(s, chain, 9.0, 0, 2), Error);
}

TEST_CASE("triple dump format") {
  const auto s = FiniteMetricSpace::from_matrix({0, 1, 1, 0}, 2, "pair", {"a", "b"});
  std::ostringstream out;
  dump_triple(build_st_d(s), out);
  CHECK(out.str() == "1\ta\tb\t1\t2^1\n");

  const auto g = build_interval_grid(5);
  const auto chain = covering_chain(g, 1.0, 0.5, 4, CoveringStrategy::dyadic_interval);
  std::ostringstream o2;
  dump_triple(build_st_delta(g, chain, 9.0, 3, 3), o2);
  std::istringstream in(o2.str());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), '\t') == 4);
    CHECK(line.rfind("3\t", 0) == 0);
    CHECK(line.substr(line.size() - 2) == "\t0");
  }
  CHECK(rows > 0);
}
