#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "spectriple/connes_metric.hpp"
#include "spectriple/covering.hpp"
#include "spectriple/errors.hpp"

using namespace spectriple;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SpectralTripleSum with_pairs(const FiniteMetricSpace& s,
                             const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<TwoPointModule> modules;
  for (auto [x, y] : pairs) modules.push_back(two_point_module(x, y, s.exact_distance(x, y)));
  return SpectralTripleSum(s, std::move(modules), TripleKind::st_delta);
}

// All-pairs shortest paths over the whole space, restricted to module edges.
std::vector<double> floyd_warshall(const SpectralTripleSum& t) {
  const std::size_t n = t.space().size();
  std::vector<double> d(n * n, kInf);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
  for (const auto& m : t.modules()) {
    const double w = m.d.value;
    auto& a = d[m.x.point * n + m.y.point];
    auto& b = d[m.y.point * n + m.x.point];
    a = std::min(a, w);
    b = std::min(b, w);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
  return d;
}

double as_double(const Length& l) { return l.is_finite() ? l.value() : kInf; }

}  // namespace

TEST_CASE("a single module recovers its distance") {
  const auto s = FiniteMetricSpace::from_dyadic_points({Dyadic(0, 0), Dyadic(3, 2), Dyadic(1, 0)}, "line");
  const auto t = with_pairs(s, {{0, 1}});
  const auto r = induced_metric(t);
  REQUIRE(r.size() == 2);
  CHECK(r.at(0, 0) == Length::finite(0.0));
  CHECK(r.at(0, 1) == Length::finite(0.75));
  CHECK(r.at(1, 0) == Length::finite(0.75));
  CHECK_FALSE(r.position(2));
  CHECK(r.between(2, 2) == Length::finite(0.0));
  CHECK(r.between(1, 0) == Length::finite(0.75));
  CHECK(r.between(0, 2) == Length::infinite());
  CHECK(r.between(2, 1) == Length::infinite());
  CHECK(lp_oracle(t, 0, 1) == Length::finite(0.75));
  CHECK(lp_oracle(t, 1, 1) == Length::finite(0.0));
  CHECK_THROWS_AS(lp_oracle(t, 0, 2), Error);
}

TEST_CASE("disconnected modules give infinite distance") {
  const auto s = build_interval_grid(5);
  const auto t = with_pairs(s, {{0, 1}, {3, 4}});
  const auto r = induced_metric(t);
  CHECK_FALSE(r.at(*r.position(0), *r.position(4)).is_finite());
  CHECK(r.at(*r.position(0), *r.position(4)).to_string() == "inf");
  CHECK_FALSE(lp_oracle(t, 1, 3).is_finite());
  CHECK(std::isinf(r.max_ratio));
  CHECK(r.min_ratio == 1.0);
}

TEST_CASE("ST(d) recovers the metric exactly") {
  const auto s = build_random_cloud(50, 2, 1);
  const auto r = metric_report(build_st_d(s), MetricCheck::exact());
  CHECK(r.size() == 50);
  CHECK(r.violations.empty());
  for (std::size_t a = 0; a < 50; ++a)
    for (std::size_t b = 0; b < 50; ++b) CHECK(r.at(a, b).value() == doctest::Approx(s.distance(a, b)).epsilon(1e-12));
  CHECK(r.max_ratio == doctest::Approx(1.0));
  CHECK(r.min_ratio == doctest::Approx(1.0));
}

TEST_CASE("induced metric agrees with shortest paths and the Lipschitz oracle") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    const auto s = build_random_cloud(n, 1 + rng() % 3, rng());
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng() % 3 == 0) pairs.emplace_back(i, j);
    if (pairs.empty()) pairs.emplace_back(0, 1);
    const auto t = with_pairs(s, pairs);
    const auto fw = floyd_warshall(t);
    const auto r = induced_metric(t);
    for (auto a : r.support) {
      for (auto b : r.support) {
        const double expect = fw[a * n + b];
        const double got = as_double(r.at(*r.position(a), *r.position(b)));
        const double lp = as_double(lp_oracle(t, a, b));
        if (std::isinf(expect)) {
          CHECK(std::isinf(got));
          CHECK(std::isinf(lp));
        } else {
          CHECK(std::abs(got - expect) <= 1e-12);
          CHECK(std::abs(lp - expect) <= 1e-12);
          CHECK(got >= s.distance(a, b) * (1 - 1e-12));
        }
      }
    }
  }
}

TEST_CASE("the Lipschitz oracle is limited to 64 support points") {
  const auto t = build_st_d(build_random_cloud(65, 2, 4));
  try {
    lp_oracle(t, 0, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::oracle_size);
  }
}

TEST_CASE("adding modules never increases the induced metric") {
  const auto s = build_random_cloud(10, 2, 8);
  std::vector<std::pair<std::size_t, std::size_t>> path;
  for (std::size_t i = 0; i + 1 < 10; ++i) path.emplace_back(i, i + 1);
  const auto base = induced_metric(with_pairs(s, path));
  auto more = path;
  more.emplace_back(0, 9);
  more.emplace_back(2, 7);
  const auto richer = induced_metric(with_pairs(s, more));
  for (std::size_t a = 0; a < 10; ++a)
    for (std::size_t b = 0; b < 10; ++b) CHECK(richer.at(a, b).value() <= base.at(a, b).value());
  CHECK(richer.at(0, 9).value() == doctest::Approx(s.distance(0, 9)));
}

TEST_CASE("induced metric scales with the space") {
  const auto s = build_random_cloud(9, 2, 12);
  std::vector<double> m(81), m3(81);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) {
      m[i * 9 + j] = s.distance(i, j);
      m3[i * 9 + j] = 3.0 * s.distance(i, j);
    }
  const auto a = FiniteMetricSpace::from_matrix(m, 9, "a");
  const auto b = FiniteMetricSpace::from_matrix(m3, 9, "b");
  const std::vector<std::pair<std::size_t, std::size_t>> pairs = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5},
                                                                  {5, 6}, {6, 7}, {7, 8}, {0, 8}};
  const auto ra = induced_metric(with_pairs(a, pairs));
  const auto rb = induced_metric(with_pairs(b, pairs));
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) CHECK(rb.at(i, j).value() == doctest::Approx(3.0 * ra.at(i, j).value()));
  CHECK(rb.max_ratio == doctest::Approx(ra.max_ratio));
}

TEST_CASE("sandwich checks on the dyadic grid") {
  const auto s = build_interval_grid(65);
  const auto chain = covering_chain(s, 1.0, 0.5, 8, CoveringStrategy::dyadic_interval);
  const auto t = build_st_delta(s, chain, 9.0, 1, 7);
  const auto r = metric_report(t, MetricCheck::sandwich(9.0));
  CHECK(r.violations.empty());
  CHECK(r.min_ratio >= 1.0 - 1e-12);
  CHECK(r.max_ratio <= 10.0 + 1e-12);
  std::size_t stretched = 0;
  for (std::size_t a = 0; a < r.size(); ++a)
    for (std::size_t b = a + 1; b < r.size(); ++b)
      if (r.at(a, b).value() > s.distance(r.support[a], r.support[b]) + 1e-9) ++stretched;
  CHECK(metric_report(t, MetricCheck::exact()).violations.size() == stretched);
}

TEST_CASE("an empty triple gives an empty report") {
  const auto s = build_interval_grid(3);
  const SpectralTripleSum t(s, {}, TripleKind::st_delta);
  const auto r = metric_report(t, MetricCheck::exact());
  CHECK(r.size() == 0);
  CHECK(r.violations.empty());
  CHECK(r.max_ratio == 1.0);
  CHECK(r.min_ratio == 1.0);
}

TEST_CASE("metric CSV layout") {
  const auto s = FiniteMetricSpace::from_matrix({0, 1, 2, 1, 0, 1, 2, 1, 0}, 3, "m", {"a", "b", "c"});
  const auto t = with_pairs(s, {{0, 1}, {1, 2}});
  std::ostringstream out;
  write_metric_csv(metric_report(t, MetricCheck::exact()), s, out);
  CHECK(out.str() ==
        "s-id,t-id,d,d_induced,ratio\n"
        "a,b,1,1,1\n"
        "a,c,2,2,1\n"
        "b,c,1,1,1\n"
        "# support_points,3\n"
        "# min_ratio,1\n"
        "# max_ratio,1\n"
        "# violations,0\n");
  std::ostringstream tsv;
  write_metric_csv(metric_report(t, MetricCheck::exact()), s, tsv, '\t');
  CHECK(tsv.str().rfind("s-id\tt-id\td\td_induced\tratio\n", 0) == 0);
}
