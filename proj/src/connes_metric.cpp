#include "spectriple/connes_metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>

#include "spectriple/errors.hpp"
#include "spectriple/io.hpp"
#include "spectriple/parallel.hpp"

namespace spectriple {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kOracleLimit = 64;

struct Edge {
  std::size_t to;
  double w;
};

struct SupportGraph {
  std::vector<std::size_t> support;
  std::vector<std::vector<Edge>> adj;
};

SupportGraph support_graph(const SpectralTripleSum& triple) {
  SupportGraph g;
  g.support = triple.support();
  std::vector<std::size_t> pos(triple.space().size(), 0);
  for (std::size_t i = 0; i < g.support.size(); ++i) pos[g.support[i]] = i;
  g.adj.resize(g.support.size());
  for (const auto& m : triple.modules()) {
    const std::size_t a = pos[m.x.point];
    const std::size_t b = pos[m.y.point];
    g.adj[a].push_back({b, m.d.value});
    g.adj[b].push_back({a, m.d.value});
  }
  return g;
}

std::vector<double> dijkstra(const SupportGraph& g, std::size_t source) {
  std::vector<double> dist(g.adj.size(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    if (du > dist[u]) continue;
    for (const Edge& e : g.adj[u]) {
      const double nd = du + e.w;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        heap.emplace(nd, e.to);
      }
    }
  }
  return dist;
}

}  // namespace

std::string Length::to_string() const { return finite_ ? format_real(value_) : "inf"; }

std::optional<std::size_t> InducedMetricReport::position(std::size_t point) const {
  const auto it = std::lower_bound(support.begin(), support.end(), point);
  if (it == support.end() || *it != point) return std::nullopt;
  return static_cast<std::size_t>(it - support.begin());
}

Length InducedMetricReport::between(std::size_t s, std::size_t t) const {
  if (s == t) return Length::finite(0.0);
  const auto a = position(s), b = position(t);
  if (!a || !b) return Length::infinite();
  return at(*a, *b);
}

InducedMetricReport induced_metric(const SpectralTripleSum& triple) {
  const SupportGraph g = support_graph(triple);
  const std::size_t k = g.support.size();
  InducedMetricReport report;
  report.support = g.support;
  report.d_induced.assign(k * k, Length::infinite());
  parallel_for(k, [&](std::size_t s) {
    const auto dist = dijkstra(g, s);
    for (std::size_t t = 0; t < k; ++t) {
      if (std::isfinite(dist[t])) report.d_induced[s * k + t] = Length::finite(dist[t]);
    }
  });
  bool any = false;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const Length& li = report.at(a, b);
      const double ratio =
          li.is_finite() ? li.value() / triple.space().distance(g.support[a], g.support[b]) : kInf;
      if (!any) {
        report.max_ratio = report.min_ratio = ratio;
        any = true;
      } else {
        report.max_ratio = std::max(report.max_ratio, ratio);
        report.min_ratio = std::min(report.min_ratio, ratio);
      }
    }
  }
  return report;
}

Length lp_oracle(const SpectralTripleSum& triple, std::size_t s, std::size_t t) {
  const auto support = triple.support();
  if (support.size() > kOracleLimit) {
    throw Error(ErrorKind::oracle_size, "lp_oracle supports at most 64 support points, got " +
                                            std::to_string(support.size()));
  }
  auto on_support = [&](std::size_t p) {
    return std::binary_search(support.begin(), support.end(), p);
  };
  if (!on_support(s) || !on_support(t)) {
    throw Error(ErrorKind::invalid_argument, "lp_oracle endpoints must be support points");
  }
  if (s == t) return Length::finite(0.0);

  // Largest f with f(t) = 0 satisfying f(x) <= f(y) + d and f(y) <= f(x) + d
  // for every module: start from +inf and tighten until nothing moves.
  const std::size_t n = triple.space().size();
  std::vector<double> f(n, kInf);
  f[t] = 0.0;
  const auto& modules = triple.modules();
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& m : modules) {
      const std::size_t x = m.x.point, y = m.y.point;
      const double d = m.d.value;
      if (f[y] + d < f[x]) {
        f[x] = f[y] + d;
        changed = true;
      }
      if (f[x] + d < f[y]) {
        f[y] = f[x] + d;
        changed = true;
      }
    }
  }
  if (!std::isfinite(f[s])) return Length::infinite();  // f may jump by any constant across components

  // Certificate: f is feasible on every constraint it sees, and a chain of
  // tight constraints links s to t, so no feasible function does better.
  for (const auto& m : modules) {
    const double fx = f[m.x.point], fy = f[m.y.point];
    if (std::isfinite(fx) != std::isfinite(fy)) throw std::logic_error("lp_oracle: partial component");
    if (std::isfinite(fx) && std::fabs(fx - fy) > m.d.value * (1.0 + 1e-12)) {
      throw std::logic_error("lp_oracle: infeasible fixed point");
    }
  }
  std::size_t cur = s;
  for (std::size_t steps = 0; cur != t; ++steps) {
    if (steps > support.size()) throw std::logic_error("lp_oracle: no tight path");
    std::size_t next = cur;
    for (const auto& m : modules) {
      const std::size_t x = m.x.point, y = m.y.point;
      if (x == cur && f[x] == f[y] + m.d.value && f[y] < f[cur]) next = y;
      if (y == cur && f[y] == f[x] + m.d.value && f[x] < f[cur]) next = x;
      if (next != cur) break;
    }
    if (next == cur) throw std::logic_error("lp_oracle: no tight path");
    cur = next;
  }
  return Length::finite(f[s]);
}

InducedMetricReport metric_report(const SpectralTripleSum& triple, MetricCheck check) {
  if (triple.empty()) return {};
  InducedMetricReport report = induced_metric(triple);
  const auto& space = triple.space();
  const double tol = 1e-9 * space.diameter();
  const std::size_t k = report.size();
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const std::size_t s = report.support[a], t = report.support[b];
      const double d = space.distance(s, t);
      const Length& li = report.at(a, b);
      bool bad = !li.is_finite();
      if (!bad) {
        const double v = li.value();
        if (check.mode == MetricCheck::Mode::exact) {
          bad = std::fabs(v - d) > tol;
        } else {
          bad = v < d - tol || v > (1.0 + check.delta) * d + tol;
        }
      }
      if (bad) report.violations.push_back({s, t, d, li});
    }
  }
  return report;
}

void write_metric_csv(const InducedMetricReport& report, const FiniteMetricSpace& space,
                      std::ostream& out, char sep) {
  out << "s-id" << sep << "t-id" << sep << "d" << sep << "d_induced" << sep << "ratio\n";
  const std::size_t k = report.size();
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const std::size_t s = report.support[a], t = report.support[b];
      const double d = space.distance(s, t);
      const Length& li = report.at(a, b);
      out << space.id(s) << sep << space.id(t) << sep << format_real(d) << sep << li.to_string()
          << sep << (li.is_finite() ? format_real(li.value() / d) : "inf") << '\n';
    }
  }
  out << "# support_points" << sep << k << '\n';
  out << "# min_ratio" << sep << format_real(report.min_ratio) << '\n';
  out << "# max_ratio" << sep << format_real(report.max_ratio) << '\n';
  out << "# violations" << sep << report.violations.size() << '\n';
}

}  // namespace spectriple
