#include "spectriple/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spectriple/errors.hpp"
#include "spectriple/fit.hpp"

namespace spectriple {
namespace {

// Covering slack for radii that are not exactly representable.
constexpr double kRadiusSlack = 1e-12;

double slack(double r) { return r * (1.0 + kRadiusSlack); }

std::vector<std::size_t> cantor_centers(const FiniteMetricSpace& space, double radius) {
  const int level = space.structure_level();
  // A level-k construction interval holds 2^{level-k} consecutive points
  // spanning 3^{-k} - 3^{-level}; its left endpoint covers it once that span
  // is within the radius.
  int k = 0;
  while (k < level && (std::pow(3.0, -k) - std::pow(3.0, -level)) > slack(radius)) ++k;
  const std::size_t stride = std::size_t{1} << (level - k);
  std::vector<std::size_t> centers;
  for (std::size_t i = 0; i < space.size(); i += stride) centers.push_back(i);
  return centers;
}

std::vector<std::size_t> dyadic_centers(const FiniteMetricSpace& space, int n) {
  std::vector<std::size_t> centers;
  for (const Dyadic& x : dyadic_interval_centers(n)) {
    const auto idx = space.is_dyadic() ? space.find_dyadic(x) : std::nullopt;
    if (!idx) {
      throw Error(ErrorKind::invalid_argument,
                  "dyadic covering needs center " + x.to_string() + " (level " +
                      std::to_string(n) + ") in the space");
    }
    centers.push_back(*idx);
  }
  return centers;
}

}  // namespace

double CoveringChain::radius(int n) const { return theta * std::pow(rho, n - 1); }

const std::vector<std::size_t>& CoveringChain::centers(int n) const {
  if (n < 1 || n > depth()) {
    throw Error(ErrorKind::insufficient_chain,
                "covering chain has no level " + std::to_string(n));
  }
  return levels[static_cast<std::size_t>(n - 1)];
}

std::vector<Dyadic> dyadic_interval_centers(int n) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "level must be >= 1");
  if (n <= 2) return {Dyadic(1, 1)};
  if (n > 60) throw Error(ErrorKind::size_limit, "dyadic level too deep");
  const std::int64_t count = std::int64_t{1} << (n - 2);
  std::vector<Dyadic> xs;
  xs.reserve(static_cast<std::size_t>(count));
  for (std::int64_t j = 0; j < count; ++j) xs.emplace_back(2 * j + 1, n - 1);
  return xs;
}

std::vector<std::size_t> greedy_net(const FiniteMetricSpace& space, double radius) {
  const std::size_t n = space.size();
  if (n == 0) throw Error(ErrorKind::invalid_argument, "cannot cover an empty space");
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> centers;
  std::size_t pick = 0;
  while (true) {
    const std::size_t center = pick;
    centers.push_back(center);
    double farthest = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], space.distance(i, center));
      if (nearest[i] > farthest) {
        farthest = nearest[i];
        pick = i;
      }
    }
    if (farthest <= slack(radius)) break;
  }
  return centers;
}

double covering_radius(const FiniteMetricSpace& space, const std::vector<std::size_t>& centers) {
  if (centers.empty()) return std::numeric_limits<double>::infinity();
  if (space.dimension() == 1) {
    std::vector<double> cs;
    cs.reserve(centers.size());
    for (auto c : centers) cs.push_back(space.coordinates(c)[0]);
    std::sort(cs.begin(), cs.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
      const double x = space.coordinates(i)[0];
      const auto it = std::lower_bound(cs.begin(), cs.end(), x);
      double best = std::numeric_limits<double>::infinity();
      if (it != cs.end()) best = *it - x;
      if (it != cs.begin()) best = std::min(best, x - *std::prev(it));
      worst = std::max(worst, best);
    }
    return worst;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (auto c : centers) best = std::min(best, space.distance(i, c));
    worst = std::max(worst, best);
  }
  return worst;
}

CoveringChain covering_chain(const FiniteMetricSpace& space, double theta, double rho,
                             int n_max, CoveringStrategy strategy) {
  if (space.empty()) throw Error(ErrorKind::invalid_argument, "cannot cover an empty space");
  if (!(theta > 0.0)) throw Error(ErrorKind::invalid_argument, "theta must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::invalid_argument, "rho must be in (0,1)");
  if (n_max < 1) throw Error(ErrorKind::invalid_argument, "n_max must be >= 1");
  if (strategy == CoveringStrategy::dyadic_interval && (theta != 1.0 || rho != 0.5)) {
    throw Error(ErrorKind::invalid_argument, "dyadic covering requires theta = 1 and rho = 1/2");
  }
  if (strategy == CoveringStrategy::cantor && space.structure() != SpaceStructure::cantor) {
    throw Error(ErrorKind::invalid_argument, "cantor covering requires a Cantor space");
  }

  // Below the smallest gap of a line space only the full point set covers.
  double min_gap = std::numeric_limits<double>::infinity();
  if (strategy == CoveringStrategy::dyadic_interval && space.dimension() == 1) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < space.size(); ++i) xs.push_back(space.coordinates(i)[0]);
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 1; i < xs.size(); ++i) min_gap = std::min(min_gap, xs[i] - xs[i - 1]);
  }
  std::vector<std::size_t> all(space.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  CoveringChain chain;
  chain.theta = theta;
  chain.rho = rho;
  chain.levels.resize(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    const double r = chain.radius(n);
    auto& level = chain.levels[static_cast<std::size_t>(n - 1)];
    switch (strategy) {
      case CoveringStrategy::greedy: level = greedy_net(space, r); break;
      case CoveringStrategy::dyadic_interval:
        level = slack(r) < min_gap ? all : dyadic_centers(space, n);
        break;
      case CoveringStrategy::cantor: level = cantor_centers(space, r); break;
    }
    if (strategy != CoveringStrategy::greedy && covering_radius(space, level) > slack(r)) {
      throw Error(ErrorKind::invalid_argument,
                  "closed-form centers do not cover the space at level " + std::to_string(n));
    }
  }
  return chain;
}

MinkowskiEstimate minkowski_estimate(const CoveringChain& chain) {
  const int levels = chain.depth();
  if (levels < 3) {
    throw Error(ErrorKind::insufficient_data, "dimension estimate needs >= 3 levels, got " +
                                                  std::to_string(levels));
  }
  MinkowskiEstimate est;
  for (int n = 1; n <= levels; ++n) {
    const double scale = -std::log(chain.radius(n));
    const double count = std::log(static_cast<double>(chain.centers(n).size()));
    est.per_level.push_back(scale > 0.0 ? count / scale : std::numeric_limits<double>::quiet_NaN());
  }
  est.fit_last_level = levels;
  est.fit_first_level = levels - (levels + 1) / 2 + 1;
  std::vector<double> xs, ys;
  for (int n = est.fit_first_level; n <= levels; ++n) {
    xs.push_back(-std::log(chain.radius(n)));
    ys.push_back(std::log(static_cast<double>(chain.centers(n).size())));
  }
  est.slope = least_squares(xs, ys).slope;
  return est;
}

}  // namespace spectriple
