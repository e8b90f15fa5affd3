#pragma once

#include <cstddef>
#include <vector>

#include "spectriple/dyadic.hpp"
#include "spectriple/metric_space.hpp"

namespace spectriple {

enum class CoveringStrategy {
  greedy,           // farthest-point net, works on any space
  dyadic_interval,  // closed-form centers (2j+1)2^{1-n} on [0,1]; theta=1, rho=1/2;
                    // every point once the radius drops below the point spacing
  cantor,           // left endpoints of construction intervals of a Cantor space
};

// Centers T_n of closed-ball covers at radii theta * rho^(n-1), n = 1..depth().
struct CoveringChain {
  double theta = 1.0;
  double rho = 0.5;
  std::vector<std::vector<std::size_t>> levels;  // levels[n-1] holds T_n

  int depth() const noexcept { return static_cast<int>(levels.size()); }
  double radius(int n) const;
  const std::vector<std::size_t>& centers(int n) const;
};

CoveringChain covering_chain(const FiniteMetricSpace& space, double theta, double rho,
                             int n_max, CoveringStrategy strategy = CoveringStrategy::greedy);

// Farthest-point-first net: start at point 0, repeatedly add the point
// farthest from the current centers (lowest index on ties) until every point
// is within `radius`.
std::vector<std::size_t> greedy_net(const FiniteMetricSpace& space, double radius);

// T_n of the unit interval for theta = 1, rho = 1/2: T_1 = T_2 = {1/2} and
// T_n = {(2j+1) 2^{1-n} : 0 <= j < 2^{n-2}} for n >= 3.
std::vector<Dyadic> dyadic_interval_centers(int n);

// Largest distance from any point to its nearest center.
double covering_radius(const FiniteMetricSpace& space, const std::vector<std::size_t>& centers);

struct MinkowskiEstimate {
  double slope = 0.0;
  // log|T_n| / -log r_n per level; NaN where r_n >= 1.
  std::vector<double> per_level;
  int fit_first_level = 0;
  int fit_last_level = 0;
};

// Least-squares slope of log|T_n| against -log r_n over the finest half of
// the levels.  Needs at least 3 levels.
MinkowskiEstimate minkowski_estimate(const CoveringChain& chain);

}  // namespace spectriple
