#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "spectriple/covering.hpp"
#include "spectriple/metric_space.hpp"

namespace spectriple {

// |lambda| for one 2x2 block.  Unshifted blocks have |lambda| = 1/d; blocks
// carrying the diagonal 2^k have |lambda| = sqrt(4^k + d^-2).  The value can
// exceed the double range for large k, so ordering and sums go through log2.
class Magnitude {
 public:
  static Magnitude reciprocal(const Distance& d);
  static Magnitude shifted(int shift_log2, const Distance& d);

  // +inf when the value overflows a double.
  double value() const noexcept { return value_; }
  double log2() const noexcept { return log2_; }
  const std::optional<int>& shift_log2() const noexcept { return shift_; }
  // The distance d when |lambda| = 1/d exactly with d dyadic.
  const std::optional<Dyadic>& exact_reciprocal() const noexcept { return exact_; }
  const Distance& distance() const noexcept { return d_; }

  // |lambda| > 2^n.
  bool exceeds_power_of_two(int n) const;
  // |lambda|^{-s}
  double inverse_power(double s) const;
  // (1 + |lambda|^2)^{-s/2}
  double resolvent_power(double s) const;

  // Exact for dyadic reciprocals, relative tolerance 1e-12 otherwise.
  friend bool same_eigenvalue(const Magnitude& a, const Magnitude& b);
  // Strict ascending order consistent with same_eigenvalue on exact entries.
  friend bool operator<(const Magnitude& a, const Magnitude& b);

 private:
  Distance d_;
  std::optional<int> shift_;
  std::optional<Dyadic> exact_;
  double value_ = 0.0;
  double log2_ = 0.0;
};

// A point of the space, tagged with the covering level it was taken from
// (0 for ST(d) modules).
struct CenterRef {
  std::size_t point = 0;
  int level = 0;
};

struct TwoPointModule {
  CenterRef x;
  CenterRef y;
  Distance d;
  std::optional<int> diag_log2;  // diagonal entries +-2^k; none means 0
  int level = 0;                 // J_n level for ST(delta), enumeration index for ST(d)

  double diag() const;
  Magnitude magnitude() const;
};

// Unshifted two-point module for distinct points at positive distance.
TwoPointModule two_point_module(std::size_t x, std::size_t y, const Distance& d);

enum class TripleKind { st_d, st_delta };

struct InteractionParams {
  int k0 = 0;
  int l = 0;
};

struct StDeltaParams {
  double theta = 1.0;
  double rho = 0.5;
  double delta = 9.0;
  int k0 = 0;
  int l = 0;
  int n_min = 1;
  int n_max = 1;

  // (2 + rho^{-(l+1)}) theta rho^{n-1}; exact when rho is a power of two.
  Distance same_level_bound(int n) const;
  // (1 + rho) theta rho^{n-1}
  Distance next_level_bound(int n) const;
};

class SpectralTripleSum {
 public:
  SpectralTripleSum(FiniteMetricSpace space, std::vector<TwoPointModule> modules, TripleKind kind,
                    std::optional<StDeltaParams> params = std::nullopt);

  const FiniteMetricSpace& space() const noexcept { return space_; }
  const std::vector<TwoPointModule>& modules() const noexcept { return modules_; }
  TripleKind kind() const noexcept { return kind_; }
  const std::optional<StDeltaParams>& params() const noexcept { return params_; }
  bool empty() const noexcept { return modules_.empty(); }

  // Sorted distinct point indices appearing in some module.
  std::vector<std::size_t> support() const;
  // Sorted distinct module levels.
  std::vector<int> levels() const;

 private:
  FiniteMetricSpace space_;
  std::vector<TwoPointModule> modules_;
  TripleKind kind_;
  std::optional<StDeltaParams> params_;
};

// One shifted module per unordered pair (i < j, lexicographic), module n
// carrying the diagonal 2^n.
SpectralTripleSum build_st_d(const FiniteMetricSpace& space);

// k0 with theta rho^{k0+1} < diam <= theta rho^{k0}, and the interaction
// length l.
InteractionParams interaction_params(double theta, double rho, double delta, double diam);

// Pairs {x, y} with x in T_n, y in T_n or T_{n+1}, x != y, n_min <= n <= n_max,
// within the same-level or next-level distance bound.
SpectralTripleSum build_st_delta(const FiniteMetricSpace& space, const CoveringChain& chain,
                                 double delta, int n_min, int n_max);

// True when d lies within bound.  Exact when both are dyadic, relative
// tolerance 1e-12 otherwise.
bool within_bound(const Distance& d, const Distance& bound);

// Tab-separated: level, x-id, y-id, d, diag.
void dump_triple(const SpectralTripleSum& triple, std::ostream& out);

}  // namespace spectriple
