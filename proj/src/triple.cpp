#include "spectriple/triple.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>

#include "spectriple/errors.hpp"
#include "spectriple/io.hpp"
#include "spectriple/parallel.hpp"

namespace spectriple {
namespace {

constexpr double kBoundSlack = 1e-12;
constexpr double kEigenTolerance = 1e-12;

double log2_of(const Distance& d) {
  if (d.exact) {
    const auto num = static_cast<double>(d.exact->num());
    return std::log2(num) - d.exact->log2_den();
  }
  return std::log2(d.value);
}

// rho = 2^{-a} for a positive integer a, if it is one.
std::optional<int> power_of_two_exponent(double rho) {
  int e = 0;
  const double m = std::frexp(rho, &e);
  if (m != 0.5) return std::nullopt;
  return 1 - e;
}

}  // namespace

Magnitude Magnitude::reciprocal(const Distance& d) {
  if (!(d.value > 0.0)) throw Error(ErrorKind::degenerate_pair, "distance must be > 0");
  Magnitude m;
  m.d_ = d;
  m.exact_ = d.exact;
  m.value_ = d.exact ? d.exact->reciprocal_double() : 1.0 / d.value;
  m.log2_ = -log2_of(d);
  return m;
}

Magnitude Magnitude::shifted(int shift_log2, const Distance& d) {
  if (!(d.value > 0.0)) throw Error(ErrorKind::degenerate_pair, "distance must be > 0");
  Magnitude m;
  m.d_ = d;
  m.shift_ = shift_log2;
  const double inv = 1.0 / d.value;
  const double t = std::ldexp(inv, -shift_log2);
  m.log2_ = shift_log2 + 0.5 * std::log1p(t * t) / std::numbers::ln2;
  m.value_ = shift_log2 < 1024 ? std::hypot(std::ldexp(1.0, shift_log2), inv)
                               : std::numeric_limits<double>::infinity();
  return m;
}

bool Magnitude::exceeds_power_of_two(int n) const {
  if (!shift_) {
    if (exact_ && n > -62) return *exact_ < Dyadic::power_of_two(-n);
    return d_.value < std::ldexp(1.0, -n);
  }
  const int k = *shift_;
  if (k > n) return true;
  // 4^k + d^-2 > 4^k holds for every positive d.
  if (k == n) return d_.value > 0.0;
  // 4^k + d^-2 > 4^n  <=>  log2(1/d) > n + log2(1 - 4^{k-n}) / 2
  const double rhs = n + 0.5 * std::log1p(-std::ldexp(1.0, 2 * (k - n))) / std::numbers::ln2;
  return -log2_of(d_) > rhs;
}

double Magnitude::inverse_power(double s) const { return std::exp2(-s * log2_); }

double Magnitude::resolvent_power(double s) const {
  // log2(1 + v^2) without overflow in either direction.
  const double two_l = 2.0 * log2_;
  const double log2_1pv2 = two_l >= 0.0
                               ? two_l + std::log1p(std::exp2(-two_l)) / std::numbers::ln2
                               : std::log1p(std::exp2(two_l)) / std::numbers::ln2;
  return std::exp2(-0.5 * s * log2_1pv2);
}

bool same_eigenvalue(const Magnitude& a, const Magnitude& b) {
  if (!a.shift_ && !b.shift_ && a.exact_ && b.exact_) return *a.exact_ == *b.exact_;
  return std::fabs(a.log2_ - b.log2_) * std::numbers::ln2 <= kEigenTolerance;
}

bool operator<(const Magnitude& a, const Magnitude& b) {
  if (!a.shift_ && !b.shift_ && a.exact_ && b.exact_) return *b.exact_ < *a.exact_;
  return a.log2_ < b.log2_;
}

double TwoPointModule::diag() const {
  return diag_log2 ? std::ldexp(1.0, *diag_log2) : 0.0;
}

Magnitude TwoPointModule::magnitude() const {
  return diag_log2 ? Magnitude::shifted(*diag_log2, d) : Magnitude::reciprocal(d);
}

TwoPointModule two_point_module(std::size_t x, std::size_t y, const Distance& d) {
  if (x == y) {
    throw Error(ErrorKind::degenerate_pair,
                "equal points carry the zero Hilbert space; no module for point " +
                    std::to_string(x));
  }
  if (!(d.value > 0.0)) {
    throw Error(ErrorKind::degenerate_pair, "two-point module needs d > 0, got " + d.to_string());
  }
  TwoPointModule m;
  m.x = {x, 0};
  m.y = {y, 0};
  m.d = d;
  return m;
}

Distance StDeltaParams::same_level_bound(int n) const {
  const double value = (2.0 + std::pow(rho, -(l + 1))) * theta * std::pow(rho, n - 1);
  const auto a = power_of_two_exponent(rho);
  const auto th = Dyadic::from_double(theta);
  if (a && th) {
    try {
      const Dyadic exact = (Dyadic::integer(2) + Dyadic::power_of_two(*a * (l + 1))) * *th *
                           Dyadic::power_of_two(-*a * (n - 1));
      return Distance::of(exact);
    } catch (const std::overflow_error&) {
    }
  }
  return Distance{value, std::nullopt};
}

Distance StDeltaParams::next_level_bound(int n) const {
  const double value = (1.0 + rho) * theta * std::pow(rho, n - 1);
  const auto a = power_of_two_exponent(rho);
  const auto th = Dyadic::from_double(theta);
  if (a && th) {
    try {
      const Dyadic exact = (Dyadic::integer(1) + Dyadic::power_of_two(-*a)) * *th *
                           Dyadic::power_of_two(-*a * (n - 1));
      return Distance::of(exact);
    } catch (const std::overflow_error&) {
    }
  }
  return Distance{value, std::nullopt};
}

bool within_bound(const Distance& d, const Distance& bound) {
  if (d.exact && bound.exact) return *d.exact <= *bound.exact;
  return d.value <= bound.value * (1.0 + kBoundSlack);
}

SpectralTripleSum::SpectralTripleSum(FiniteMetricSpace space, std::vector<TwoPointModule> modules,
                                     TripleKind kind, std::optional<StDeltaParams> params)
    : space_(std::move(space)), modules_(std::move(modules)), kind_(kind), params_(params) {}

std::vector<std::size_t> SpectralTripleSum::support() const {
  std::vector<std::size_t> pts;
  pts.reserve(2 * modules_.size());
  for (const auto& m : modules_) {
    pts.push_back(m.x.point);
    pts.push_back(m.y.point);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::vector<int> SpectralTripleSum::levels() const {
  std::set<int> ls;
  for (const auto& m : modules_) ls.insert(m.level);
  return {ls.begin(), ls.end()};
}

SpectralTripleSum build_st_d(const FiniteMetricSpace& space) {
  const std::size_t n = space.size();
  if (n < 2) throw Error(ErrorKind::empty_triple, "ST(d) needs at least 2 points");
  std::vector<TwoPointModule> modules;
  modules.reserve(n * (n - 1) / 2);
  int level = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      ++level;
      TwoPointModule m = two_point_module(i, j, space.exact_distance(i, j));
      m.level = level;
      m.x.level = m.y.level = 0;
      m.diag_log2 = level;
      modules.push_back(m);
    }
  }
  return SpectralTripleSum(space, std::move(modules), TripleKind::st_d);
}

InteractionParams interaction_params(double theta, double rho, double delta, double diam) {
  if (!(theta > 0.0)) throw Error(ErrorKind::invalid_argument, "theta must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::invalid_argument, "rho must be in (0,1)");
  if (!(delta > 0.0)) throw Error(ErrorKind::invalid_argument, "delta must be > 0");
  if (!(diam > 0.0)) throw Error(ErrorKind::invalid_argument, "diameter must be > 0");
  InteractionParams p;
  p.k0 = static_cast<int>(std::floor(std::log(diam / theta) / std::log(rho)));
  while (theta * std::pow(rho, p.k0) < diam) --p.k0;
  while (theta * std::pow(rho, p.k0 + 1) >= diam) ++p.k0;
  p.l = std::max(0, -p.k0);
  if (4.0 / (1.0 - rho) >= delta) {
    while (!(4.0 * std::pow(rho, p.l) / (1.0 - rho) < delta)) ++p.l;
  }
  return p;
}

namespace {

struct Sorted1d {
  std::vector<double> coord;
  std::vector<std::size_t> point;
};

Sorted1d sort_by_coordinate(const FiniteMetricSpace& space, const std::vector<std::size_t>& pts) {
  std::vector<std::size_t> order = pts;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return space.coordinates(a)[0] < space.coordinates(b)[0];
  });
  Sorted1d out;
  out.point = order;
  for (auto p : order) out.coord.push_back(space.coordinates(p)[0]);
  return out;
}

std::vector<TwoPointModule> level_modules(const FiniteMetricSpace& space,
                                          const CoveringChain& chain, const StDeltaParams& params,
                                          int n) {
  const auto& same = chain.centers(n);
  const auto& next = chain.centers(n + 1);
  const Distance same_bound = params.same_level_bound(n);
  const Distance next_bound = params.next_level_bound(n);
  std::vector<TwoPointModule> out;

  auto emit = [&](std::size_t x, std::size_t y, int y_level) {
    if (x == y) return;  // coincident centers: the zero module
    const Distance d = space.exact_distance(x, y);
    if (!within_bound(d, y_level == n ? same_bound : next_bound)) return;
    TwoPointModule m = two_point_module(x, y, d);
    m.x.level = n;
    m.y.level = y_level;
    m.level = n;
    out.push_back(m);
  };

  if (space.dimension() == 1) {
    // Prefilter by coordinate window, then apply the exact bound.
    const Sorted1d s = sort_by_coordinate(space, same);
    const Sorted1d t = sort_by_coordinate(space, next);
    const double wsame = same_bound.value * (1.0 + 1e-9);
    const double wnext = next_bound.value * (1.0 + 1e-9);
    for (std::size_t p = 0; p < s.point.size(); ++p) {
      for (std::size_t q = p + 1; q < s.point.size() && s.coord[q] - s.coord[p] <= wsame; ++q) {
        emit(s.point[p], s.point[q], n);
      }
      auto lo = std::lower_bound(t.coord.begin(), t.coord.end(), s.coord[p] - wnext);
      for (auto it = lo; it != t.coord.end() && *it <= s.coord[p] + wnext; ++it) {
        emit(s.point[p], t.point[static_cast<std::size_t>(it - t.coord.begin())], n + 1);
      }
    }
    return out;
  }
  for (std::size_t p = 0; p < same.size(); ++p) {
    for (std::size_t q = p + 1; q < same.size(); ++q) emit(same[p], same[q], n);
    for (auto y : next) emit(same[p], y, n + 1);
  }
  return out;
}

}  // namespace

SpectralTripleSum build_st_delta(const FiniteMetricSpace& space, const CoveringChain& chain,
                                 double delta, int n_min, int n_max) {
  if (!(delta > 0.0)) throw Error(ErrorKind::invalid_argument, "delta must be > 0");
  if (n_min < 1) throw Error(ErrorKind::invalid_argument, "n_min must be >= 1");
  StDeltaParams params;
  params.theta = chain.theta;
  params.rho = chain.rho;
  params.delta = delta;
  params.n_min = n_min;
  params.n_max = n_max;
  if (space.size() < 2 || n_max < n_min) {
    if (space.size() >= 2) {
      const auto ip = interaction_params(chain.theta, chain.rho, delta, space.diameter());
      params.k0 = ip.k0;
      params.l = ip.l;
    }
    return SpectralTripleSum(space, {}, TripleKind::st_delta, params);
  }
  if (chain.depth() < n_max + 1) {
    throw Error(ErrorKind::insufficient_chain,
                "covering chain has " + std::to_string(chain.depth()) + " levels, ST(delta) up to n=" +
                    std::to_string(n_max) + " needs " + std::to_string(n_max + 1));
  }
  const auto ip = interaction_params(chain.theta, chain.rho, delta, space.diameter());
  params.k0 = ip.k0;
  params.l = ip.l;

  const auto count = static_cast<std::size_t>(n_max - n_min + 1);
  std::vector<std::vector<TwoPointModule>> per_level(count);
  parallel_for(count, [&](std::size_t i) {
    per_level[i] = level_modules(space, chain, params, n_min + static_cast<int>(i));
  });
  std::vector<TwoPointModule> modules;
  for (auto& lv : per_level) modules.insert(modules.end(), lv.begin(), lv.end());
  return SpectralTripleSum(space, std::move(modules), TripleKind::st_delta, params);
}

void dump_triple(const SpectralTripleSum& triple, std::ostream& out) {
  const auto& space = triple.space();
  for (const auto& m : triple.modules()) {
    out << m.level << '\t' << space.id(m.x.point) << '\t' << space.id(m.y.point) << '\t'
        << m.d.to_string() << '\t'
        << (m.diag_log2 ? "2^" + std::to_string(*m.diag_log2) : std::string("0")) << '\n';
  }
}

}  // namespace spectriple
