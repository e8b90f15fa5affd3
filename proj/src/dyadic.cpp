#include "spectriple/dyadic.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spectriple {
namespace {

// GCC and Clang extension; exact products of two 64-bit numerators.
__extension__ using i128 = __int128;

constexpr int kMaxShift = 62;

std::uint64_t magnitude(std::int64_t v) {
  return v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1u : static_cast<std::uint64_t>(v);
}

Dyadic from_wide(i128 num, int log2_den) {
  if (num == 0) return Dyadic();
  while (log2_den > 0 && (num & 1) == 0) {
    num /= 2;
    --log2_den;
  }
  while (log2_den < 0) {
    num *= 2;
    ++log2_den;
    if (num > std::numeric_limits<std::int64_t>::max() ||
        num < std::numeric_limits<std::int64_t>::min()) {
      throw std::overflow_error("dyadic numerator overflow");
    }
  }
  if (num > std::numeric_limits<std::int64_t>::max() ||
      num < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("dyadic numerator overflow");
  }
  return Dyadic(static_cast<std::int64_t>(num), log2_den);
}

// Numerators of a and b over the common denominator 2^max(den).
std::pair<i128, i128> aligned(const Dyadic& a, const Dyadic& b) {
  const int den = std::max(a.log2_den(), b.log2_den());
  const int sa = den - a.log2_den();
  const int sb = den - b.log2_den();
  if ((sa > kMaxShift && a.num() != 0) || (sb > kMaxShift && b.num() != 0)) {
    throw std::overflow_error("dyadic denominators too far apart");
  }
  const i128 na = a.num() == 0 ? 0 : static_cast<i128>(a.num()) << sa;
  const i128 nb = b.num() == 0 ? 0 : static_cast<i128>(b.num()) << sb;
  return {na, nb};
}

}  // namespace

Dyadic::Dyadic(std::int64_t num, int log2_den) {
  if (num == 0) return;
  while (log2_den > 0 && (num & 1) == 0) {
    num /= 2;
    --log2_den;
  }
  if (log2_den < 0) {
    if (-log2_den > kMaxShift || magnitude(num) > (std::uint64_t{1} << (kMaxShift + log2_den))) {
      throw std::overflow_error("dyadic numerator overflow");
    }
    num *= std::int64_t{1} << -log2_den;
    log2_den = 0;
  }
  num_ = num;
  log2_den_ = log2_den;
}

Dyadic Dyadic::power_of_two(int exponent) {
  if (exponent >= 0) {
    if (exponent > kMaxShift) throw std::overflow_error("dyadic numerator overflow");
    Dyadic d;
    d.num_ = std::int64_t{1} << exponent;
    return d;
  }
  Dyadic d;
  d.num_ = 1;
  d.log2_den_ = -exponent;
  return d;
}

std::optional<Dyadic> Dyadic::from_double(double value) {
  if (!std::isfinite(value)) return std::nullopt;
  if (value == 0.0) return Dyadic();
  int exp = 0;
  const double mant = std::frexp(value, &exp);  // value = mant * 2^exp
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  try {
    return from_wide(scaled, 53 - exp);
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

double Dyadic::to_double() const {
  return std::ldexp(static_cast<double>(num_), -log2_den_);
}

double Dyadic::reciprocal_double() const {
  if (num_ == 0) throw std::domain_error("reciprocal of zero dyadic");
  return std::ldexp(1.0 / static_cast<double>(num_), log2_den_);
}

int Dyadic::floor_log2() const {
  if (num_ == 0) throw std::domain_error("log2 of zero dyadic");
  return static_cast<int>(std::bit_width(magnitude(num_))) - 1 - log2_den_;
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  const auto [na, nb] = aligned(a, b);
  return from_wide(na + nb, std::max(a.log2_den(), b.log2_den()));
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) {
  const auto [na, nb] = aligned(a, b);
  return from_wide(na - nb, std::max(a.log2_den(), b.log2_den()));
}

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  return from_wide(static_cast<i128>(a.num()) * b.num(), a.log2_den() + b.log2_den());
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  const int sa = (a.num() > 0) - (a.num() < 0);
  const int sb = (b.num() > 0) - (b.num() < 0);
  if (sa != sb) return sa <=> sb;
  if (sa == 0) return std::strong_ordering::equal;
  const int la = a.floor_log2();
  const int lb = b.floor_log2();
  if (la != lb) return sa > 0 ? la <=> lb : lb <=> la;
  // Same binary exponent, so the denominators differ by less than 64 bits.
  const auto [na, nb] = aligned(a, b);
  return na <=> nb;
}

std::string Dyadic::to_string() const {
  return std::to_string(num_) + "/2^" + std::to_string(log2_den_);
}

}  // namespace spectriple
