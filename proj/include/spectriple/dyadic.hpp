#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace spectriple {

// Exact number num / 2^log2_den.
//
// Canonical form: log2_den >= 0, and num is odd whenever log2_den > 0
// (zero is stored as 0/2^0).  Integers therefore keep log2_den == 0 and may
// have an even numerator.  All arithmetic is exact; results that do not fit
// a 64-bit numerator throw std::overflow_error.
class Dyadic {
 public:
  constexpr Dyadic() = default;
  Dyadic(std::int64_t num, int log2_den);

  static Dyadic integer(std::int64_t value) { return Dyadic(value, 0); }
  // 2^exponent, exponent may be negative.
  static Dyadic power_of_two(int exponent);
  // Exact conversion of a finite double; nullopt if the value needs more than
  // 63 numerator bits or is not finite.
  static std::optional<Dyadic> from_double(double value);

  std::int64_t num() const noexcept { return num_; }
  int log2_den() const noexcept { return log2_den_; }

  double to_double() const;
  // Correctly rounded 1/x; x must be nonzero.
  double reciprocal_double() const;
  // floor(log2(|x|)); x must be nonzero.
  int floor_log2() const;

  bool is_zero() const noexcept { return num_ == 0; }
  bool is_negative() const noexcept { return num_ < 0; }

  Dyadic abs() const { return Dyadic(num_ < 0 ? -num_ : num_, log2_den_); }
  Dyadic operator-() const { return Dyadic(-num_, log2_den_); }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);

  friend bool operator==(const Dyadic& a, const Dyadic& b) noexcept {
    return a.num_ == b.num_ && a.log2_den_ == b.log2_den_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

  // "p/2^q"
  std::string to_string() const;

 private:
  std::int64_t num_ = 0;
  int log2_den_ = 0;
};

struct DyadicHash {
  std::size_t operator()(const Dyadic& d) const noexcept {
    return std::hash<std::int64_t>{}(d.num()) * 1000003u ^ std::hash<int>{}(d.log2_den());
  }
};

}  // namespace spectriple
