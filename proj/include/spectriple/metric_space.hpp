#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spectriple/dyadic.hpp"

namespace spectriple {

// A distance value, carried exactly when both endpoints have dyadic
// coordinates.
struct Distance {
  double value = 0.0;
  std::optional<Dyadic> exact;

  static Distance of(double v) { return Distance{v, Dyadic::from_double(v)}; }
  static Distance of(const Dyadic& d) { return Distance{d.to_double(), d}; }

  // `p/2^q` when exact, shortest round-trip decimal otherwise.
  std::string to_string() const;
};

// Generators tag their output so covering chains can use the closed-form
// center sets.
enum class SpaceStructure { general, interval_grid, cantor };

// A finite metric space with a validated distance.  Storage is either an
// explicit symmetric matrix or a coordinate table with the Euclidean metric.
// Copies share the underlying immutable data.
class FiniteMetricSpace {
 public:
  // Row-major n x n matrix.  All metric axioms are checked; the triangle
  // inequality uses a relative tolerance of 1e-9.
  static FiniteMetricSpace from_matrix(std::vector<double> dist, std::size_t n,
                                       std::string label,
                                       std::vector<std::string> ids = {});
  // Euclidean point cloud; rows must have equal length.  Duplicate points are
  // rejected.
  static FiniteMetricSpace from_points(const std::vector<std::vector<double>>& coords,
                                       std::string label,
                                       std::vector<std::string> ids = {});
  // Points on the line with exact dyadic coordinates.
  static FiniteMetricSpace from_dyadic_points(const std::vector<Dyadic>& coords,
                                              std::string label);

  std::size_t size() const noexcept;
  bool empty() const noexcept { return size() == 0; }
  const std::string& label() const noexcept;
  const std::string& id(std::size_t i) const;

  double distance(std::size_t i, std::size_t j) const;
  Distance exact_distance(std::size_t i, std::size_t j) const;
  double diameter() const noexcept;

  bool has_coordinates() const noexcept;
  std::size_t dimension() const noexcept;
  std::span<const double> coordinates(std::size_t i) const;
  // Non-empty only for spaces built from dyadic coordinates.
  const std::optional<Dyadic>& dyadic_coordinate(std::size_t i) const;
  bool is_dyadic() const noexcept;
  std::optional<std::size_t> find_dyadic(const Dyadic& x) const;

  SpaceStructure structure() const noexcept;
  // Construction depth of a Cantor space; 0 otherwise.
  int structure_level() const noexcept;
  FiniteMetricSpace with_structure(SpaceStructure structure, int level) const;

  // Same points in a new order: point i of the result is point perm[i] here.
  FiniteMetricSpace permuted(std::span<const std::size_t> perm) const;

  struct Data;  // implementation detail

 private:
  explicit FiniteMetricSpace(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  std::shared_ptr<const Data> data_;
};

// m equally spaced points 0, 1/(m-1), ..., 1.  Exact dyadic when m-1 is a
// power of two.
FiniteMetricSpace build_interval_grid(std::int64_t m);

// Left endpoints of the 2^level intervals of the middle-third construction.
FiniteMetricSpace build_cantor(int level);

// n points uniform in [0,1]^dim from a seeded mt19937_64.
FiniteMetricSpace build_random_cloud(std::size_t n, std::size_t dim, std::uint64_t seed);

enum class SpaceFormat { distance_matrix, point_cloud };

std::optional<SpaceFormat> parse_space_format(const std::string& name);
std::string to_string(SpaceFormat format);

// CSV input; `#` lines are comments, the first data row is skipped when
// has_header is set.
FiniteMetricSpace load_space(const std::filesystem::path& path, SpaceFormat format,
                             bool has_header = false);
FiniteMetricSpace parse_space(const std::string& text, SpaceFormat format,
                              bool has_header, const std::string& label);

}  // namespace spectriple
