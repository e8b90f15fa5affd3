#include "spectriple/metric_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "spectriple/errors.hpp"
#include "spectriple/io.hpp"

namespace spectriple {

std::string Distance::to_string() const {
  if (exact) return exact->to_string();
  return format_real(value);
}

struct FiniteMetricSpace::Data {
  std::size_t n = 0;
  std::string label;
  std::vector<std::string> ids;
  std::vector<double> matrix;  // row-major, empty in coordinate mode
  std::size_t dim = 0;
  std::vector<double> coords;  // row-major n x dim
  std::vector<std::optional<Dyadic>> dyadic;
  std::unordered_map<Dyadic, std::size_t, DyadicHash> dyadic_index;
  SpaceStructure structure = SpaceStructure::general;
  int level = 0;
  double diameter = 0.0;
};

namespace {

constexpr double kTriangleTolerance = 1e-9;

std::vector<std::string> default_ids(std::size_t n, std::vector<std::string> ids) {
  if (ids.empty()) {
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  }
  if (ids.size() != n) {
    throw Error(ErrorKind::invalid_argument, "point id count does not match point count");
  }
  return ids;
}

void check_matrix_axioms(const std::vector<double>& d, std::size_t n) {
  auto at = [&](std::size_t i, std::size_t j) { return d[i * n + j]; };
  for (std::size_t i = 0; i < n; ++i) {
    if (at(i, i) != 0.0) {
      throw MetricAxiomError("dist[" + std::to_string(i) + "][" + std::to_string(i) +
                                 "] is not zero",
                             {i, i, i});
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double v = at(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw MetricAxiomError("dist[" + std::to_string(i) + "][" + std::to_string(j) +
                                   "] is negative or not finite",
                               {i, j, j});
      }
      if (v != at(j, i)) {
        throw MetricAxiomError("distance matrix is not symmetric at (" + std::to_string(i) +
                                   "," + std::to_string(j) + ")",
                               {i, j, j});
      }
      if (i != j && v == 0.0) {
        throw MetricAxiomError("duplicate points " + std::to_string(i) + " and " +
                                   std::to_string(j) + " (zero distance)",
                               {i, j, j});
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const double via = at(i, k) + at(k, j);
        if (at(i, j) > via * (1.0 + kTriangleTolerance)) {
          throw MetricAxiomError(
              "triangle inequality violated at (" + std::to_string(i) + "," +
                  std::to_string(k) + "," + std::to_string(j) + "): d(" + std::to_string(i) +
                  "," + std::to_string(j) + ")=" + format_real(at(i, j)) + " > d(" +
                  std::to_string(i) + "," + std::to_string(k) + ")+d(" + std::to_string(k) +
                  "," + std::to_string(j) + ")=" + format_real(via),
              {i, k, j});
        }
      }
    }
  }
}

double euclidean(const double* a, const double* b, std::size_t dim) {
  if (dim == 1) return std::fabs(a[0] - b[0]);
  double s = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return std::sqrt(s);
}

// Rejects coincident points and computes the diameter.
void finish_coordinates(FiniteMetricSpace::Data& data) {
  const std::size_t n = data.n;
  const std::size_t dim = data.dim;
  auto row = [&](std::size_t i) { return data.coords.data() + i * dim; };
  auto duplicate = [](std::size_t i, std::size_t j) {
    return MetricAxiomError("duplicate points " + std::to_string(i) + " and " +
                                std::to_string(j) + " (zero distance)",
                            {i, j, j});
  };
  if (dim == 1) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (!data.dyadic.empty() && data.dyadic[a] && data.dyadic[b]) return *data.dyadic[a] < *data.dyadic[b];
      return data.coords[a] < data.coords[b];
    });
    for (std::size_t k = 1; k < n; ++k) {
      const std::size_t a = order[k - 1], b = order[k];
      const bool same = (!data.dyadic.empty() && data.dyadic[a] && data.dyadic[b])
                            ? *data.dyadic[a] == *data.dyadic[b]
                            : data.coords[a] == data.coords[b];
      if (same) throw duplicate(std::min(a, b), std::max(a, b));
    }
    data.diameter = n == 0 ? 0.0 : data.coords[order.back()] - data.coords[order.front()];
    if (n > 0 && !data.dyadic.empty() && data.dyadic[order.back()] && data.dyadic[order.front()]) {
      data.diameter = (*data.dyadic[order.back()] - *data.dyadic[order.front()]).to_double();
    }
    return;
  }
  double diam = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = euclidean(row(i), row(j), dim);
      if (d == 0.0) throw duplicate(i, j);
      diam = std::max(diam, d);
    }
  }
  data.diameter = diam;
}
}  // namespace

FiniteMetricSpace FiniteMetricSpace::from_matrix(std::vector<double> dist, std::size_t n,
                                                 std::string label,
                                                 std::vector<std::string> ids) {
  if (dist.size() != n * n) {
    throw Error(ErrorKind::invalid_argument, "distance matrix is not " + std::to_string(n) +
                                                 "x" + std::to_string(n));
  }
  check_matrix_axioms(dist, n);
  auto data = std::make_shared<Data>();
  data->n = n;
  data->label = std::move(label);
  data->ids = default_ids(n, std::move(ids));
  data->diameter = dist.empty() ? 0.0 : *std::max_element(dist.begin(), dist.end());
  data->matrix = std::move(dist);
  return FiniteMetricSpace(std::move(data));
}

FiniteMetricSpace FiniteMetricSpace::from_points(const std::vector<std::vector<double>>& coords,
                                                 std::string label,
                                                 std::vector<std::string> ids) {
  auto data = std::make_shared<Data>();
  data->n = coords.size();
  data->label = std::move(label);
  data->ids = default_ids(coords.size(), std::move(ids));
  data->dim = coords.empty() ? 0 : coords.front().size();
  if (!coords.empty() && data->dim == 0) {
    throw Error(ErrorKind::invalid_argument, "points need at least one coordinate");
  }
  data->coords.reserve(data->n * data->dim);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i].size() != data->dim) {
      throw Error(ErrorKind::parse, "point " + std::to_string(i) + " has " +
                                        std::to_string(coords[i].size()) +
                                        " coordinates, expected " + std::to_string(data->dim));
    }
    for (double c : coords[i]) {
      if (!std::isfinite(c)) {
        throw Error(ErrorKind::invalid_argument,
                    "point " + std::to_string(i) + " has a non-finite coordinate");
      }
      data->coords.push_back(c);
    }
  }
  finish_coordinates(*data);
  return FiniteMetricSpace(std::move(data));
}

FiniteMetricSpace FiniteMetricSpace::from_dyadic_points(const std::vector<Dyadic>& coords,
                                                        std::string label) {
  auto data = std::make_shared<Data>();
  data->n = coords.size();
  data->label = std::move(label);
  data->dim = 1;
  data->ids.reserve(coords.size());
  data->coords.reserve(coords.size());
  data->dyadic.reserve(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    data->ids.push_back(coords[i].to_string());
    data->coords.push_back(coords[i].to_double());
    data->dyadic.emplace_back(coords[i]);
    data->dyadic_index.emplace(coords[i], i);
  }
  finish_coordinates(*data);
  return FiniteMetricSpace(std::move(data));
}

std::size_t FiniteMetricSpace::size() const noexcept { return data_ ? data_->n : 0; }

const std::string& FiniteMetricSpace::label() const noexcept {
  static const std::string empty;
  return data_ ? data_->label : empty;
}

const std::string& FiniteMetricSpace::id(std::size_t i) const { return data_->ids.at(i); }

double FiniteMetricSpace::distance(std::size_t i, std::size_t j) const {
  const Data& d = *data_;
  if (!d.matrix.empty()) return d.matrix[i * d.n + j];
  if (!d.dyadic.empty() && d.dyadic[i] && d.dyadic[j]) {
    return (*d.dyadic[i] - *d.dyadic[j]).abs().to_double();
  }
  return euclidean(d.coords.data() + i * d.dim, d.coords.data() + j * d.dim, d.dim);
}

Distance FiniteMetricSpace::exact_distance(std::size_t i, std::size_t j) const {
  const Data& d = *data_;
  if (!d.dyadic.empty() && d.dyadic[i] && d.dyadic[j]) {
    return Distance::of((*d.dyadic[i] - *d.dyadic[j]).abs());
  }
  return Distance{distance(i, j), std::nullopt};
}

double FiniteMetricSpace::diameter() const noexcept { return data_ ? data_->diameter : 0.0; }

bool FiniteMetricSpace::has_coordinates() const noexcept { return data_ && data_->dim > 0; }

std::size_t FiniteMetricSpace::dimension() const noexcept { return data_ ? data_->dim : 0; }

std::span<const double> FiniteMetricSpace::coordinates(std::size_t i) const {
  if (!has_coordinates()) return {};
  return {data_->coords.data() + i * data_->dim, data_->dim};
}

const std::optional<Dyadic>& FiniteMetricSpace::dyadic_coordinate(std::size_t i) const {
  static const std::optional<Dyadic> none;
  if (data_->dyadic.empty()) return none;
  return data_->dyadic.at(i);
}

bool FiniteMetricSpace::is_dyadic() const noexcept {
  return data_ && !data_->dyadic.empty() &&
         std::all_of(data_->dyadic.begin(), data_->dyadic.end(),
                     [](const auto& x) { return x.has_value(); });
}

std::optional<std::size_t> FiniteMetricSpace::find_dyadic(const Dyadic& x) const {
  const auto it = data_->dyadic_index.find(x);
  if (it == data_->dyadic_index.end()) return std::nullopt;
  return it->second;
}

SpaceStructure FiniteMetricSpace::structure() const noexcept {
  return data_ ? data_->structure : SpaceStructure::general;
}

int FiniteMetricSpace::structure_level() const noexcept { return data_ ? data_->level : 0; }

FiniteMetricSpace FiniteMetricSpace::with_structure(SpaceStructure structure, int level) const {
  auto copy = std::make_shared<Data>(*data_);
  copy->structure = structure;
  copy->level = level;
  return FiniteMetricSpace(std::move(copy));
}

FiniteMetricSpace FiniteMetricSpace::permuted(std::span<const std::size_t> perm) const {
  const Data& d = *data_;
  if (perm.size() != d.n) throw Error(ErrorKind::invalid_argument, "permutation size mismatch");
  auto out = std::make_shared<Data>();
  out->n = d.n;
  out->label = d.label;
  out->dim = d.dim;
  out->diameter = d.diameter;
  for (std::size_t i = 0; i < d.n; ++i) {
    const std::size_t src = perm[i];
    out->ids.push_back(d.ids.at(src));
    for (std::size_t k = 0; k < d.dim; ++k) out->coords.push_back(d.coords[src * d.dim + k]);
    if (!d.dyadic.empty()) {
      out->dyadic.push_back(d.dyadic[src]);
      if (d.dyadic[src]) out->dyadic_index.emplace(*d.dyadic[src], i);
    }
  }
  if (!d.matrix.empty()) {
    out->matrix.resize(d.n * d.n);
    for (std::size_t i = 0; i < d.n; ++i)
      for (std::size_t j = 0; j < d.n; ++j) out->matrix[i * d.n + j] = d.matrix[perm[i] * d.n + perm[j]];
  }
  return FiniteMetricSpace(std::move(out));
}

FiniteMetricSpace build_interval_grid(std::int64_t m) {
  if (m < 2) throw Error(ErrorKind::invalid_argument, "interval grid needs m >= 2");
  const auto intervals = static_cast<std::uint64_t>(m - 1);
  const std::string label = "interval-grid m=" + std::to_string(m);
  if (std::has_single_bit(intervals)) {
    const int q = std::countr_zero(intervals);
    std::vector<Dyadic> xs;
    xs.reserve(static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < m; ++i) xs.emplace_back(i, q);
    return FiniteMetricSpace::from_dyadic_points(xs, label)
        .with_structure(SpaceStructure::interval_grid, 0);
  }
  std::vector<std::vector<double>> xs;
  xs.reserve(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) {
    xs.push_back({static_cast<double>(i) / static_cast<double>(m - 1)});
  }
  return FiniteMetricSpace::from_points(xs, label)
      .with_structure(SpaceStructure::interval_grid, 0);
}

FiniteMetricSpace build_cantor(int level) {
  if (level < 0) throw Error(ErrorKind::invalid_argument, "Cantor level must be >= 0");
  if (level > 15) throw Error(ErrorKind::size_limit, "Cantor level > 15 exceeds 2^15 points");
  // Left endpoints as integer numerators over 3^level, in increasing order.
  std::vector<std::int64_t> nums{0};
  for (int k = 0; k < level; ++k) {
    std::vector<std::int64_t> next;
    next.reserve(nums.size() * 2);
    for (auto a : nums) {
      next.push_back(3 * a);
      next.push_back(3 * a + 2);
    }
    nums = std::move(next);
  }
  const double scale = std::pow(3.0, level);
  std::vector<std::vector<double>> xs;
  xs.reserve(nums.size());
  for (auto a : nums) xs.push_back({static_cast<double>(a) / scale});
  return FiniteMetricSpace::from_points(xs, "cantor level=" + std::to_string(level))
      .with_structure(SpaceStructure::cantor, level);
}

FiniteMetricSpace build_random_cloud(std::size_t n, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw Error(ErrorKind::invalid_argument, "random cloud needs dim >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> xs(n, std::vector<double>(dim));
  for (auto& p : xs)
    for (auto& c : p) c = unit(rng);
  return FiniteMetricSpace::from_points(
      xs, "random-cloud n=" + std::to_string(n) + " dim=" + std::to_string(dim) +
              " seed=" + std::to_string(seed));
}

std::optional<SpaceFormat> parse_space_format(const std::string& name) {
  if (name == "distance-matrix" || name == "distance_matrix") return SpaceFormat::distance_matrix;
  if (name == "point-cloud" || name == "point_cloud") return SpaceFormat::point_cloud;
  return std::nullopt;
}

std::string to_string(SpaceFormat format) {
  return format == SpaceFormat::distance_matrix ? "distance-matrix" : "point-cloud";
}

FiniteMetricSpace parse_space(const std::string& text, SpaceFormat format, bool has_header,
                              const std::string& label) {
  const auto rows = parse_csv(text, has_header);
  if (format == SpaceFormat::distance_matrix) {
    const std::size_t n = rows.size();
    std::vector<double> dist;
    dist.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) {
        throw Error(ErrorKind::parse, label + ": row " + std::to_string(i) + " has " +
                                          std::to_string(rows[i].size()) + " entries, expected " +
                                          std::to_string(n));
      }
      for (std::size_t j = 0; j < n; ++j) {
        dist.push_back(parse_real(rows[i][j], label + ": entry (" + std::to_string(i) + "," +
                                                  std::to_string(j) + ")"));
      }
    }
    return FiniteMetricSpace::from_matrix(std::move(dist), n, label);
  }
  std::vector<std::vector<double>> pts;
  pts.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<double> p;
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      p.push_back(parse_real(rows[i][k], label + ": point " + std::to_string(i)));
    }
    pts.push_back(std::move(p));
  }
  return FiniteMetricSpace::from_points(pts, label);
}

FiniteMetricSpace load_space(const std::filesystem::path& path, SpaceFormat format,
                             bool has_header) {
  return parse_space(read_file(path), format, has_header, path.string());
}

}  // namespace spectriple
