#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace aperio {

/// Point or displacement in R^d, d <= 3. Fixed capacity, no heap allocation.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

Vec make_vec(std::initializer_list<double> coords);
Vec zero_vec(int d);
Vec unit_vec(int d, int axis);

/// Lexicographic order on coordinates.
bool lex_less(const Vec& a, const Vec& b);

/// Axis-aligned closed box [lo_1,hi_1] x ... x [lo_d,hi_d].
struct Box {
  Vec lo;
  Vec hi;

  static Box cube(int d, double lo, double hi);

  int dimension() const { return static_cast<int>(lo.size()); }
  bool empty() const;
  bool contains(const Vec& x, double tol = 0.0) const;
  /// True if the closed ball B(center; radius) lies inside the box.
  bool contains_ball(const Vec& center, double radius, double tol = 0.0) const;
  /// Distance from x to the nearest face (negative outside).
  double clearance(const Vec& x) const;
  Box eroded(double margin) const;
  Box expanded(double margin) const { return eroded(-margin); }
  Box shifted(const Vec& offset) const;
  Vec center() const { return 0.5 * (lo + hi); }
  double volume() const;
  double diameter() const;
};

/// Uniform bucket grid for fixed-radius neighbour queries. Supports
/// incremental insertion so generators can grow a point set in place.
class SpatialIndex {
 public:
  SpatialIndex(int dimension, double cell_size);

  int dimension() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const Vec& point(std::size_t i) const { return points_[i]; }

  std::size_t insert(const Vec& p);

  /// Indices of points with |p - x| <= radius.
  std::vector<std::size_t> within(const Vec& x, double radius) const;

  /// Nearest stored point other than `exclude`; nullopt for an empty index.
  std::optional<std::pair<std::size_t, double>> nearest(
      const Vec& x, std::optional<std::size_t> exclude = std::nullopt) const;

  /// True if some stored point lies at distance < radius from x.
  bool any_within(const Vec& x, double radius) const;

 private:
  using Key = std::int64_t;
  Key key_of(const Eigen::Vector3i& cell) const;
  Eigen::Vector3i cell_of(const Vec& x) const;

  int dim_;
  double cell_;
  std::vector<Vec> points_;
  std::unordered_map<Key, std::vector<std::size_t>> buckets_;
  Eigen::Vector3i min_cell_ = Eigen::Vector3i::Constant(0);
  Eigen::Vector3i max_cell_ = Eigen::Vector3i::Constant(-1);
};

/// Regular grid of points covering a box with spacing <= pitch, endpoints
/// included. Shared by the density verifier and the amorphous generator so
/// both inspect exactly the same probe points.
std::vector<Vec> covering_grid(const Box& box, double pitch);

}  // namespace aperio
