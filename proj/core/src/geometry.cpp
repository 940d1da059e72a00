#include "aperio/geometry.hpp"

#include "aperio/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aperio {

Vec make_vec(std::initializer_list<double> coords) {
  Vec v(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) v(i++) = c;
  return v;
}

Vec zero_vec(int d) { return Vec::Zero(d); }

Vec unit_vec(int d, int axis) {
  Vec v = Vec::Zero(d);
  v(axis) = 1.0;
  return v;
}

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

Box Box::cube(int d, double lo, double hi) {
  return Box{Vec::Constant(d, lo), Vec::Constant(d, hi)};
}

bool Box::empty() const { return (hi.array() < lo.array()).any(); }

bool Box::contains(const Vec& x, double tol) const {
  return (x.array() >= lo.array() - tol).all() && (x.array() <= hi.array() + tol).all();
}

bool Box::contains_ball(const Vec& center, double radius, double tol) const {
  return (center.array() - radius >= lo.array() - tol).all() &&
         (center.array() + radius <= hi.array() + tol).all();
}

double Box::clearance(const Vec& x) const {
  double c = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) c = std::min({c, x(i) - lo(i), hi(i) - x(i)});
  return c;
}

Box Box::eroded(double margin) const {
  return Box{(lo.array() + margin).matrix(), (hi.array() - margin).matrix()};
}

Box Box::shifted(const Vec& offset) const { return Box{lo + offset, hi + offset}; }

double Box::volume() const {
  if (empty()) return 0.0;
  return (hi - lo).prod();
}

double Box::diameter() const { return empty() ? 0.0 : (hi - lo).norm(); }

SpatialIndex::SpatialIndex(int dimension, double cell_size) : dim_(dimension), cell_(cell_size) {
  if (dimension < 1 || dimension > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
  if (!(cell_size > 0)) throw InvalidArgument("cell size must be positive");
}

SpatialIndex::Key SpatialIndex::key_of(const Eigen::Vector3i& c) const {
  constexpr std::int64_t off = 1 << 20;
  return ((c(0) + off) << 42) | ((c(1) + off) << 21) | (c(2) + off);
}

Eigen::Vector3i SpatialIndex::cell_of(const Vec& x) const {
  Eigen::Vector3i c = Eigen::Vector3i::Zero();
  for (int i = 0; i < dim_; ++i) c(i) = static_cast<int>(std::floor(x(i) / cell_));
  return c;
}

std::size_t SpatialIndex::insert(const Vec& p) {
  std::size_t id = points_.size();
  points_.push_back(p);
  Eigen::Vector3i c = cell_of(p);
  buckets_[key_of(c)].push_back(id);
  if (id == 0) {
    min_cell_ = max_cell_ = c;
  } else {
    min_cell_ = min_cell_.cwiseMin(c);
    max_cell_ = max_cell_.cwiseMax(c);
  }
  return id;
}

std::vector<std::size_t> SpatialIndex::within(const Vec& x, double radius) const {
  std::vector<std::size_t> out;
  if (points_.empty()) return out;
  Eigen::Vector3i lo = Eigen::Vector3i::Zero(), hi = Eigen::Vector3i::Zero();
  for (int i = 0; i < dim_; ++i) {
    lo(i) = std::max(min_cell_(i), static_cast<int>(std::floor((x(i) - radius) / cell_)));
    hi(i) = std::min(max_cell_(i), static_cast<int>(std::floor((x(i) + radius) / cell_)));
    if (lo(i) > hi(i)) return out;
  }
  const double r2 = radius * radius;
  Eigen::Vector3i c;
  for (c(0) = lo(0); c(0) <= hi(0); ++c(0))
    for (c(1) = lo(1); c(1) <= hi(1); ++c(1))
      for (c(2) = lo(2); c(2) <= hi(2); ++c(2)) {
        auto it = buckets_.find(key_of(c));
        if (it == buckets_.end()) continue;
        for (std::size_t id : it->second)
          if ((points_[id] - x).squaredNorm() <= r2) out.push_back(id);
      }
  std::sort(out.begin(), out.end());
  return out;
}

bool SpatialIndex::any_within(const Vec& x, double radius) const {
  for (std::size_t id : within(x, radius))
    if ((points_[id] - x).norm() < radius) return true;
  return false;
}

std::optional<std::pair<std::size_t, double>> SpatialIndex::nearest(
    const Vec& x, std::optional<std::size_t> exclude) const {
  if (points_.size() <= (exclude ? 1u : 0u)) return std::nullopt;
  double radius = cell_;
  for (;;) {
    std::optional<std::pair<std::size_t, double>> best;
    for (std::size_t id : within(x, radius)) {
      if (exclude && *exclude == id) continue;
      double d = (points_[id] - x).norm();
      if (!best || d < best->second) best = {id, d};
    }
    if (best) return best;
    radius *= 2.0;
  }
}

std::vector<Vec> covering_grid(const Box& box, double pitch) {
  if (!(pitch > 0)) throw InvalidArgument("grid pitch must be positive");
  std::vector<Vec> out;
  if (box.empty()) return out;
  const int d = box.dimension();
  std::vector<int> n(d);
  for (int i = 0; i < d; ++i) n[i] = std::max(1, static_cast<int>(std::ceil((box.hi(i) - box.lo(i)) / pitch)));
  std::vector<int> idx(d, 0);
  for (;;) {
    Vec p(d);
    for (int i = 0; i < d; ++i) {
      double span = box.hi(i) - box.lo(i);
      p(i) = span == 0 ? box.lo(i) : box.lo(i) + span * idx[i] / n[i];
    }
    out.push_back(p);
    int k = 0;
    while (k < d && ++idx[k] > n[k]) idx[k++] = 0;
    if (k == d) break;
  }
  return out;
}

}  // namespace aperio
