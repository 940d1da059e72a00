#pragma once

#include "aperio/groupoid.hpp"
#include "aperio/pattern_tree.hpp"

#include <array>
#include <memory>
#include <optional>
#include <vector>

namespace aperio {

/// Sites of the translate of the set to a base site, inside [-radius, radius]^d.
struct Fiber {
  std::size_t base_site = 0;
  std::vector<std::size_t> sites;  // absolute site indices
  std::vector<Vec> coords;         // relative to the base site
};

/// Truncated L^2 of the fiber product over tree vertices: for every vertex v
/// the fibers at tau+(v) and tau-(v), tensored with the exterior algebra of R^d.
struct FiberSpace {
  int dimension = 1;
  double radius = 0;
  double r = 0;
  std::shared_ptr<const PatternTree> tree;
  ChoicePair pair;
  std::vector<std::array<Fiber, 2>> fibers;  // [v][0] = tau+, [v][1] = tau-
  std::vector<std::array<Eigen::Index, 2>> offset;
  int clifford_dim = 1;
  Eigen::Index dim = 0;

  Eigen::Index index(std::size_t v, int sector, std::size_t point, int basis) const {
    return offset[v][static_cast<std::size_t>(sector)] + local(v, sector, point, basis);
  }
  /// Index inside the block of vertex v.
  Eigen::Index local(std::size_t v, int sector, std::size_t point, int basis) const {
    const Eigen::Index start =
        sector == 0 ? 0 : static_cast<Eigen::Index>(fibers[v][0].sites.size()) * clifford_dim;
    return start + static_cast<Eigen::Index>(point) * clifford_dim + basis;
  }
  Eigen::Index block_dim(std::size_t v) const {
    return static_cast<Eigen::Index>(fibers[v][0].sites.size() + fibers[v][1].sites.size()) * clifford_dim;
  }
};

/// Operator that is block diagonal over tree vertices.
struct BlockOperator {
  std::vector<CMat> blocks;

  Eigen::Index dim() const;
  CMat dense() const;
  BlockOperator operator*(const BlockOperator& o) const;
  BlockOperator operator+(const BlockOperator& o) const;
  BlockOperator adjoint() const;
  double max_abs() const;
};

struct FiberOptions {
  /// Fiber box half-width; default depth * R + r (frame supports have diameter < r).
  std::optional<double> radius;
  /// Extra clearance of every fiber box from the window.
  double margin = 0;
};

FiberSpace build_fiber_space(const DeloneSet& set, std::shared_ptr<const PatternTree> tree, const ChoicePair& pair,
                             const FiberOptions& opt = {});

/// gamma^k = ext_k + int_k on the exterior algebra, basis indexed by bitmask.
CMat clifford_generator(int d, int k);
/// (-1)^{|S|}.
CMat clifford_grading(int d);

/// X = sum_k x_k (x) gamma^k.
BlockOperator operator_X(const FiberSpace& fs);
/// kappa = 1 (x) grading.
BlockOperator operator_kappa(const FiberSpace& fs);
/// T = [[0, T+^*], [T+, 0]] (x) 1 with T+(eta, xi) = zeta_{|v|} sum_y chi_y(x_eta) chi_y(x_xi).
BlockOperator operator_T(const FiberSpace& fs, const Frame& frame, Zeta zeta);

struct AnticommutatorReport {
  double max_ratio = 0;
  double mean_ratio = 0;
  std::size_t trials = 0;
  std::size_t skipped = 0;
  /// Largest |x_eta - x_xi| over the nonzero entries of T.
  double max_displacement = 0;
};

/// ||(XTk + TkX) phi|| / ||Tk phi|| over random Gaussian phi.
AnticommutatorReport anticommutator_estimate(const FiberSpace& fs, const BlockOperator& X, const BlockOperator& T, std::size_t trials,
                                             std::uint64_t seed);

/// max over vertices of level >= min_level of |[T, u_n]| entries, u_n(x) the local unit at radius n R.
double local_unit_defect(const FiberSpace& fs, const BlockOperator& T, const Frame& frame, int n, int min_level);

/// Norm of (1 + X^2)^{-delta} [T, f] with f a function of absolute sites.
double damped_commutator_norm(const FiberSpace& fs, const BlockOperator& T, const SiteFunction& f, double delta);

struct ScanRow {
  int depth = 0;
  Eigen::Index dimension = 0;
  double norm = 0;
};

struct ScanReport {
  std::vector<ScanRow> rows;
  Zeta zeta = Zeta::log;
  double delta = 0;
  /// last <= 1.1 * max of the earlier values
  bool bounded = false;
  /// last / first (first nonzero)
  double growth = 0;
};

struct ScanOptions {
  double eps = 0.1;
  double lattice_pitch = 0;  // default: default_pitch(d, eps)
  std::uint64_t seed = 0;
};

/// Damped commutator norms of T with f at each depth; f is evaluated on
/// absolute sites and needs `pattern_radius` of window clearance.
ScanReport log_commutator_scan(const DeloneSet& set, const std::vector<int>& depths, const SiteFunction& f,
                               double pattern_radius, double delta, Zeta zeta, const ScanOptions& opt = {});

struct ProductSpectrum {
  RVec eigenvalues;
  double min_abs = 0;
  double symmetry_defect = 0;  // max |lambda_i + lambda_{n-1-i}|
  std::vector<std::pair<double, std::size_t>> counting;  // (lambda, #{|lambda_i| <= lambda})
  double hermitian_defect = 0;
};

/// Spectrum of D = X + T kappa.
ProductSpectrum product_spectrum(const FiberSpace& fs, const BlockOperator& X, const BlockOperator& T);

/// Frame pitch used by the product construction.
double default_pitch(int d, double eps);

}  // namespace aperio
