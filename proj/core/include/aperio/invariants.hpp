#pragma once

#include "aperio/delone.hpp"
#include "aperio/hamiltonians.hpp"
#include "aperio/operator.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace aperio {

struct InvariantReport {
  std::string name;
  std::string method;  // "formula" or "fredholm_oracle"
  cd raw = 0;
  long rounded = 0;
  double deviation = 0;
  bool within_tolerance = false;
  double round_tol = 0.05;
  std::optional<long> oracle;
  /// raw / oracle when the oracle is nonzero.
  std::optional<double> ratio;
  Box window;
  double bulk_margin = 0;
  double runtime_s = 0;
  nlohmann::json details = nlohmann::json::object();

  void set_raw(cd value);
};

/// (1/#bulk sites) * sum of diagonal blocks over the bulk window.
cd trace_per_unit_volume(const OperatorSample& A);

/// C_{2n} = (-2 pi i)^n / n!
cd chern_constant(int k);
/// C~_{2n+1} = 2 (2 pi i)^n n! / (2n+1)!
cd odd_constant(int k);

/// sum over permutations rho of sign(rho) Tr_vol(lead * F_{rho(1)} ... F_{rho(m)}),
/// restricted to the bulk rows of `geometry`. `lead` may be null.
cd antisymmetrized_trace(const OperatorSample& geometry, const CMat* lead, const std::vector<CMat>& factors);

struct PairingOptions {
  double round_tol = 0.05;
};

InvariantReport chern_even(const OperatorSample& P, const std::vector<int>& dirs, const PairingOptions& opt = {});

struct OddOptions {
  double round_tol = 0.05;
  /// Attach the Fredholm oracle for a single direction (cut at the window
  /// centre, shifted off the lattice) and report raw/oracle.
  bool with_oracle = true;
  std::optional<double> cut;
};

InvariantReport winding_odd(const OperatorSample& U, const std::vector<int>& dirs, const OddOptions& opt = {});

/// Chern/winding formula summed over permutations of J only.
InvariantReport weak_invariant(const OperatorSample& A, const std::vector<int>& J, const OddOptions& opt = {});

struct FredholmOptions {
  /// Singular values below rel_threshold * max count as approximate kernel.
  double rel_threshold = 0.25;
  /// Kernel vectors are weighed on sites within this distance of the defect
  /// (origin or cut); default a quarter of the smallest window side.
  std::optional<double> radius;
  /// Orthonormal basis of ran P, if already known.
  const CMat* range_basis = nullptr;
};

struct FredholmResult {
  long index = 0;
  double localized = 0;  // unrounded localized ker - coker
  std::vector<double> small_singular_values;
  double next_singular_value = 0;
  std::size_t kernel_count = 0;
  std::size_t cokernel_count = 0;
};

/// Index of P F+ P on ran P with F+ = (x1 - x01 + i(x2 - x02)) / |x - x0|.
FredholmResult fredholm_even(const OperatorSample& P, const Vec& origin, const FredholmOptions& opt = {});
/// Midpoint between consecutive site coordinates along `dir` closest to target.
double off_lattice_cut(const OperatorSample& A, int dir, double target);
/// Index of Pi U Pi + (1 - Pi), Pi = indicator(x_dir >= cut).
FredholmResult fredholm_odd(const OperatorSample& U, int dir, double cut, const FredholmOptions& opt = {});

struct Z2Options {
  double kernel_tol_rel = 1e-6;
  /// Count kernel weight inside this region only (one boundary of a finite sample).
  std::optional<Box> region;
};

struct Z2Result {
  int value = 0;
  long kernel_dim = 0;
  double localized = 0;
  std::vector<double> small_singular_values;
  double symmetry_defect = 0;
};

Z2Result z2_index(const OperatorSample& F, const SymmetryOperator& symmetry, const Z2Options& opt = {});

double sobolev_norm(const OperatorSample& A, int order, int power);

struct ResidueResult {
  int d = 0;
  std::vector<double> s_values;
  std::vector<double> values;  // (s - d) * (sum + tail)
  double extrapolated = 0;
  double target = 0;  // Vol(S^{d-1})
  double relative_error = 0;
  double radius = 0;
  std::size_t points = 0;
};

/// Residue at s = d of sum_x (1+|x|^2)^{-s/2} over Z^d in the ball of radius
/// `radius`, with an empirical-density tail correction and polynomial
/// extrapolation in s - d.
ResidueResult residue_check(const DeloneSet& set, const std::vector<double>& s_values);

double sphere_volume(int d);

}  // namespace aperio
