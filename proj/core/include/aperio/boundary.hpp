#pragma once

#include "aperio/hamiltonians.hpp"
#include "aperio/invariants.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace aperio {

struct HalfSpaceModel {
  int dir = 0;
  double cut = 0;
  double eps = 0;
  std::vector<std::size_t> retained;  // parent site indices
  OperatorSample compressed;          // Pi H Pi on retained sites
  /// Window of the retained region; its lower face along `dir` is the cut.
  Box region;
};

/// Pi_d H Pi_d with Pi_d = chi_+(x_dir - cut); eps = 0 is the sharp cut.
HalfSpaceModel half_space(const OperatorSample& H, int dir, double cut, double eps = 0);

struct EdgeState {
  double energy = 0;
  double localization = 0;  // weight within `depth` of a boundary face
  double cut_weight = 0;    // weight within `depth` of the cut
  Vec position;             // weighted mean position
};

struct BoundaryUnitary {
  OperatorSample u;
  double unitarity_defect = 0;
  /// (distance from the cut, max row norm of u - 1 among sites at that distance)
  std::vector<std::pair<double, double>> decay_profile;
  std::vector<EdgeState> edge_spectrum;  // eigenvalues of the compression inside the gap
};

/// u = exp(2 pi i f(Pi H Pi)).
BoundaryUnitary boundary_unitary(const HalfSpaceModel& hs, const GapFunction& f);

struct BoundaryOptions {
  /// Slab width w_b along the cut direction; default 2 * hopping range.
  std::optional<double> slab_width;
  /// Sites closer than this to the lateral faces are dropped.
  double lateral_margin = 10;
  double round_tol = 0.05;
};

/// Dictionary between the odd pairing constant and the Toeplitz index,
/// raw / index, measured on the shift (C~_1 = 2, index of the shift = -1).
inline constexpr double odd_dictionary_ratio = -2.0;

/// C~_{|dirs|} sum sign Tr(u^* d u ...) per boundary site in the slab at the cut.
/// details["index_normalized"] = raw / odd_dictionary_ratio; details["doubled"]
/// carries the value for twice the slab width.
InvariantReport boundary_invariant(const HalfSpaceModel& hs, const BoundaryUnitary& bu, const std::vector<int>& dirs,
                                   const BoundaryOptions& opt = {});

struct ZeroModeCount {
  long per_boundary = 0;       // rounded weight of in-window modes at the cut
  double cut_weight = 0;
  std::size_t modes_in_window = 0;
  std::size_t localized_modes = 0;
  std::vector<EdgeState> modes;
};

/// Eigenvalues of the compression inside (E_lo, E_hi) whose eigenvectors sit
/// within `depth` of the sample boundary (score > 0.9).
ZeroModeCount zero_mode_count(const HalfSpaceModel& hs, double E_lo, double E_hi, double depth = 6);

struct BulkBoundaryReport {
  int dimension = 0;
  InvariantReport bulk;
  std::optional<InvariantReport> boundary;
  std::optional<ZeroModeCount> zero_modes;
  int sign = -1;
  double boundary_value = 0;  // value compared against the bulk
  double difference = 0;
  bool agree = false;
  /// Spectrum of the boundary compression with localization (even case).
  std::vector<EdgeState> edge_states;
  nlohmann::json details = nlohmann::json::object();
};

struct BulkBoundaryOptions {
  int dir = 1;                       // cut direction (d = 2)
  std::optional<double> cut;         // default: off-lattice midline
  std::optional<double> bulk_margin;
  BoundaryOptions boundary;
  double tol = 0.1;
  GapOptions gaps;
};

/// d = 2: bulk Chern of the parent vs the boundary invariant of the half plane,
/// checked against <[p],[lambda_d]> = -<d[p],[lambda_{d-1}]>.
BulkBoundaryReport bulk_boundary_even(const OperatorSample& H, double E_hint, const BulkBoundaryOptions& opt = {});
/// d = 1 chiral: |winding oracle| of the ring U_F vs zero modes per boundary of
/// the open half chain.
BulkBoundaryReport bulk_boundary_odd(const OperatorSample& H_ring, const OperatorSample& H_open,
                                     const SymmetryOperator& R_C, double cut, double depth = 6);

}  // namespace aperio
