#pragma once

#include "aperio/groupoid.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace aperio {

struct Gap {
  double lo = 0;
  double hi = 0;
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double E) const { return E > lo && E < hi; }
};

struct GapOptions {
  /// Gaps narrower than this fraction of the bulk spectral width are ignored.
  double gap_floor = 0.02;
  /// An eigenvector counts as bulk when its weight on bulk sites is at least
  /// this fraction of the bulk site fraction.
  double bulk_weight = 0.5;
};

struct SpectralData {
  RVec eigenvalues;
  CMat eigenvectors;
  std::vector<Gap> gaps;  // bulk gaps, ascending
  std::optional<Gap> gap;  // selected gap
  double fermi_level = 0;
  bool gapless = true;
  double width = 0;
};

enum class SymmetryKind { chiral, time_reversal, particle_hole };

struct SymmetryOperator {
  SymmetryKind kind = SymmetryKind::chiral;
  CMat matrix;  // q x q
  bool antilinear = false;

  static SymmetryOperator chiral(CMat m) { return {SymmetryKind::chiral, std::move(m), false}; }
  static SymmetryOperator time_reversal(CMat m) { return {SymmetryKind::time_reversal, std::move(m), true}; }
  static SymmetryOperator particle_hole(CMat m) { return {SymmetryKind::particle_hole, std::move(m), true}; }
};

/// || S H S^-1 -/+ H ||_max with the sign the symmetry class requires.
double symmetry_defect(const OperatorSample& H, const SymmetryOperator& S);

/// amp_floor used to derive the default cutoff ln(1/amp_floor)/beta.
inline constexpr double amp_floor = 1e-8;

struct ModelOptions {
  std::optional<double> bulk_margin;
  std::optional<Vec> period;
};

OperatorSample exp_hopping(const DeloneSet& set, double beta, const MagneticCocycle& B,
                           std::optional<double> cutoff = std::nullopt, const ModelOptions& opt = {});
OperatorSample nn_hofstadter(const DeloneSet& set, double t, const MagneticCocycle& B, double nn_radius,
                             const ModelOptions& opt = {});

/// Hopping entries are tensored with hop(disp); `onsite` is added on the
/// diagonal on top of the scalar diagonal entry of `model`.
OperatorSample with_internal(const OperatorSample& model, const CMat& onsite,
                             const std::function<CMat(const Vec& disp)>& hop);
/// Single hop matrix: lexicographically positive displacements use `hop`,
/// negative ones hop^*, so the result stays Hermitian.
OperatorSample with_internal(const OperatorSample& model, const CMat& onsite, const CMat& hop);

/// SSH chain on a d=1 sample: intra-cell v, inter-cell w.
OperatorSample ssh_model(const DeloneSet& chain, double v, double w, const ModelOptions& opt = {});
/// Qi-Wu-Zhang model, gapless for m in {0, 2, 4}.
OperatorSample qwz_model(const DeloneSet& set, double m, const MagneticCocycle& B, const ModelOptions& opt = {});
/// Kitaev chain in Bogoliubov-de Gennes form (class D).
OperatorSample kitaev_model(const DeloneSet& chain, double mu, double t, double delta, const ModelOptions& opt = {});

SymmetryOperator ssh_chirality();
SymmetryOperator kitaev_particle_hole();

/// Direct sum H (+) H' on the same sites (internal dimension adds).
OperatorSample direct_sum(const OperatorSample& A, const OperatorSample& C);

std::vector<Gap> find_gaps(const RVec& eigenvalues, const CMat& vectors, const OperatorSample& H,
                           const GapOptions& opt, double* width = nullptr);
SpectralData spectral_gap(const OperatorSample& H, double E_hint, const GapOptions& opt = {});
/// Reuse a decomposition and select the gap containing (or nearest) E_hint.
SpectralData select_gap(SpectralData sd, double E_hint);

/// Trace per bulk site of the spectral projection below E (integrated density
/// of states with boundary states discarded).
double bulk_density(const SpectralData& sd, const OperatorSample& H, double E);

struct GapTrack {
  std::vector<double> t;
  std::vector<Gap> path;        // gap followed at each t
  std::vector<double> density;  // bulk_density of the followed gap, from t = 0
  bool open = false;            // reached t = 1 without closing
  std::optional<SpectralData> end;
};

/// Follows `gap` of H0 along (1 - t) H0 + t H1, t = k / steps. At each step the
/// gap whose bulk density is closest to the previous one is kept; the track
/// stops when no gap lies within `density_tol`.
GapTrack track_gap(const OperatorSample& H0, const OperatorSample& H1, const Gap& gap, int steps,
                   const GapOptions& opt = {}, double density_tol = 0.02);

OperatorSample fermi_projection(const SpectralData& sd, const OperatorSample& like);
/// Columns of eigenvectors below the Fermi level.
CMat occupied_basis(const SpectralData& sd);

/// C^1 cubic smoothstep: 0 below the gap, 1 above.
struct GapFunction {
  double lo = 0;
  double hi = 1;
  double operator()(double E) const;
};
GapFunction smooth_gap_function(const Gap& gap);

/// Off-diagonal block of 1/2(1-R_C)(1-2P_F)1/2(1+R_C) in the R_C eigenbasis.
OperatorSample fermi_unitary(const OperatorSample& H, const SymmetryOperator& R_C);

}  // namespace aperio
