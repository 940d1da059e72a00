#pragma once

#include "aperio/delone.hpp"
#include "aperio/operator.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace aperio {

/// Constant magnetic field: sigma(x,y) = exp(-i <x, B y>).
class MagneticCocycle {
 public:
  MagneticCocycle() = default;
  /// Zero field in dimension d.
  explicit MagneticCocycle(int d);
  /// Throws unless B is skew-symmetric.
  explicit MagneticCocycle(Eigen::MatrixXd B);
  /// d=2 field with flux `phi` flux quanta per unit cell of Z^2
  /// (plaquette phase 2*pi*phi, i.e. B_12 = pi*phi).
  static MagneticCocycle from_flux(double phi);
  /// No skew-symmetry check; for diagnostics only.
  static MagneticCocycle unchecked(Eigen::MatrixXd B);

  int dimension() const { return static_cast<int>(B_.rows()); }
  const Eigen::MatrixXd& B() const { return B_; }
  bool is_zero() const { return B_.isZero(0.0); }
  double skew_defect() const { return (B_ + B_.transpose()).cwiseAbs().maxCoeff(); }

  cd operator()(const Vec& x, const Vec& y) const;

 private:
  Eigen::MatrixXd B_;
};

cd sigma(const MagneticCocycle& B, const Vec& x, const Vec& y);

using Triple = std::array<Vec, 3>;
/// max |sigma(x,y) sigma(x+y,z) - sigma(x,y+z) sigma(y,z)|.
double check_2cocycle(const MagneticCocycle& B, const std::vector<Triple>& samples);
/// max |sigma(x,-x) - 1|.
double normalization_defect(const MagneticCocycle& B, const std::vector<Vec>& samples);
std::vector<Triple> random_triples(int d, std::size_t n, double scale, std::uint64_t seed);

/// Finite-range covariant kernel: the block at (x,y) depends on the patch of
/// radius `pattern_radius` around x and on the displacement y - x.
struct CovariantKernel {
  std::string name;
  double hop_range = 0;
  double pattern_radius = 0;
  int q = 1;
  bool hermitian = true;
  bool pattern_dependent = false;
  /// q x q amplitude; `source` is null unless pattern_dependent.
  std::function<CMat(const Patch* source, const Vec& disp)> amplitude;
};

CovariantKernel identity_kernel(int q = 1);
/// U delta_x = delta_{x + power*spacing} on a one-dimensional lattice.
CovariantKernel shift_kernel(int power, double spacing = 1.0);
CovariantKernel nn_kernel(double t, double nn_radius);
CovariantKernel exp_kernel(double beta, double cutoff);
/// d=1 kernel with amplitude t_short / t_long by gap length (threshold between).
CovariantKernel two_length_kernel(double t_short, double t_long, double threshold, double nn_radius);

struct RepresentOptions {
  std::optional<double> bulk_margin;
  /// Wrap the window into a torus with these periods (requires B = 0).
  std::optional<Vec> period;
  double tol = 1e-12;
};

OperatorSample represent(const DeloneSet& set, const CovariantKernel& kernel, const MagneticCocycle& B,
                         const RepresentOptions& opt = {});

OperatorSample convolve(const OperatorSample& A, const OperatorSample& C);
OperatorSample adjoint(const OperatorSample& A);

std::vector<OperatorSample> position_operators(const OperatorSample& A, const Vec& origin);
/// Entries (x_j - y_j) A_xy.
OperatorSample derivation(const OperatorSample& A, int j);
CMat derivation_matrix(const OperatorSample& A, int j);

/// Diagonal phases exp(-i <a, B x>) per basis index.
CVec magnetic_translation_phases(const OperatorSample& A, const MagneticCocycle& B, const Vec& a);
/// max defect between Ht and U_a H U_a^*, where Ht lives on the translate of
/// H's sites by -a. Sites are matched by position, not by index.
double covariance_defect(const OperatorSample& H, const OperatorSample& Ht, const MagneticCocycle& B, const Vec& a);
/// max defect between represent(translate(set,a)) and U_a represent(set) U_a^*.
double covariance_defect(const DeloneSet& set, const CovariantKernel& kernel, const MagneticCocycle& B,
                         const Vec& a);

/// Smooth partition of unity chi_y, y in pitch*Z^d, with supp chi_y in B(y; eps)
/// and sum_y chi_y^2 = 1.
class Frame {
 public:
  Frame(int d, double eps, double pitch);

  int dimension() const { return d_; }
  double eps() const { return eps_; }
  double pitch() const { return pitch_; }
  double support() const { return support_frac_ * eps_; }

  /// (center, chi_center(x)) for all centers with chi nonzero at x.
  std::vector<std::pair<Vec, double>> weights(const Vec& x) const;
  double chi(const Vec& center, const Vec& x) const;
  /// sum_y chi_y(a) chi_y(b).
  double gram(const Vec& a, const Vec& b) const;
  /// u_I(x) = sum over centers with |y| <= radius of chi_y(x)^2.
  double local_unit(const Vec& x, double radius) const;

 private:
  double bump(double t) const;
  double norm2(const Vec& x) const;

  int d_;
  double eps_, pitch_;
  double support_frac_ = 0.95;
};

struct FrameReport {
  double partition_defect = 0;     // max |sum chi^2 - 1| over sampled displacements
  std::size_t max_per_fiber = 0;   // max sites of one fiber inside a single V_y
  bool injective = false;
  double reconstruction_residual = 0;
  std::size_t sites_checked = 0;
};

/// Checks the frame on the displacements realised by `set` up to `radius`
/// around every site; reconstruction is tested on `sample` if given.
Frame s_cover_frame(const DeloneSet& set, double eps, double lattice_pitch);
FrameReport check_frame(const Frame& frame, const DeloneSet& set, double radius,
                        const OperatorSample* sample = nullptr);
/// || u_I A - A || with (u_I A)_{xy} = u_I(y - x) A_{xy}, I = centers within `radius`.
double frame_reconstruction_residual(const Frame& frame, const OperatorSample& A, double radius);

}  // namespace aperio
