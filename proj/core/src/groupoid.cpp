#include "aperio/groupoid.hpp"

#include "aperio/error.hpp"
#include "aperio/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace aperio {

// ---------------------------------------------------------------- OperatorSample

Vec OperatorSample::displacement(std::size_t from, std::size_t to) const {
  Vec d = sites[to] - sites[from];
  if (period) {
    for (Eigen::Index k = 0; k < d.size(); ++k) {
      double L = (*period)(k);
      if (L > 0) d(k) -= L * std::round(d(k) / L);
    }
  }
  return d;
}

std::vector<std::size_t> OperatorSample::bulk_sites() const {
  std::vector<std::size_t> out;
  Box bw = bulk_window();
  for (std::size_t i = 0; i < sites.size(); ++i)
    if (bw.contains(sites[i], 1e-9)) out.push_back(i);
  return out;
}

std::vector<Eigen::Index> OperatorSample::basis_indices(const std::vector<std::size_t>& subset) const {
  std::vector<Eigen::Index> out;
  out.reserve(subset.size() * q);
  for (std::size_t s : subset)
    for (int k = 0; k < q; ++k) out.push_back(static_cast<Eigen::Index>(s) * q + k);
  return out;
}

OperatorSample OperatorSample::with_matrix(CMat m) const {
  OperatorSample o;
  o.dimension = dimension;
  o.sites = sites;
  o.q = q;
  o.window = window;
  o.bulk_margin = bulk_margin;
  o.range = range;
  o.period = period;
  o.boundary_affected = boundary_affected;
  o.warnings = warnings;
  o.matrix = std::move(m);
  return o;
}

OperatorSample OperatorSample::with_margin(double margin) const {
  OperatorSample o = with_matrix(matrix);
  o.bulk_margin = margin;
  return o;
}

// ---------------------------------------------------------------- cocycle

MagneticCocycle::MagneticCocycle(int d) : B_(Eigen::MatrixXd::Zero(d, d)) {}

MagneticCocycle::MagneticCocycle(Eigen::MatrixXd B) : B_(std::move(B)) {
  if (B_.rows() != B_.cols()) throw InvalidArgument("B must be square");
  if (skew_defect() > 1e-14 * std::max(1.0, B_.cwiseAbs().maxCoeff()))
    throw InvalidArgument("B must be skew-symmetric");
}

MagneticCocycle MagneticCocycle::from_flux(double phi) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2, 2);
  B(0, 1) = std::numbers::pi * phi;
  B(1, 0) = -B(0, 1);
  return MagneticCocycle(B);
}

MagneticCocycle MagneticCocycle::unchecked(Eigen::MatrixXd B) {
  MagneticCocycle m;
  m.B_ = std::move(B);
  return m;
}

cd MagneticCocycle::operator()(const Vec& x, const Vec& y) const {
  if (B_.size() == 0) return 1.0;
  double a = x.dot(B_ * y);
  return std::polar(1.0, -a);
}

cd sigma(const MagneticCocycle& B, const Vec& x, const Vec& y) { return B(x, y); }

double check_2cocycle(const MagneticCocycle& B, const std::vector<Triple>& samples) {
  double worst = 0;
  for (const auto& [x, y, z] : samples) {
    cd lhs = B(x, y) * B(x + y, z);
    cd rhs = B(x, y + z) * B(y, z);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double normalization_defect(const MagneticCocycle& B, const std::vector<Vec>& samples) {
  double worst = 0;
  for (const auto& x : samples) worst = std::max(worst, std::abs(B(x, -x) - 1.0));
  return worst;
}

std::vector<Triple> random_triples(int d, std::size_t n, double scale, std::uint64_t seed) {
  Rng rng(child_seed(seed, 2));
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<Triple> out(n);
  for (auto& t : out)
    for (auto& v : t) {
      v.resize(d);
      for (int k = 0; k < d; ++k) v(k) = u(rng);
    }
  return out;
}

// ---------------------------------------------------------------- kernels

CovariantKernel identity_kernel(int q) {
  CovariantKernel k;
  k.name = "identity";
  k.q = q;
  k.amplitude = [q](const Patch*, const Vec& d) -> CMat {
    return d.norm() < 1e-12 ? CMat(CMat::Identity(q, q)) : CMat(CMat::Zero(q, q));
  };
  return k;
}

CovariantKernel shift_kernel(int power, double spacing) {
  CovariantKernel k;
  k.name = "shift";
  k.hop_range = std::abs(power) * spacing;
  k.hermitian = power == 0;
  const double target = -power * spacing;
  k.amplitude = [target, spacing](const Patch*, const Vec& d) -> CMat {
    CMat m(1, 1);
    m(0, 0) = std::abs(d(0) - target) < 1e-9 * spacing ? 1.0 : 0.0;
    return m;
  };
  return k;
}

CovariantKernel nn_kernel(double t, double nn_radius) {
  CovariantKernel k;
  k.name = "nn";
  k.hop_range = nn_radius;
  k.amplitude = [t, nn_radius](const Patch*, const Vec& d) -> CMat {
    double r = d.norm();
    CMat m(1, 1);
    m(0, 0) = (r > 1e-12 && r <= nn_radius) ? t : 0.0;
    return m;
  };
  return k;
}

CovariantKernel exp_kernel(double beta, double cutoff) {
  CovariantKernel k;
  k.name = "exp";
  k.hop_range = cutoff;
  k.amplitude = [beta, cutoff](const Patch*, const Vec& d) -> CMat {
    double r = d.norm();
    CMat m(1, 1);
    m(0, 0) = (r > 1e-12 && r <= cutoff) ? std::exp(-beta * r) : 0.0;
    return m;
  };
  return k;
}

CovariantKernel two_length_kernel(double t_short, double t_long, double threshold, double nn_radius) {
  CovariantKernel k;
  k.name = "two_length";
  k.hop_range = nn_radius;
  k.amplitude = [=](const Patch*, const Vec& d) -> CMat {
    double r = d.norm();
    CMat m(1, 1);
    m(0, 0) = (r > 1e-12 && r <= nn_radius) ? (r < threshold ? t_short : t_long) : 0.0;
    return m;
  };
  return k;
}

// ---------------------------------------------------------------- representation

OperatorSample represent(const DeloneSet& set, const CovariantKernel& kernel, const MagneticCocycle& B,
                         const RepresentOptions& opt) {
  if (!kernel.amplitude) throw InvalidArgument("kernel has no amplitude rule");
  const int d = set.dimension();
  const int q = kernel.q;
  if (!B.is_zero() && B.dimension() != d) throw InvalidArgument("cocycle dimension mismatch");
  if (opt.period && !B.is_zero()) throw InvalidArgument("wrapped samples require B = 0");
  const std::size_t N = set.size();

  OperatorSample out;
  out.dimension = d;
  out.sites = set.points();
  out.q = q;
  out.window = set.window();
  out.period = opt.period;
  out.boundary_affected.assign(N, false);
  out.matrix = CMat::Zero(static_cast<Eigen::Index>(N) * q, static_cast<Eigen::Index>(N) * q);

  std::vector<Patch> patches;
  const double reach = std::max(kernel.hop_range, kernel.pattern_radius);
  for (std::size_t i = 0; i < N; ++i)
    if (!opt.period && !set.window().contains_ball(set[i], reach, 1e-12)) out.boundary_affected[i] = true;
  if (kernel.pattern_dependent) {
    patches.reserve(N);
    for (std::size_t i = 0; i < N; ++i) patches.push_back(clipped_patch_at(set, i, kernel.pattern_radius, nullptr));
  }

  double range = 0;
  auto put = [&](std::size_t i, std::size_t j, const Vec& disp) {
    CMat a = kernel.amplitude(kernel.pattern_dependent ? &patches[i] : nullptr, disp);
    if (a.rows() != q || a.cols() != q) throw InvalidArgument("kernel amplitude has wrong block size");
    if (a.cwiseAbs().maxCoeff() == 0) return;
    range = std::max(range, disp.norm());
    out.matrix.block(static_cast<Eigen::Index>(i) * q, static_cast<Eigen::Index>(j) * q, q, q) = a;
  };
  for (std::size_t i = 0; i < N; ++i) {
    if (opt.period) {
      for (std::size_t j = 0; j < N; ++j) {
        Vec disp = out.displacement(i, j);
        if (disp.norm() <= kernel.hop_range + opt.tol) put(i, j, disp);
      }
    } else {
      for (std::size_t j : set.within(set[i], kernel.hop_range + opt.tol)) put(i, j, set[j] - set[i]);
    }
  }
  if (kernel.hermitian) {
    double scale = std::max(1.0, out.matrix.cwiseAbs().maxCoeff());
    if (hermitian_defect(out.matrix) > 1e-12 * scale)
      throw InvalidArgument("kernel '" + kernel.name + "' violates Hermitian symmetry");
  }
  if (!B.is_zero()) {
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j : set.within(set[i], kernel.hop_range + opt.tol)) {
        cd ph = B(set[i], set[j]);
        out.matrix.block(static_cast<Eigen::Index>(i) * q, static_cast<Eigen::Index>(j) * q, q, q) *= ph;
      }
  }
  out.range = range;
  out.bulk_margin = opt.bulk_margin ? *opt.bulk_margin : opt.period ? 0.0 : 2 * range + 2 * set.R();
  return out;
}

OperatorSample convolve(const OperatorSample& A, const OperatorSample& C) {
  if (A.q != C.q || A.sites.size() != C.sites.size()) throw InvalidArgument("convolve: site mismatch");
  for (std::size_t i = 0; i < A.sites.size(); ++i)
    if ((A.sites[i] - C.sites[i]).norm() > 1e-12) throw InvalidArgument("convolve: site mismatch");
  OperatorSample out = A.with_matrix(A.matrix * C.matrix);
  out.range = A.range + C.range;
  out.bulk_margin = std::max(A.bulk_margin, C.bulk_margin) + A.range + C.range;
  for (std::size_t i = 0; i < out.boundary_affected.size() && i < C.boundary_affected.size(); ++i)
    out.boundary_affected[i] = out.boundary_affected[i] || C.boundary_affected[i];
  return out;
}

OperatorSample adjoint(const OperatorSample& A) { return A.with_matrix(A.matrix.adjoint()); }

std::vector<OperatorSample> position_operators(const OperatorSample& A, const Vec& origin) {
  std::vector<OperatorSample> out;
  for (int j = 0; j < A.dimension; ++j) {
    CMat X = CMat::Zero(A.dim(), A.dim());
    for (std::size_t s = 0; s < A.n_sites(); ++s)
      for (int k = 0; k < A.q; ++k) X(static_cast<Eigen::Index>(s) * A.q + k, static_cast<Eigen::Index>(s) * A.q + k) =
          A.sites[s](j) - origin(j);
    OperatorSample x = A.with_matrix(std::move(X));
    x.range = 0;
    out.push_back(std::move(x));
  }
  return out;
}

CMat derivation_matrix(const OperatorSample& A, int j) {
  if (j < 0 || j >= A.dimension) throw InvalidArgument("derivation: direction out of range");
  const Eigen::Index n = A.dim();
  const int q = A.q;
  CMat D(n, n);
  if (!A.period) {
    RVec c(n);
    for (Eigen::Index a = 0; a < n; ++a) c(a) = A.sites[static_cast<std::size_t>(a / q)](j);
    for (Eigen::Index b = 0; b < n; ++b)
      for (Eigen::Index a = 0; a < n; ++a) D(a, b) = (c(a) - c(b)) * A.matrix(a, b);
    return D;
  }
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index a = 0; a < n; ++a) {
      // x_j - y_j = -(displacement from x to y)_j
      double w = -A.displacement(static_cast<std::size_t>(a / q), static_cast<std::size_t>(b / q))(j);
      D(a, b) = w * A.matrix(a, b);
    }
  return D;
}

OperatorSample derivation(const OperatorSample& A, int j) { return A.with_matrix(derivation_matrix(A, j)); }

CVec magnetic_translation_phases(const OperatorSample& A, const MagneticCocycle& B, const Vec& a) {
  CVec ph(A.dim());
  for (std::size_t s = 0; s < A.n_sites(); ++s) {
    cd p = B.is_zero() ? cd(1.0) : std::polar(1.0, -a.dot(B.B() * A.sites[s]));
    for (int k = 0; k < A.q; ++k) ph(static_cast<Eigen::Index>(s) * A.q + k) = p;
  }
  return ph;
}

double covariance_defect(const OperatorSample& H, const OperatorSample& Ht, const MagneticCocycle& B, const Vec& a) {
  if (Ht.n_sites() != H.n_sites() || Ht.q != H.q) throw NumericalError("covariance check: site count changed");
  SpatialIndex idx(H.dimension, 1.0);
  for (const auto& x : Ht.sites) idx.insert(x);
  const double tol = 1e-9 * std::max(1.0, H.window.diameter());
  std::vector<Eigen::Index> perm(H.n_sites());
  for (std::size_t i = 0; i < H.n_sites(); ++i) {
    auto hit = idx.within(H.sites[i] - a, tol);
    if (hit.size() != 1) throw NumericalError("covariance check: translated site not found");
    perm[i] = static_cast<Eigen::Index>(hit.front());
  }
  CVec u = magnetic_translation_phases(H, B, a);
  const int q = H.q;
  double worst = 0;
  for (std::size_t j = 0; j < H.n_sites(); ++j)
    for (std::size_t i = 0; i < H.n_sites(); ++i)
      for (int k = 0; k < q; ++k)
        for (int l = 0; l < q; ++l) {
          const auto r = static_cast<Eigen::Index>(i) * q + k, c = static_cast<Eigen::Index>(j) * q + l;
          const cd conj = u(r) * H.matrix(r, c) * std::conj(u(c));
          worst = std::max(worst, std::abs(Ht.matrix(perm[i] * q + k, perm[j] * q + l) - conj));
        }
  return worst;
}

double covariance_defect(const DeloneSet& set, const CovariantKernel& kernel, const MagneticCocycle& B,
                         const Vec& a) {
  return covariance_defect(represent(set, kernel, B), represent(translate(set, a), kernel, B), B, a);
}

// ---------------------------------------------------------------- frames

Frame::Frame(int d, double eps, double pitch) : d_(d), eps_(eps), pitch_(pitch) {
  if (!(eps > 0) || !(pitch > 0)) throw InvalidArgument("frame: eps and pitch must be positive");
  if (pitch * std::sqrt(static_cast<double>(d)) / 2 >= support_frac_ * eps)
    throw InvalidArgument("frame: balls B(y; eps) with y in pitch*Z^d do not cover (need pitch*sqrt(d)/2 < 0.95 eps)");
}

double Frame::bump(double t) const {
  double s = t / support_frac_;
  if (s >= 1) return 0.0;
  double b = 1 - s * s;
  return b * b;
}

double Frame::norm2(const Vec& x) const {
  double acc = 0;
  for (const auto& [c, w] : weights(x)) acc += w * w;
  return acc;
}

std::vector<std::pair<Vec, double>> Frame::weights(const Vec& x) const {
  std::vector<std::pair<Vec, double>> raw;
  const double sup = support();
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int k = 0; k < d_; ++k) {
    lo[k] = static_cast<int>(std::ceil((x(k) - sup) / pitch_));
    hi[k] = static_cast<int>(std::floor((x(k) + sup) / pitch_));
  }
  std::array<int, 3> n = lo;
  double total = 0;
  for (n[0] = lo[0]; n[0] <= hi[0]; ++n[0])
    for (n[1] = lo[1]; n[1] <= hi[1]; ++n[1])
      for (n[2] = lo[2]; n[2] <= hi[2]; ++n[2]) {
        Vec c(d_);
        for (int k = 0; k < d_; ++k) c(k) = n[k] * pitch_;
        double b = bump((x - c).norm() / eps_);
        if (b > 0) {
          raw.emplace_back(c, b);
          total += b * b;
        }
      }
  double nrm = std::sqrt(total);
  for (auto& [c, w] : raw) w /= nrm;
  return raw;
}

double Frame::chi(const Vec& center, const Vec& x) const {
  for (const auto& [c, w] : weights(x))
    if ((c - center).norm() < 1e-9 * pitch_) return w;
  return 0.0;
}

double Frame::gram(const Vec& a, const Vec& b) const {
  if ((a - b).norm() >= 2 * support()) return 0.0;
  auto wa = weights(a);
  auto wb = weights(b);
  double acc = 0;
  for (const auto& [ca, va] : wa)
    for (const auto& [cb, vb] : wb)
      if ((ca - cb).norm() < 1e-9 * pitch_) acc += va * vb;
  return acc;
}

double Frame::local_unit(const Vec& x, double radius) const {
  double acc = 0;
  for (const auto& [c, w] : weights(x))
    if (c.norm() <= radius + 1e-12) acc += w * w;
  return acc;
}

Frame s_cover_frame(const DeloneSet& set, double eps, double lattice_pitch) {
  if (!(eps > 0) || eps >= set.r() / 2) throw InvalidArgument("s_cover_frame: need 0 < eps < r/2");
  return Frame(set.dimension(), eps, lattice_pitch);
}

FrameReport check_frame(const Frame& frame, const DeloneSet& set, double radius, const OperatorSample* sample) {
  FrameReport rep;
  for (std::size_t a = 0; a < set.size(); ++a) {
    std::map<std::vector<long>, std::size_t> per_center;
    for (std::size_t b : set.within(set[a], radius)) {
      Vec disp = set[b] - set[a];
      auto w = frame.weights(disp);
      double s = 0;
      for (const auto& [c, v] : w) {
        s += v * v;
        std::vector<long> key;
        for (Eigen::Index k = 0; k < c.size(); ++k) key.push_back(std::lround(c(k) / frame.pitch()));
        rep.max_per_fiber = std::max(rep.max_per_fiber, ++per_center[key]);
      }
      rep.partition_defect = std::max(rep.partition_defect, std::abs(s - 1.0));
    }
    ++rep.sites_checked;
  }
  rep.injective = rep.max_per_fiber <= 1;
  if (sample) rep.reconstruction_residual = frame_reconstruction_residual(frame, *sample, sample->range + frame.eps());
  return rep;
}

double frame_reconstruction_residual(const Frame& frame, const OperatorSample& A, double radius) {
  double worst = 0;
  const int q = A.q;
  for (std::size_t i = 0; i < A.n_sites(); ++i)
    for (std::size_t j = 0; j < A.n_sites(); ++j) {
      auto blk = A.matrix.block(static_cast<Eigen::Index>(i) * q, static_cast<Eigen::Index>(j) * q, q, q);
      double m = blk.cwiseAbs().maxCoeff();
      if (m == 0) continue;
      double u = frame.local_unit(A.displacement(i, j), radius);
      worst = std::max(worst, (1.0 - u) * m);
    }
  return worst;
}

}  // namespace aperio
