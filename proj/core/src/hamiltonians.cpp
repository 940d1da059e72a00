#include "aperio/hamiltonians.hpp"

#include "aperio/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aperio {

namespace {

bool lex_positive(const Vec& d) {
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    if (d(k) > 1e-12) return true;
    if (d(k) < -1e-12) return false;
  }
  return false;
}

CMat pauli(char which) {
  CMat s = CMat::Zero(2, 2);
  switch (which) {
    case 'x':
      s(0, 1) = s(1, 0) = 1;
      break;
    case 'y':
      s(0, 1) = cd(0, -1);
      s(1, 0) = cd(0, 1);
      break;
    case 'z':
      s(0, 0) = 1;
      s(1, 1) = -1;
      break;
    default:
      s.setIdentity();
  }
  return s;
}

RepresentOptions rep_opts(const ModelOptions& opt) {
  RepresentOptions r;
  r.bulk_margin = opt.bulk_margin;
  r.period = opt.period;
  return r;
}

template <class F>
void for_each_block(const OperatorSample& H, F&& f) {
  const int q = H.q;
  for (std::size_t j = 0; j < H.n_sites(); ++j)
    for (std::size_t i = 0; i < H.n_sites(); ++i)
      f(i, j, H.matrix.block(static_cast<Eigen::Index>(i) * q, static_cast<Eigen::Index>(j) * q, q, q));
}

}  // namespace

double symmetry_defect(const OperatorSample& H, const SymmetryOperator& S) {
  if (S.matrix.rows() != H.q) throw InvalidArgument("symmetry operator has wrong internal dimension");
  const CMat& s = S.matrix;
  double sign = S.kind == SymmetryKind::time_reversal ? -1.0 : 1.0;  // defect of S H S^-1 + sign*H
  double worst = 0;
  for_each_block(H, [&](std::size_t, std::size_t, const auto& blk) {
    CMat b = blk;
    if (b.cwiseAbs().maxCoeff() == 0) return;
    CMat img = S.antilinear ? CMat(s * b.conjugate() * s.adjoint()) : CMat(s * b * s.adjoint());
    worst = std::max(worst, (img + sign * b).cwiseAbs().maxCoeff());
  });
  return worst;
}

OperatorSample exp_hopping(const DeloneSet& set, double beta, const MagneticCocycle& B, std::optional<double> cutoff,
                           const ModelOptions& opt) {
  if (!(beta > 0)) throw InvalidArgument("exp_hopping: beta must be positive");
  double c = cutoff ? *cutoff : std::log(1 / amp_floor) / beta;
  OperatorSample H = represent(set, exp_kernel(beta, c), B, rep_opts(opt));
  if (c < 2 * set.r()) H.warnings.push_back("cutoff below 2r: no hopping");
  return H;
}

OperatorSample nn_hofstadter(const DeloneSet& set, double t, const MagneticCocycle& B, double nn_radius,
                             const ModelOptions& opt) {
  return represent(set, nn_kernel(t, nn_radius), B, rep_opts(opt));
}

OperatorSample with_internal(const OperatorSample& model, const CMat& onsite,
                             const std::function<CMat(const Vec&)>& hop) {
  if (model.q != 1) throw InvalidArgument("with_internal: model must have q = 1");
  const int q = static_cast<int>(onsite.rows());
  if (q < 1 || onsite.cols() != q) throw InvalidArgument("with_internal: onsite must be square");
  const auto N = static_cast<Eigen::Index>(model.n_sites());
  OperatorSample out = model.with_matrix(CMat::Zero(N * q, N * q));
  out.q = q;
  for (Eigen::Index j = 0; j < N; ++j)
    for (Eigen::Index i = 0; i < N; ++i) {
      cd a = model.matrix(i, j);
      if (i == j) {
        out.matrix.block(i * q, j * q, q, q) = a * CMat::Identity(q, q) + onsite;
      } else if (a != 0.0) {
        CMat h = hop(model.displacement(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
        if (h.rows() != q || h.cols() != q) throw InvalidArgument("with_internal: hop dimension mismatch");
        out.matrix.block(i * q, j * q, q, q) = a * h;
      }
    }
  return out;
}

OperatorSample with_internal(const OperatorSample& model, const CMat& onsite, const CMat& hop) {
  CMat hop_adj = hop.adjoint();
  return with_internal(model, onsite, [&](const Vec& d) { return lex_positive(d) ? hop : hop_adj; });
}

OperatorSample ssh_model(const DeloneSet& chain, double v, double w, const ModelOptions& opt) {
  if (chain.dimension() != 1) throw InvalidArgument("ssh_model: chain must be one-dimensional");
  OperatorSample base = nn_hofstadter(chain, 1.0, MagneticCocycle(1), 2 * chain.R() * (1 + 1e-9), opt);
  CMat onsite = v * pauli('x');
  CMat hop = CMat::Zero(2, 2);
  hop(1, 0) = w;
  return with_internal(base, onsite, hop);
}

OperatorSample qwz_model(const DeloneSet& set, double m, const MagneticCocycle& B, const ModelOptions& opt) {
  if (set.dimension() != 2) throw InvalidArgument("qwz_model: set must be two-dimensional");
  OperatorSample base = nn_hofstadter(set, 1.0, B, 2 * set.r() * (1 + 1e-9), opt);
  const cd I(0, 1);
  CMat T1 = 0.5 * (pauli('z') + I * pauli('x'));
  CMat T2 = 0.5 * (pauli('z') + I * pauli('y'));
  auto hop = [=](const Vec& d) -> CMat {
    if (std::abs(d(0)) > std::abs(d(1))) return d(0) > 0 ? T1 : CMat(T1.adjoint());
    return d(1) > 0 ? T2 : CMat(T2.adjoint());
  };
  return with_internal(base, (m - 2) * pauli('z'), hop);
}

OperatorSample kitaev_model(const DeloneSet& chain, double mu, double t, double delta, const ModelOptions& opt) {
  if (chain.dimension() != 1) throw InvalidArgument("kitaev_model: chain must be one-dimensional");
  OperatorSample base = nn_hofstadter(chain, 1.0, MagneticCocycle(1), 2 * chain.R() * (1 + 1e-9), opt);
  const cd I(0, 1);
  CMat hop = -t * pauli('z') - I * delta * pauli('y');
  return with_internal(base, -mu * pauli('z'), hop);
}

SymmetryOperator ssh_chirality() { return SymmetryOperator::chiral(pauli('z')); }
SymmetryOperator kitaev_particle_hole() { return SymmetryOperator::particle_hole(pauli('x')); }

OperatorSample direct_sum(const OperatorSample& A, const OperatorSample& C) {
  if (A.n_sites() != C.n_sites()) throw InvalidArgument("direct_sum: site mismatch");
  const int qa = A.q, qc = C.q, q = qa + qc;
  const auto N = static_cast<Eigen::Index>(A.n_sites());
  OperatorSample out = A.with_matrix(CMat::Zero(N * q, N * q));
  out.q = q;
  out.range = std::max(A.range, C.range);
  out.bulk_margin = std::max(A.bulk_margin, C.bulk_margin);
  for (Eigen::Index j = 0; j < N; ++j)
    for (Eigen::Index i = 0; i < N; ++i) {
      out.matrix.block(i * q, j * q, qa, qa) = A.matrix.block(i * qa, j * qa, qa, qa);
      out.matrix.block(i * q + qa, j * q + qa, qc, qc) = C.matrix.block(i * qc, j * qc, qc, qc);
    }
  return out;
}

std::vector<Gap> find_gaps(const RVec& eigenvalues, const CMat& vectors, const OperatorSample& H,
                           const GapOptions& opt, double* width) {
  std::vector<double> kept;
  auto bulk = H.basis_indices(H.bulk_sites());
  const bool filter = !bulk.empty() && static_cast<Eigen::Index>(bulk.size()) < H.dim() && vectors.size() > 0;
  const double frac = static_cast<double>(bulk.size()) / static_cast<double>(std::max<Eigen::Index>(1, H.dim()));
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    if (filter) {
      double w = 0;
      for (Eigen::Index b : bulk) w += std::norm(vectors(b, k));
      if (w < opt.bulk_weight * frac) continue;
    }
    kept.push_back(eigenvalues(k));
  }
  std::vector<Gap> gaps;
  if (kept.size() < 2) {
    if (width) *width = 0;
    return gaps;
  }
  const double w = kept.back() - kept.front();
  if (width) *width = w;
  for (std::size_t i = 0; i + 1 < kept.size(); ++i)
    if (kept[i + 1] - kept[i] >= opt.gap_floor * w && kept[i + 1] - kept[i] > 0) gaps.push_back({kept[i], kept[i + 1]});
  return gaps;
}

SpectralData select_gap(SpectralData sd, double E_hint) {
  sd.gap.reset();
  sd.gapless = sd.gaps.empty();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : sd.gaps) {
    double dist = g.contains(E_hint) ? 0.0 : std::min(std::abs(E_hint - g.lo), std::abs(E_hint - g.hi));
    if (dist < best) {
      best = dist;
      sd.gap = g;
    }
  }
  if (sd.gap) sd.fermi_level = sd.gap->mid();
  return sd;
}

SpectralData spectral_gap(const OperatorSample& H, double E_hint, const GapOptions& opt) {
  if (hermitian_defect(H.matrix) > 1e-10 * std::max(1.0, H.matrix.cwiseAbs().maxCoeff()))
    throw InvalidArgument("spectral_gap: operator is not Hermitian");
  auto e = eigh(H.matrix);
  SpectralData sd;
  sd.gaps = find_gaps(e.values, e.vectors, H, opt, &sd.width);
  sd.eigenvalues = std::move(e.values);
  sd.eigenvectors = std::move(e.vectors);
  return select_gap(std::move(sd), E_hint);
}

double bulk_density(const SpectralData& sd, const OperatorSample& H, double E) {
  auto bulk = H.basis_indices(H.bulk_sites());
  if (bulk.empty()) throw InvalidArgument("bulk_density: sample has no bulk sites");
  double w = 0;
  for (Eigen::Index k = 0; k < sd.eigenvalues.size() && sd.eigenvalues(k) < E; ++k)
    for (Eigen::Index b : bulk) w += std::norm(sd.eigenvectors(b, k));
  return w * H.q / static_cast<double>(bulk.size());
}

GapTrack track_gap(const OperatorSample& H0, const OperatorSample& H1, const Gap& gap, int steps,
                   const GapOptions& opt, double density_tol) {
  if (steps < 1) throw InvalidArgument("track_gap: steps must be positive");
  if (H0.sites.size() != H1.sites.size() || H0.q != H1.q || H0.dim() != H1.dim())
    throw InvalidArgument("track_gap: operators live on different samples");
  for (std::size_t i = 0; i < H0.sites.size(); ++i)
    if ((H0.sites[i] - H1.sites[i]).norm() > 1e-12) throw InvalidArgument("track_gap: operators live on different samples");
  GapTrack tr;
  auto at = [&](double t) {
    OperatorSample Ht = H0.with_matrix((1 - t) * H0.matrix + t * H1.matrix);
    Ht.range = std::max(H0.range, H1.range);
    Ht.bulk_margin = std::max(H0.bulk_margin, H1.bulk_margin);
    return Ht;
  };
  double prev = bulk_density(spectral_gap(H0, gap.mid(), opt), at(0), gap.mid());
  tr.density.push_back(prev);
  for (int k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    OperatorSample Ht = at(t);
    SpectralData sd = spectral_gap(Ht, gap.mid(), opt);
    std::optional<Gap> next;
    double best = density_tol;
    for (const auto& g : sd.gaps) {
      const double d = std::abs(bulk_density(sd, Ht, g.mid()) - prev);
      if (d < best) {
        best = d;
        next = g;
      }
    }
    if (!next) return tr;
    tr.t.push_back(t);
    tr.path.push_back(*next);
    prev = bulk_density(sd, Ht, next->mid());
    tr.density.push_back(prev);
    if (k == steps) {
      tr.open = true;
      tr.end = select_gap(std::move(sd), next->mid());
    }
  }
  return tr;
}

CMat occupied_basis(const SpectralData& sd) {
  if (sd.gapless || !sd.gap) throw GaplessError("no spectral gap: Fermi projection undefined");
  Eigen::Index m = 0;
  while (m < sd.eigenvalues.size() && sd.eigenvalues(m) < sd.fermi_level) ++m;
  return sd.eigenvectors.leftCols(m);
}

OperatorSample fermi_projection(const SpectralData& sd, const OperatorSample& like) {
  CMat V = occupied_basis(sd);
  OperatorSample P = like.with_matrix(V * V.adjoint());
  return P;
}

double GapFunction::operator()(double E) const {
  double t = std::clamp((E - lo) / (hi - lo), 0.0, 1.0);
  return t * t * (3 - 2 * t);
}

GapFunction smooth_gap_function(const Gap& gap) {
  if (!(gap.hi > gap.lo)) throw InvalidArgument("smooth_gap_function: empty gap");
  return GapFunction{gap.lo, gap.hi};
}

OperatorSample fermi_unitary(const OperatorSample& H, const SymmetryOperator& R_C) {
  if (R_C.kind != SymmetryKind::chiral) throw InvalidArgument("fermi_unitary needs a chiral symmetry");
  const double scale = std::max(1.0, H.matrix.cwiseAbs().maxCoeff());
  double defect = symmetry_defect(H, R_C);
  if (defect > 1e-10 * scale)
    throw NumericalError("fermi_unitary: R_C H R_C != -H (defect " + std::to_string(defect) + ")");
  const int q = H.q;
  auto r = eigh(R_C.matrix);
  std::vector<Eigen::Index> plus, minus;
  for (Eigen::Index k = 0; k < r.values.size(); ++k) {
    if (std::abs(std::abs(r.values(k)) - 1) > 1e-10) throw InvalidArgument("R_C is not a self-adjoint unitary");
    (r.values(k) > 0 ? plus : minus).push_back(k);
  }
  if (plus.size() != minus.size()) throw InvalidArgument("R_C eigenspaces have unequal dimension");
  const int h = q / 2;
  auto e = eigh(H.matrix);
  if (e.values.cwiseAbs().minCoeff() < 1e-10 * scale) throw GaplessError("fermi_unitary: zero is in the spectrum");
  // sign(H) = 1 - 2 P_F
  CMat S = spectral_function(e, [](double x) { return cd(x > 0 ? 1.0 : -1.0); });
  const auto N = static_cast<Eigen::Index>(H.n_sites());
  CMat Wp = CMat::Zero(N * q, N * h), Wm = CMat::Zero(N * q, N * h);
  for (Eigen::Index s = 0; s < N; ++s)
    for (int k = 0; k < h; ++k) {
      Wp.block(s * q, s * h + k, q, 1) = r.vectors.col(plus[static_cast<std::size_t>(k)]);
      Wm.block(s * q, s * h + k, q, 1) = r.vectors.col(minus[static_cast<std::size_t>(k)]);
    }
  OperatorSample U = H.with_matrix(Wm.adjoint() * S * Wp);
  U.q = h;
  double ud = unitarity_defect(U.matrix);
  if (ud > 1e-8) throw NumericalError("fermi_unitary: unitarity defect " + std::to_string(ud));
  return U;
}

}  // namespace aperio
