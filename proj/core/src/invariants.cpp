#include "aperio/invariants.hpp"

#include "aperio/error.hpp"
#include "aperio/groupoid.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

namespace aperio {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int permutation_sign(const std::vector<int>& p) {
  int inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inv;
  return inv % 2 ? -1 : 1;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

double min_side(const Box& b) { return (b.hi - b.lo).minCoeff(); }

std::vector<double> site_weights(const OperatorSample& A, const CMat& vectors, const std::vector<Eigen::Index>& rows) {
  std::vector<double> w(static_cast<std::size_t>(vectors.cols()), 0.0);
  for (Eigen::Index k = 0; k < vectors.cols(); ++k)
    for (Eigen::Index r : rows) w[static_cast<std::size_t>(k)] += std::norm(vectors(r, k));
  (void)A;
  return w;
}

// Right and left singular subspaces below the threshold are the low spectral
// subspaces of T^*T and TT^*.
FredholmResult localized_index(const OperatorSample& geom, const CMat& T, const CMat* embed,
                               const std::vector<std::size_t>& region, const FredholmOptions& opt) {
  FredholmResult res;
  if (T.size() == 0) return res;
  auto right_e = eigh(T.adjoint() * T);
  auto left_e = eigh(T * T.adjoint());
  const double smax2 = std::max(right_e.values.maxCoeff(), 0.0);
  const double thr2 = opt.rel_threshold * opt.rel_threshold * smax2;
  auto rows = geom.basis_indices(region);
  auto low_weights = [&](const EigenDecomposition& e, std::vector<double>& sv) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index k = 0; k < e.values.size(); ++k)
      if (e.values(k) < thr2) {
        cols.push_back(k);
        sv.push_back(std::sqrt(std::max(e.values(k), 0.0)));
      }
    CMat low(e.vectors.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) low.col(static_cast<Eigen::Index>(c)) = e.vectors.col(cols[c]);
    if (embed) low = *embed * low;
    return site_weights(geom, low, rows);
  };
  std::vector<double> sv_left;
  auto wr = low_weights(right_e, res.small_singular_values);
  auto wl = low_weights(left_e, sv_left);
  for (double w : wr) {
    res.localized += w;
    if (w > 0.5) ++res.kernel_count;
  }
  for (double w : wl) {
    res.localized -= w;
    if (w > 0.5) ++res.cokernel_count;
  }
  for (Eigen::Index k = 0; k < right_e.values.size(); ++k)
    if (right_e.values(k) >= thr2) {
      res.next_singular_value = std::sqrt(right_e.values(k));
      break;
    }
  res.index = std::lround(res.localized);
  return res;
}

}  // namespace

double off_lattice_cut(const OperatorSample& A, int dir, double target) {
  std::vector<double> c;
  for (const auto& s : A.sites) c.push_back(s(dir));
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }), c.end());
  if (c.size() < 2) throw InsufficientSample("off_lattice_cut: fewer than two distinct coordinates");
  double best = 0.5 * (c[0] + c[1]);
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    double m = 0.5 * (c[i] + c[i + 1]);
    if (std::abs(m - target) < std::abs(best - target)) best = m;
  }
  return best;
}

void InvariantReport::set_raw(cd value) {
  raw = value;
  rounded = std::lround(value.real());
  deviation = std::abs(value - cd(static_cast<double>(rounded), 0.0));
  within_tolerance = deviation < round_tol;
}

cd trace_per_unit_volume(const OperatorSample& A) {
  auto bulk = A.bulk_sites();
  if (bulk.empty()) throw InsufficientSample("trace_per_unit_volume: empty bulk window");
  cd acc = 0;
  for (Eigen::Index i : A.basis_indices(bulk)) acc += A.matrix(i, i);
  return acc / static_cast<double>(bulk.size());
}

cd chern_constant(int k) {
  if (k % 2) throw InvalidArgument("chern_constant: even degree expected");
  int n = k / 2;
  return std::pow(cd(0, -2 * std::numbers::pi), n) / factorial(n);
}

cd odd_constant(int k) {
  if (k % 2 == 0) throw InvalidArgument("odd_constant: odd degree expected");
  int n = (k - 1) / 2;
  return 2.0 * std::pow(cd(0, 2 * std::numbers::pi), n) * factorial(n) / factorial(2 * n + 1);
}

cd antisymmetrized_trace(const OperatorSample& geometry, const CMat* lead, const std::vector<CMat>& factors) {
  auto bulk = geometry.bulk_sites();
  if (bulk.empty()) throw InsufficientSample("empty bulk window");
  auto rows = geometry.basis_indices(bulk);
  const auto nb = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index n = geometry.dim();
  std::vector<int> perm(factors.size());
  std::iota(perm.begin(), perm.end(), 0);
  cd total = 0;
  do {
    const int sgn = permutation_sign(perm);
    // Leading product restricted to bulk rows.
    CMat R(nb, n);
    std::size_t start = 0;
    if (lead) {
      for (Eigen::Index r = 0; r < nb; ++r) R.row(r) = lead->row(rows[static_cast<std::size_t>(r)]);
    } else {
      for (Eigen::Index r = 0; r < nb; ++r) R.row(r) = factors[static_cast<std::size_t>(perm[0])].row(rows[static_cast<std::size_t>(r)]);
      start = 1;
    }
    if (start == factors.size()) {
      cd acc = 0;
      for (Eigen::Index r = 0; r < nb; ++r) acc += R(r, rows[static_cast<std::size_t>(r)]);
      total += static_cast<double>(sgn) * acc;
      continue;
    }
    for (std::size_t f = start; f + 1 < factors.size(); ++f) R = R * factors[static_cast<std::size_t>(perm[f])];
    const CMat& last = factors[static_cast<std::size_t>(perm.back())];
    cd acc = 0;
    for (Eigen::Index r = 0; r < nb; ++r)
      acc += (R.row(r).transpose().cwiseProduct(last.col(rows[static_cast<std::size_t>(r)]))).sum();
    total += static_cast<double>(sgn) * acc;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total / static_cast<double>(bulk.size());
}

InvariantReport chern_even(const OperatorSample& P, const std::vector<int>& dirs, const PairingOptions& opt) {
  if (dirs.empty() || dirs.size() % 2) throw InvalidArgument("chern_even: an even, nonzero number of directions is required");
  auto t0 = Clock::now();
  std::vector<CMat> D;
  for (int j : dirs) D.push_back(derivation_matrix(P, j));
  cd tr = antisymmetrized_trace(P, &P.matrix, D);
  InvariantReport rep;
  rep.name = "chern_even";
  rep.method = "formula";
  rep.round_tol = opt.round_tol;
  rep.set_raw(chern_constant(static_cast<int>(dirs.size())) * tr);
  rep.window = P.window;
  rep.bulk_margin = P.bulk_margin;
  rep.details["dirs"] = dirs;
  rep.details["trace"] = {tr.real(), tr.imag()};
  rep.details["imaginary_residue"] = rep.raw.imag();
  rep.details["idempotency_defect"] = (P.matrix * P.matrix - P.matrix).cwiseAbs().maxCoeff();
  rep.runtime_s = seconds_since(t0);
  return rep;
}

InvariantReport winding_odd(const OperatorSample& U, const std::vector<int>& dirs, const OddOptions& opt) {
  if (dirs.size() % 2 == 0) throw InvalidArgument("winding_odd: an odd number of directions is required");
  auto t0 = Clock::now();
  double ud = unitarity_defect(U.matrix);
  std::vector<CMat> M;
  CMat Uadj = U.matrix.adjoint();
  for (int j : dirs) M.push_back(Uadj * derivation_matrix(U, j));
  cd tr = antisymmetrized_trace(U, nullptr, M);
  InvariantReport rep;
  rep.name = "winding_odd";
  rep.method = "formula";
  rep.round_tol = opt.round_tol;
  rep.set_raw(odd_constant(static_cast<int>(dirs.size())) * tr);
  rep.window = U.window;
  rep.bulk_margin = U.bulk_margin;
  rep.details["dirs"] = dirs;
  rep.details["trace"] = {tr.real(), tr.imag()};
  rep.details["unitarity_defect"] = ud;
  if (ud > 1e-8) rep.details["warning"] = "unitarity defect above 1e-8";
  if (opt.with_oracle && dirs.size() == 1) {
    const int j = dirs[0];
    double cut = opt.cut ? *opt.cut : off_lattice_cut(U, j, 0.5 * (U.window.lo(j) + U.window.hi(j)));
    auto fo = fredholm_odd(U, j, cut);
    rep.oracle = fo.index;
    if (fo.index != 0) rep.ratio = rep.raw.real() / static_cast<double>(fo.index);
    rep.details["oracle_cut"] = cut;
    rep.details["oracle_localized"] = fo.localized;
  }
  rep.runtime_s = seconds_since(t0);
  return rep;
}

InvariantReport weak_invariant(const OperatorSample& A, const std::vector<int>& J, const OddOptions& opt) {
  InvariantReport rep;
  if (J.size() % 2 == 0) {
    rep = chern_even(A, J, PairingOptions{opt.round_tol});
  } else {
    rep = winding_odd(A, J, opt);
  }
  rep.name = "weak_invariant";
  rep.details["J"] = J;
  return rep;
}

FredholmResult fredholm_even(const OperatorSample& P, const Vec& origin, const FredholmOptions& opt) {
  if (P.dimension != 2) throw InvalidArgument("fredholm_even: implemented for d = 2");
  for (const auto& s : P.sites)
    if ((s - origin).norm() < 1e-6) throw InvalidArgument("fredholm_even: origin lies on a site");
  CMat V;
  if (opt.range_basis) {
    V = *opt.range_basis;
  } else {
    auto e = eigh(P.matrix);
    std::vector<Eigen::Index> cols;
    for (Eigen::Index k = 0; k < e.values.size(); ++k)
      if (e.values(k) > 0.5) cols.push_back(k);
    V.resize(P.dim(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) V.col(static_cast<Eigen::Index>(c)) = e.vectors.col(cols[c]);
  }
  CVec phase(P.dim());
  for (std::size_t s = 0; s < P.n_sites(); ++s) {
    cd z(P.sites[s](0) - origin(0), P.sites[s](1) - origin(1));
    for (int k = 0; k < P.q; ++k) phase(static_cast<Eigen::Index>(s) * P.q + k) = z / std::abs(z);
  }
  CMat T = V.adjoint() * phase.asDiagonal() * V;
  const double rad = opt.radius ? *opt.radius : 0.25 * min_side(P.window);
  std::vector<std::size_t> region;
  for (std::size_t s = 0; s < P.n_sites(); ++s)
    if ((P.sites[s] - origin).norm() <= rad) region.push_back(s);
  return localized_index(P, T, &V, region, opt);
}

FredholmResult fredholm_odd(const OperatorSample& U, int dir, double cut, const FredholmOptions& opt) {
  if (dir < 0 || dir >= U.dimension) throw InvalidArgument("fredholm_odd: direction out of range");
  const Eigen::Index n = U.dim();
  RVec pi(n);
  for (std::size_t s = 0; s < U.n_sites(); ++s)
    for (int k = 0; k < U.q; ++k) pi(static_cast<Eigen::Index>(s) * U.q + k) = U.sites[s](dir) >= cut ? 1.0 : 0.0;
  CMat M = pi.asDiagonal() * U.matrix * pi.asDiagonal();
  for (Eigen::Index i = 0; i < n; ++i)
    if (pi(i) == 0) M(i, i) += 1.0;
  const double extent = U.window.hi(dir) - U.window.lo(dir);
  const double rad = opt.radius ? *opt.radius : 0.25 * extent;
  std::vector<std::size_t> region;
  for (std::size_t s = 0; s < U.n_sites(); ++s)
    if (std::abs(U.sites[s](dir) - cut) <= rad) region.push_back(s);
  return localized_index(U, M, nullptr, region, opt);
}

Z2Result z2_index(const OperatorSample& F, const SymmetryOperator& symmetry, const Z2Options& opt) {
  Z2Result res;
  res.symmetry_defect = symmetry_defect(F, symmetry);
  const double scale = std::max(1.0, F.matrix.cwiseAbs().maxCoeff());
  if (res.symmetry_defect > 1e-8 * scale)
    throw NumericalError("z2_index: symmetry violated (defect " + std::to_string(res.symmetry_defect) + ")");
  auto sv = svd(F.matrix);
  if (sv.s.size() == 0) return res;
  const double tol = opt.kernel_tol_rel * sv.s(0);
  std::vector<Eigen::Index> kernel;
  for (Eigen::Index k = 0; k < sv.s.size(); ++k) {
    if (sv.s(k) > tol && sv.s(k) < 10 * tol)
      throw UnresolvedError("z2_index: singular value " + std::to_string(sv.s(k)) +
                            " inside the ambiguity band; use a larger sample");
    if (sv.s(k) <= tol) {
      kernel.push_back(k);
      res.small_singular_values.push_back(sv.s(k));
    }
  }
  if (opt.region) {
    std::vector<std::size_t> sites;
    for (std::size_t s = 0; s < F.n_sites(); ++s)
      if (opt.region->contains(F.sites[s], 1e-12)) sites.push_back(s);
    auto rows = F.basis_indices(sites);
    for (Eigen::Index k : kernel)
      for (Eigen::Index r : rows) res.localized += std::norm(sv.V(r, k));
    res.kernel_dim = std::lround(res.localized);
  } else {
    res.kernel_dim = static_cast<long>(kernel.size());
    res.localized = static_cast<double>(kernel.size());
  }
  res.value = static_cast<int>(((res.kernel_dim % 2) + 2) % 2);
  return res;
}

double sobolev_norm(const OperatorSample& A, int order, int power) {
  if (power < 1) throw InvalidArgument("sobolev_norm: power must be >= 1");
  if (order < 0) throw InvalidArgument("sobolev_norm: order must be >= 0");
  const int d = A.dimension;
  double total = 0;
  std::vector<int> alpha(static_cast<std::size_t>(d), 0);
  for (;;) {
    int len = std::accumulate(alpha.begin(), alpha.end(), 0);
    if (len <= order) {
      OperatorSample M = A;
      for (int j = 0; j < d; ++j)
        for (int r = 0; r < alpha[static_cast<std::size_t>(j)]; ++r) M = derivation(M, j);
      CMat G = M.matrix.adjoint() * M.matrix;
      CMat Gp;
      if (power % 2 == 0) {
        Gp = CMat::Identity(G.rows(), G.cols());
        for (int r = 0; r < power / 2; ++r) Gp = Gp * G;
      } else {
        auto e = eigh(G);
        Gp = spectral_function(e, [power](double x) { return cd(std::pow(std::max(x, 0.0), power / 2.0), 0); });
      }
      double tr = trace_per_unit_volume(M.with_matrix(std::move(Gp))).real();
      total += std::pow(std::max(tr, 0.0), 1.0 / power);
    }
    int k = 0;
    while (k < d && ++alpha[static_cast<std::size_t>(k)] > order) alpha[static_cast<std::size_t>(k++)] = 0;
    if (k == d) break;
  }
  return total;
}

double sphere_volume(int d) {
  return 2 * std::pow(std::numbers::pi, d / 2.0) / boost::math::tgamma(d / 2.0);
}

ResidueResult residue_check(const DeloneSet& set, const std::vector<double>& s_values) {
  ResidueResult res;
  const int d = set.dimension();
  res.d = d;
  res.target = sphere_volume(d);
  if (s_values.size() < 2) throw InvalidArgument("residue_check: at least two s values required");
  for (double s : s_values)
    if (!(s > d)) throw InvalidArgument("residue_check: s values must exceed d");
  const Box& w = set.window();
  double rho = std::numeric_limits<double>::infinity();
  for (int k = 0; k < d; ++k) rho = std::min({rho, -w.lo(k), w.hi(k)});
  if (!(rho >= 10)) throw InsufficientSample("residue_check: window too small (inscribed radius < 10)");
  res.radius = rho;
  std::vector<double> r2;
  for (const auto& p : set.points())
    if (p.norm() <= rho) r2.push_back(p.squaredNorm());
  res.points = r2.size();
  const double density_shell = static_cast<double>(r2.size()) / std::pow(rho, d) * d;
  boost::math::quadrature::exp_sinh<double> integrator;
  for (double s : s_values) {
    double partial = 0;
    for (double x2 : r2) partial += std::pow(1 + x2, -s / 2);
    auto f = [s, d](double t) { return std::pow(1 + t * t, -s / 2) * std::pow(t, d - 1); };
    double tail = density_shell * integrator.integrate(f, rho, std::numeric_limits<double>::infinity());
    res.s_values.push_back(s);
    res.values.push_back((s - d) * (partial + tail));
  }
  // Least-squares polynomial in (s - d), degree <= 2, evaluated at s = d.
  const int deg = std::min<int>(2, static_cast<int>(s_values.size()) - 1);
  Eigen::MatrixXd A(static_cast<Eigen::Index>(s_values.size()), deg + 1);
  Eigen::VectorXd b(static_cast<Eigen::Index>(s_values.size()));
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    for (int k = 0; k <= deg; ++k) A(static_cast<Eigen::Index>(i), k) = std::pow(s_values[i] - d, k);
    b(static_cast<Eigen::Index>(i)) = res.values[i];
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  res.extrapolated = c(0);
  res.relative_error = std::abs(res.extrapolated - res.target) / res.target;
  return res;
}

}  // namespace aperio
