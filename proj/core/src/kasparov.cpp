#include "aperio/kasparov.hpp"

#include "aperio/error.hpp"
#include "aperio/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace aperio {

namespace {

Fiber make_fiber(const DeloneSet& set, std::size_t base, double radius, double margin) {
  Fiber f;
  f.base_site = base;
  const Vec& c = set[base];
  const Box& w = set.window();
  for (int k = 0; k < set.dimension(); ++k)
    if (c(k) - radius - margin < w.lo(k) - 1e-12 || c(k) + radius + margin > w.hi(k) + 1e-12)
      throw InsufficientSample("build_fiber_space: window too small for the fiber box");
  for (std::size_t s : set.within(c, radius * std::sqrt(static_cast<double>(set.dimension())) + 1e-12)) {
    Vec x = set[s] - c;
    if (x.cwiseAbs().maxCoeff() <= radius + 1e-12) {
      f.sites.push_back(s);
      f.coords.push_back(x);
    }
  }
  return f;
}

// T+ (eta in tau-, xi in tau+) for vertex v, without zeta.
Eigen::MatrixXd gram_block(const FiberSpace& fs, std::size_t v, const Frame& frame) {
  const auto& fp = fs.fibers[v][0];
  const auto& fm = fs.fibers[v][1];
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fm.coords.size()),
                                            static_cast<Eigen::Index>(fp.coords.size()));
  for (std::size_t e = 0; e < fm.coords.size(); ++e)
    for (std::size_t x = 0; x < fp.coords.size(); ++x)
      G(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(x)) = frame.gram(fm.coords[e], fp.coords[x]);
  return G;
}

// T+ from the block of vertex v.
CMat plus_block(const FiberSpace& fs, const BlockOperator& T, std::size_t v) {
  const auto np = static_cast<Eigen::Index>(fs.fibers[v][0].coords.size());
  const auto nm = static_cast<Eigen::Index>(fs.fibers[v][1].coords.size());
  const CMat& Tv = T.blocks[v];
  CMat B(nm, np);
  for (Eigen::Index e = 0; e < nm; ++e)
    for (Eigen::Index x = 0; x < np; ++x)
      B(e, x) = Tv(fs.local(v, 1, static_cast<std::size_t>(e), 0), fs.local(v, 0, static_cast<std::size_t>(x), 0));
  return B;
}

void check_blocks(const FiberSpace& fs, const BlockOperator& A, const char* what) {
  if (A.blocks.size() != fs.fibers.size()) throw InvalidArgument(std::string(what) + ": operator does not match the fiber space");
  for (std::size_t v = 0; v < A.blocks.size(); ++v)
    if (A.blocks[v].rows() != fs.block_dim(v) || A.blocks[v].cols() != fs.block_dim(v))
      throw InvalidArgument(std::string(what) + ": block size mismatch");
}

BlockOperator zero_blocks(const FiberSpace& fs) {
  BlockOperator A;
  for (std::size_t v = 0; v < fs.fibers.size(); ++v) A.blocks.push_back(CMat::Zero(fs.block_dim(v), fs.block_dim(v)));
  return A;
}

}  // namespace

Eigen::Index BlockOperator::dim() const {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  return n;
}

CMat BlockOperator::dense() const {
  const Eigen::Index n = dim();
  CMat D = CMat::Zero(n, n);
  Eigen::Index o = 0;
  for (const auto& b : blocks) {
    D.block(o, o, b.rows(), b.cols()) = b;
    o += b.rows();
  }
  return D;
}

BlockOperator BlockOperator::operator*(const BlockOperator& o) const {
  if (blocks.size() != o.blocks.size()) throw InvalidArgument("BlockOperator: block count mismatch");
  BlockOperator r;
  for (std::size_t v = 0; v < blocks.size(); ++v) r.blocks.push_back(blocks[v] * o.blocks[v]);
  return r;
}

BlockOperator BlockOperator::operator+(const BlockOperator& o) const {
  if (blocks.size() != o.blocks.size()) throw InvalidArgument("BlockOperator: block count mismatch");
  BlockOperator r;
  for (std::size_t v = 0; v < blocks.size(); ++v) r.blocks.push_back(blocks[v] + o.blocks[v]);
  return r;
}

BlockOperator BlockOperator::adjoint() const {
  BlockOperator r;
  for (const auto& b : blocks) r.blocks.push_back(b.adjoint());
  return r;
}

double BlockOperator::max_abs() const {
  double m = 0;
  for (const auto& b : blocks)
    if (b.size()) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

double default_pitch(int d, double eps) { return 1.6 * eps / std::sqrt(static_cast<double>(d)); }

FiberSpace build_fiber_space(const DeloneSet& set, std::shared_ptr<const PatternTree> tree, const ChoicePair& pair,
                             const FiberOptions& opt) {
  if (!tree) throw InvalidArgument("build_fiber_space: null tree");
  const std::size_t V = tree->vertices.size();
  if (pair.tau_plus.size() != V || pair.tau_minus.size() != V)
    throw InvalidArgument("build_fiber_space: choice pair does not match the tree");
  if (!verify_choice(*tree, pair)) throw InvalidArgument("build_fiber_space: choice outside its cylinder set");
  FiberSpace fs;
  fs.dimension = set.dimension();
  fs.r = set.r();
  fs.radius = opt.radius ? *opt.radius : tree->depth * tree->R + set.r();
  if (fs.radius < tree->depth * tree->R) throw InsufficientSample("build_fiber_space: fiber radius below depth * R");
  fs.tree = tree;
  fs.pair = pair;
  fs.clifford_dim = 1 << fs.dimension;
  Eigen::Index off = 0;
  for (std::size_t v = 0; v < V; ++v) {
    std::array<Fiber, 2> f{make_fiber(set, pair.tau_plus[v], fs.radius, opt.margin),
                           make_fiber(set, pair.tau_minus[v], fs.radius, opt.margin)};
    std::array<Eigen::Index, 2> o{};
    for (int s = 0; s < 2; ++s) {
      o[static_cast<std::size_t>(s)] = off;
      off += static_cast<Eigen::Index>(f[static_cast<std::size_t>(s)].sites.size()) * fs.clifford_dim;
    }
    fs.fibers.push_back(std::move(f));
    fs.offset.push_back(o);
  }
  fs.dim = off;
  return fs;
}

CMat clifford_generator(int d, int k) {
  if (k < 0 || k >= d) throw InvalidArgument("clifford_generator: index out of range");
  const int n = 1 << d;
  CMat g = CMat::Zero(n, n);
  for (int S = 0; S < n; ++S) {
    const double sign = (std::popcount(static_cast<unsigned>(S & ((1 << k) - 1))) % 2) ? -1.0 : 1.0;
    const int T = S ^ (1 << k);  // ext_k if k not in S, int_k otherwise
    g(T, S) = sign;
  }
  return g;
}

CMat clifford_grading(int d) {
  const int n = 1 << d;
  CMat k = CMat::Zero(n, n);
  for (int S = 0; S < n; ++S) k(S, S) = (std::popcount(static_cast<unsigned>(S)) % 2) ? -1.0 : 1.0;
  return k;
}

BlockOperator operator_X(const FiberSpace& fs) {
  const int c = fs.clifford_dim;
  std::vector<CMat> gam;
  for (int k = 0; k < fs.dimension; ++k) gam.push_back(clifford_generator(fs.dimension, k));
  BlockOperator X = zero_blocks(fs);
  for (std::size_t v = 0; v < fs.fibers.size(); ++v)
    for (int s = 0; s < 2; ++s) {
      const auto& f = fs.fibers[v][static_cast<std::size_t>(s)];
      for (std::size_t p = 0; p < f.coords.size(); ++p) {
        const Eigen::Index i = fs.local(v, s, p, 0);
        for (int k = 0; k < fs.dimension; ++k)
          X.blocks[v].block(i, i, c, c) += f.coords[p](k) * gam[static_cast<std::size_t>(k)];
      }
    }
  return X;
}

BlockOperator operator_kappa(const FiberSpace& fs) {
  const CMat g = clifford_grading(fs.dimension);
  BlockOperator K = zero_blocks(fs);
  for (auto& b : K.blocks)
    for (Eigen::Index i = 0; i < b.rows(); i += fs.clifford_dim) b.block(i, i, fs.clifford_dim, fs.clifford_dim) = g;
  return K;
}

BlockOperator operator_T(const FiberSpace& fs, const Frame& frame, Zeta zeta) {
  if (!(frame.eps() < fs.r / 2)) throw InvalidArgument("operator_T: frame eps must be below r/2");
  BlockOperator T = zero_blocks(fs);
  for (std::size_t v = 0; v < fs.fibers.size(); ++v) {
    const double z = zeta_value(zeta, fs.tree->vertices[v].level, fs.tree->R);
    if (z == 0) continue;
    Eigen::MatrixXd G = gram_block(fs, v, frame);
    for (Eigen::Index e = 0; e < G.rows(); ++e)
      for (Eigen::Index x = 0; x < G.cols(); ++x) {
        if (G(e, x) == 0) continue;
        for (int a = 0; a < fs.clifford_dim; ++a) {
          const Eigen::Index i = fs.local(v, 1, static_cast<std::size_t>(e), a);
          const Eigen::Index j = fs.local(v, 0, static_cast<std::size_t>(x), a);
          T.blocks[v](i, j) = z * G(e, x);
          T.blocks[v](j, i) = z * G(e, x);
        }
      }
  }
  return T;
}

AnticommutatorReport anticommutator_estimate(const FiberSpace& fs, const BlockOperator& X, const BlockOperator& T,
                                             std::size_t trials, std::uint64_t seed) {
  check_blocks(fs, X, "anticommutator_estimate");
  check_blocks(fs, T, "anticommutator_estimate");
  AnticommutatorReport rep;
  for (std::size_t v = 0; v < fs.fibers.size(); ++v) {
    CMat B = plus_block(fs, T, v);
    for (Eigen::Index e = 0; e < B.rows(); ++e)
      for (Eigen::Index x = 0; x < B.cols(); ++x)
        if (B(e, x) != 0.0)
          rep.max_displacement = std::max(
              rep.max_displacement,
              (fs.fibers[v][1].coords[static_cast<std::size_t>(e)] - fs.fibers[v][0].coords[static_cast<std::size_t>(x)]).norm());
  }
  const BlockOperator Tk = T * operator_kappa(fs);
  const BlockOperator A = X * Tk + Tk * X;
  Rng rng(seed);
  std::normal_distribution<double> g;
  double sum = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    // phi is drawn on the whole space; norms add over blocks.
    double num2 = 0, den2 = 0;
    for (std::size_t v = 0; v < A.blocks.size(); ++v) {
      CVec phi(A.blocks[v].cols());
      for (Eigen::Index i = 0; i < phi.size(); ++i) phi(i) = cd(g(rng), g(rng));
      num2 += (A.blocks[v] * phi).squaredNorm();
      den2 += (Tk.blocks[v] * phi).squaredNorm();
    }
    if (std::sqrt(den2) < 1e-14 * std::sqrt(static_cast<double>(std::max<Eigen::Index>(fs.dim, 1)))) {
      ++rep.skipped;
      continue;
    }
    const double ratio = std::sqrt(num2 / den2);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    sum += ratio;
    ++rep.trials;
  }
  if (rep.trials == 0) throw NumericalError("anticommutator_estimate: T kappa vanished on every trial vector");
  rep.mean_ratio = sum / static_cast<double>(rep.trials);
  return rep;
}

double local_unit_defect(const FiberSpace& fs, const BlockOperator& T, const Frame& frame, int n, int min_level) {
  check_blocks(fs, T, "local_unit_defect");
  const double rad = n * fs.tree->R;
  double worst = 0;
  for (std::size_t v = 0; v < fs.fibers.size(); ++v) {
    if (fs.tree->vertices[v].level < min_level) continue;
    CMat B = plus_block(fs, T, v);
    const auto& fp = fs.fibers[v][0];
    const auto& fm = fs.fibers[v][1];
    for (Eigen::Index e = 0; e < B.rows(); ++e)
      for (Eigen::Index x = 0; x < B.cols(); ++x) {
        if (B(e, x) == 0.0) continue;
        const double du = frame.local_unit(fm.coords[static_cast<std::size_t>(e)], rad) -
                          frame.local_unit(fp.coords[static_cast<std::size_t>(x)], rad);
        worst = std::max(worst, std::abs(B(e, x)) * std::abs(du));
      }
  }
  return worst;
}

double damped_commutator_norm(const FiberSpace& fs, const BlockOperator& T, const SiteFunction& f, double delta) {
  if (!(delta > 0)) throw InvalidArgument("damped_commutator_norm: delta must be positive");
  check_blocks(fs, T, "damped_commutator_norm");
  double worst = 0;
  for (std::size_t v = 0; v < fs.fibers.size(); ++v) {
    const auto& fp = fs.fibers[v][0];
    const auto& fm = fs.fibers[v][1];
    CMat B = plus_block(fs, T, v);
    if (B.size() == 0) continue;
    std::vector<double> vp, vm;
    for (std::size_t s : fp.sites) vp.push_back(f(s));
    for (std::size_t s : fm.sites) vm.push_back(f(s));
    // [T, f] lower block: B(e,x) (f(eta) - f(xi)); upper block is its adjoint with the sign flipped.
    CMat C(B.rows(), B.cols());
    for (Eigen::Index e = 0; e < B.rows(); ++e)
      for (Eigen::Index x = 0; x < B.cols(); ++x)
        C(e, x) = B(e, x) * (vm[static_cast<std::size_t>(e)] - vp[static_cast<std::size_t>(x)]);
    RVec wm(B.rows()), wp(B.cols());
    for (Eigen::Index e = 0; e < B.rows(); ++e)
      wm(e) = std::pow(1 + fm.coords[static_cast<std::size_t>(e)].squaredNorm(), -delta);
    for (Eigen::Index x = 0; x < B.cols(); ++x)
      wp(x) = std::pow(1 + fp.coords[static_cast<std::size_t>(x)].squaredNorm(), -delta);
    CMat lower = wm.asDiagonal() * C;
    CMat upper = wp.asDiagonal() * C.adjoint();
    worst = std::max({worst, singular_values(lower)(0), singular_values(upper)(0)});
  }
  return worst;
}

ScanReport log_commutator_scan(const DeloneSet& set, const std::vector<int>& depths, const SiteFunction& f,
                               double pattern_radius, double delta, Zeta zeta, const ScanOptions& opt) {
  if (depths.size() < 3) throw InsufficientSample("log_commutator_scan: at least three depths are needed");
  ScanReport rep;
  rep.zeta = zeta;
  rep.delta = delta;
  const double pitch = opt.lattice_pitch > 0 ? opt.lattice_pitch : default_pitch(set.dimension(), opt.eps);
  const Frame frame = s_cover_frame(set, opt.eps, pitch);
  for (int n : depths) {
    auto tree = std::make_shared<const PatternTree>(build_tree(set, n));
    const double radius = n * tree->R + 2 * frame.support();
    auto pair = choice_pair(*tree, opt.seed, ChoiceOptions{radius + pattern_radius});
    auto fs = build_fiber_space(set, tree, pair, FiberOptions{radius, pattern_radius});
    BlockOperator T = operator_T(fs, frame, zeta);
    rep.rows.push_back({n, fs.dim, damped_commutator_norm(fs, T, f, delta)});
  }
  double earlier = 0, first = 0;
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) earlier = std::max(earlier, rep.rows[i].norm);
  for (const auto& row : rep.rows)
    if (row.norm > 0) {
      first = row.norm;
      break;
    }
  const double last = rep.rows.back().norm;
  rep.bounded = last <= 1.1 * earlier;
  rep.growth = first > 0 ? last / first : 0;
  return rep;
}

ProductSpectrum product_spectrum(const FiberSpace& fs, const BlockOperator& X, const BlockOperator& T) {
  check_blocks(fs, X, "product_spectrum");
  check_blocks(fs, T, "product_spectrum");
  ProductSpectrum ps;
  const BlockOperator D = X + T * operator_kappa(fs);
  std::vector<double> ev;
  for (const auto& b : D.blocks) {
    if (b.size() == 0) continue;
    ps.hermitian_defect = std::max(ps.hermitian_defect, hermitian_defect(b));
    auto e = eigh(b, false);
    ev.insert(ev.end(), e.values.data(), e.values.data() + e.values.size());
  }
  std::sort(ev.begin(), ev.end());
  const auto n = static_cast<Eigen::Index>(ev.size());
  ps.eigenvalues = Eigen::Map<RVec>(ev.data(), n);
  if (n == 0) return ps;
  ps.min_abs = ps.eigenvalues.cwiseAbs().minCoeff();
  for (Eigen::Index i = 0; i < n; ++i)
    ps.symmetry_defect = std::max(ps.symmetry_defect, std::abs(ps.eigenvalues(i) + ps.eigenvalues(n - 1 - i)));
  const double top = ps.eigenvalues.cwiseAbs().maxCoeff();
  for (int k = 1; k <= 8; ++k) {
    const double lam = top * k / 8.0;
    std::size_t c = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(ps.eigenvalues(i)) <= lam + 1e-12) ++c;
    ps.counting.emplace_back(lam, c);
  }
  return ps;
}

}  // namespace aperio
