#include "aperio/delone.hpp"

#include "aperio/error.hpp"
#include "aperio/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace aperio {

namespace {

double default_cell(double r) { return std::max(r, 1e-6) * 2.0; }

std::string fmt_vec(const Vec& v) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ")";
  return os.str();
}

// Delone constants read off a sample: r = half the minimal distance,
// R = largest empty-ball radius on the covering grid plus the grid slack.
std::pair<double, double> sample_constants(int d, const std::vector<Vec>& pts, const Box& window) {
  SpatialIndex idx(d, 1.0);
  for (const auto& p : pts) idx.insert(p);
  double min_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto nn = idx.nearest(pts[i], i);
    if (nn) min_d = std::min(min_d, nn->second);
  }
  double r = 0.5 * min_d;
  double pitch = r / 2;
  // Iterate: erosion depends on R itself.
  double R = 2 * r;
  for (int it = 0; it < 4; ++it) {
    double worst = 0;
    for (const auto& g : covering_grid(window.eroded(R), pitch)) worst = std::max(worst, idx.nearest(g)->second);
    double next = worst + pitch * std::sqrt(static_cast<double>(d)) / 2;
    if (std::abs(next - R) < 1e-12) break;
    R = next;
  }
  return {r, R};
}

}  // namespace

DeloneSet::DeloneSet(int dimension, std::vector<Vec> points, double r, double R, Box window, Provenance provenance,
                     bool exact_coordinates)
    : dim_(dimension),
      points_(std::move(points)),
      r_(r),
      R_(R),
      window_(std::move(window)),
      provenance_(std::move(provenance)),
      exact_(exact_coordinates) {
  if (dim_ < 1 || dim_ > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
  if (!(r_ > 0) || !(R_ > 0)) throw InvalidArgument("Delone constants must be positive");
  if (window_.dimension() != dim_) throw InvalidArgument("window dimension mismatch");
  for (const auto& p : points_)
    if (p.size() != dim_) throw InvalidArgument("point dimension mismatch");
  std::sort(points_.begin(), points_.end(), lex_less);
  index_ = std::make_shared<SpatialIndex>(dim_, default_cell(r_));
  for (const auto& p : points_) index_->insert(p);
}

double DeloneSet::tol_patch() const { return exact_ ? 1e-9 : 1e-9 * std::max(1.0, window_.diameter()); }

std::optional<std::size_t> DeloneSet::find(const Vec& x, double tol) const {
  if (tol < 0) tol = std::max(tol_patch(), 1e-9);
  auto hits = index_->within(x, tol);
  if (hits.empty()) return std::nullopt;
  return hits.front();
}

DeloneSet DeloneSet::with_constants(double r, double R) const {
  return DeloneSet(dim_, points_, r, R, window_, provenance_, exact_);
}

DeloneSet DeloneSet::without_point(std::size_t i) const {
  std::vector<Vec> pts = points_;
  pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
  return DeloneSet(dim_, std::move(pts), r_, R_, window_, provenance_, exact_);
}

std::size_t PatchKeyHash::operator()(const std::vector<std::int64_t>& k) const {
  std::uint64_t h = 0x12345678;
  for (auto v : k) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
  return static_cast<std::size_t>(h);
}

Patch make_patch(std::vector<Vec> relative_points, double radius, double tol) {
  Patch p;
  p.radius = radius;
  std::sort(relative_points.begin(), relative_points.end(), lex_less);
  p.key.reserve(relative_points.size() * (relative_points.empty() ? 0 : relative_points[0].size()));
  for (const auto& v : relative_points)
    for (Eigen::Index i = 0; i < v.size(); ++i) p.key.push_back(std::llround(v(i) / tol));
  p.relative_points = std::move(relative_points);
  return p;
}

CutProjectScheme parse_scheme(const std::string& name) {
  if (name == "fibonacci") return CutProjectScheme::fibonacci;
  if (name == "ammann_beenker") return CutProjectScheme::ammann_beenker;
  throw InvalidArgument("unknown cut-and-project scheme: " + name);
}

std::string scheme_name(CutProjectScheme s) {
  return s == CutProjectScheme::fibonacci ? "fibonacci" : "ammann_beenker";
}

DeloneSet generate_periodic(int d, double spacing, const Box& window) {
  if (d < 1 || d > 3) throw InvalidArgument("generate_periodic: d must be 1, 2 or 3");
  if (!(spacing > 0)) throw InvalidArgument("generate_periodic: spacing must be positive");
  if (window.dimension() != d) throw InvalidArgument("generate_periodic: window dimension mismatch");
  std::vector<int> lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = static_cast<int>(std::ceil(window.lo(i) / spacing - 1e-12));
    hi[i] = static_cast<int>(std::floor(window.hi(i) / spacing + 1e-12));
    if (hi[i] < lo[i]) throw InvalidArgument("window too small");
  }
  std::vector<Vec> pts;
  std::vector<int> n = lo;
  for (;;) {
    Vec p(d);
    for (int i = 0; i < d; ++i) p(i) = n[i] * spacing;
    pts.push_back(p);
    int k = 0;
    while (k < d && ++n[k] > hi[k]) n[k] = lo[k], ++k;
    if (k == d) break;
  }
  Provenance prov{"periodic", 0, {{"d", d}, {"spacing", spacing}}};
  return DeloneSet(d, std::move(pts), spacing / 2, spacing * std::sqrt(static_cast<double>(d)) / 2, window,
                   std::move(prov), true);
}

namespace {

DeloneSet fibonacci(const Box& window) {
  if (window.dimension() != 1) throw InvalidArgument("fibonacci requires d=1");
  const double phi = golden_ratio;
  const double mean = 1 + 1 / (phi * phi);
  long n0 = static_cast<long>(std::floor(window.lo(0) / mean)) - 4;
  long n1 = static_cast<long>(std::ceil(window.hi(0) / mean)) + 4;
  std::vector<Vec> pts;
  for (long n = n0; n <= n1; ++n) {
    double x = n + std::floor(n / phi) / phi;
    if (x >= window.lo(0) - 1e-12 && x <= window.hi(0) + 1e-12) pts.push_back(make_vec({x}));
  }
  if (pts.size() < 2) throw InvalidArgument("window too small");
  double min_gap = std::numeric_limits<double>::infinity(), max_gap = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    double g = pts[i](0) - pts[i - 1](0);
    min_gap = std::min(min_gap, g);
    max_gap = std::max(max_gap, g);
  }
  // Largest hole: the long gap, or the uncovered ends of the eroded window.
  double R = max_gap / 2 * (1 + 1e-12);
  Provenance prov{"fibonacci", 0, {{"window", {window.lo(0), window.hi(0)}}}};
  return DeloneSet(1, std::move(pts), min_gap / 2 * (1 - 1e-12), R, window, std::move(prov), false);
}

struct Polygon {
  std::vector<Eigen::Vector2d> v;  // counter-clockwise

  bool contains(const Eigen::Vector2d& p) const {
    for (std::size_t i = 0; i < v.size(); ++i) {
      Eigen::Vector2d a = v[i], b = v[(i + 1) % v.size()];
      double cross = (b - a).x() * (p - a).y() - (b - a).y() * (p - a).x();
      if (cross < 0) return false;
    }
    return true;
  }
};

Polygon convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const auto& a, const auto& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
  };
  std::vector<Eigen::Vector2d> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-12) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-12) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return Polygon{h};
}

DeloneSet ammann_beenker(const Box& window) {
  if (window.dimension() != 2) throw InvalidArgument("ammann_beenker requires d=2");
  std::array<Eigen::Vector2d, 4> e, ep;
  for (int k = 0; k < 4; ++k) {
    e[k] = {std::cos(k * std::numbers::pi / 4), std::sin(k * std::numbers::pi / 4)};
    ep[k] = {std::cos(3 * k * std::numbers::pi / 4), std::sin(3 * k * std::numbers::pi / 4)};
  }
  std::vector<Eigen::Vector2d> corners;
  for (int m = 0; m < 16; ++m) {
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (int k = 0; k < 4; ++k) c += ((m >> k) & 1 ? 0.5 : -0.5) * ep[k];
    corners.push_back(c);
  }
  Polygon W = convex_hull(corners);
  const Eigen::Vector2d gamma(0.0123456, 0.0234567);
  double perp_max = 0;
  for (const auto& c : W.v) perp_max = std::max(perp_max, (c + gamma).norm());
  double par_max = std::max(window.lo.cwiseAbs().maxCoeff(), window.hi.cwiseAbs().maxCoeff()) * std::sqrt(2.0);
  const int M = static_cast<int>(std::ceil(std::sqrt((par_max * par_max + perp_max * perp_max) / 2))) + 1;
  std::vector<Vec> pts;
  for (int a = -M; a <= M; ++a)
    for (int b = -M; b <= M; ++b)
      for (int c = -M; c <= M; ++c) {
        Eigen::Vector2d xp3 = a * ep[0] + b * ep[1] + c * ep[2];
        // dd with |xp3 - gamma + dd ep[3]| <= perp_max.
        const Eigen::Vector2d w = xp3 - gamma;
        const double proj = w.dot(ep[3]);
        const double disc = proj * proj - w.squaredNorm() + perp_max * perp_max;
        if (disc < 0) continue;
        const int lo = std::max(-M, static_cast<int>(std::floor(-proj - std::sqrt(disc))));
        const int hi = std::min(M, static_cast<int>(std::ceil(-proj + std::sqrt(disc))));
        for (int dd = lo; dd <= hi; ++dd) {
          Eigen::Vector2d xp = xp3 + dd * ep[3];
          if (!W.contains(xp - gamma)) continue;
          Eigen::Vector2d x = a * e[0] + b * e[1] + c * e[2] + dd * e[3];
          Vec v = make_vec({x.x(), x.y()});
          if (window.contains(v, 1e-12)) pts.push_back(v);
        }
      }
  if (pts.size() < 2) throw InvalidArgument("window too small");
  auto [r, R] = sample_constants(2, pts, window);
  Provenance prov{"ammann_beenker", 0, {{"gamma", {gamma.x(), gamma.y()}}}};
  return DeloneSet(2, std::move(pts), r * (1 - 1e-12), R, window, std::move(prov), false);
}

}  // namespace

DeloneSet generate_cut_and_project(CutProjectScheme scheme, const Box& window) {
  switch (scheme) {
    case CutProjectScheme::fibonacci:
      return fibonacci(window);
    case CutProjectScheme::ammann_beenker:
      return ammann_beenker(window);
  }
  throw InvalidArgument("unsupported scheme");
}

DeloneSet generate_amorphous(int d, double r, double target_R, const Box& window, std::uint64_t seed) {
  if (d < 1 || d > 3 || window.dimension() != d) throw InvalidArgument("generate_amorphous: bad dimension");
  if (!(r > 0)) throw InvalidArgument("generate_amorphous: r must be positive");
  if (!(target_R > 2 * r))
    throw InvalidArgument("generate_amorphous: infeasible constants, need target_R > 2r (r=" + std::to_string(r) +
                          ", target_R=" + std::to_string(target_R) + ")");
  if (window.empty()) throw InvalidArgument("window too small");
  Rng rng(child_seed(seed, 0));
  std::vector<std::uniform_real_distribution<double>> coord;
  for (int i = 0; i < d; ++i) coord.emplace_back(window.lo(i), window.hi(i));
  SpatialIndex idx(d, 2 * r);
  // Random sequential insertion: a fixed budget of proposals per unit volume.
  const double cell_vol = std::pow(2 * r, d);
  const std::size_t attempts = static_cast<std::size_t>(4 * std::max(1.0, window.volume() / cell_vol)) + 16;
  for (std::size_t a = 0; a < attempts; ++a) {
    Vec p(d);
    for (int i = 0; i < d; ++i) p(i) = coord[i](rng);
    if (!idx.any_within(p, 2 * r)) idx.insert(p);
  }
  // Hole filling on the verifier's grid.
  const double pitch = r / 2;
  const double slack = pitch * std::sqrt(static_cast<double>(d)) / 2;
  const double fill_at = std::max(2 * r, target_R - slack);
  auto grid = covering_grid(window.eroded(target_R), pitch);
  for (int pass = 0; pass < 3; ++pass) {
    bool changed = false;
    for (const auto& g : grid) {
      auto nn = idx.nearest(g);
      if (!nn || nn->second > fill_at) {
        idx.insert(g);
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::vector<Vec> pts;
  for (std::size_t i = 0; i < idx.size(); ++i) pts.push_back(idx.point(i));
  Provenance prov{"amorphous", seed, {{"d", d}, {"r", r}, {"target_R", target_R}}};
  DeloneSet out(d, std::move(pts), r, target_R, window, std::move(prov), false);
  auto rep = verify_delone(out);
  if (!rep.ok()) {
    std::ostringstream os;
    os << "generate_amorphous: could not certify (r=" << r << ", R=" << target_R << "): min_pairwise "
       << rep.min_pairwise << ", worst gap " << rep.worst_gap << " at " << fmt_vec(rep.worst_gap_center);
    throw NumericalError(os.str());
  }
  return out;
}

DeloneSet perturb(const DeloneSet& set, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0) || amplitude >= set.r() / 2)
    throw InvalidArgument("perturb: amplitude must satisfy 0 <= amplitude < r/2");
  if (amplitude == 0) {
    return DeloneSet(set.dimension(), set.points(), set.r(), set.R(), set.window(), set.provenance(),
                     set.exact_coordinates());
  }
  const int d = set.dimension();
  const double r2 = set.r() - amplitude;
  Rng rng(child_seed(seed, 1));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec> cur = set.points();
  SpatialIndex idx(d, 2 * set.r());
  for (const auto& p : cur) idx.insert(p);
  // Positions are updated in place; the index holds originals, so neighbours
  // are looked up with an enlarged radius and compared against `cur`.
  for (std::size_t i = 0; i < cur.size(); ++i) {
    Vec step(d);
    do {
      for (int k = 0; k < d; ++k) step(k) = u(rng);
    } while (step.norm() > 1.0);
    Vec cand = cur[i] + amplitude * step;
    if (!set.window().contains(cand)) continue;
    bool ok = true;
    for (std::size_t j : idx.within(cand, 2 * r2 + amplitude))
      if (j != i && (cur[j] - cand).norm() < 2 * r2) ok = false;
    if (ok) cur[i] = cand;
  }
  Provenance prov{"perturb", seed, {{"amplitude", amplitude}, {"base", set.provenance().generator}}};
  return DeloneSet(d, std::move(cur), r2, set.R() + amplitude, set.window(), std::move(prov), false);
}

DeloneSet translate(const DeloneSet& set, const Vec& a) {
  if (!set.find(a)) throw InvalidArgument("translate: vector " + fmt_vec(a) + " is not a point of the set");
  std::vector<Vec> pts;
  pts.reserve(set.size());
  for (const auto& p : set.points()) pts.push_back(p - a);
  Provenance prov = set.provenance();
  prov.parameters["translated_by"] = std::vector<double>(a.data(), a.data() + a.size());
  return DeloneSet(set.dimension(), std::move(pts), set.r(), set.R(), set.window().shifted(-a), std::move(prov),
                   set.exact_coordinates());
}

DeloneReport verify_delone(const DeloneSet& set) {
  if (set.size() == 0) throw InvalidArgument("verify_delone: empty set");
  DeloneReport rep;
  rep.worst_gap_center = set.window().center();
  const auto& idx = set.index();
  rep.min_pairwise = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto nn = idx.nearest(set[i], i);
    if (nn) rep.min_pairwise = std::min(rep.min_pairwise, nn->second);
  }
  const double eps = 1e-12 * std::max(1.0, set.window().diameter());
  rep.discrete_ok = rep.min_pairwise >= 2 * set.r() - eps && rep.min_pairwise > 0;
  rep.inside_ok = std::all_of(set.points().begin(), set.points().end(),
                              [&](const Vec& p) { return set.window().contains(p, eps); });
  auto grid = covering_grid(set.window().eroded(set.R()), set.r() / 2);
  rep.grid_points = grid.size();
  rep.dense_ok = true;
  for (const auto& g : grid) {
    double dist = idx.nearest(g)->second;
    if (dist > rep.worst_gap) {
      rep.worst_gap = dist;
      rep.worst_gap_center = g;
    }
    if (dist > set.R() + eps) rep.dense_ok = false;
  }
  return rep;
}

Patch clipped_patch_at(const DeloneSet& set, std::size_t site, double radius, bool* clipped) {
  const Vec& x = set[site];
  if (clipped) *clipped = !set.window().contains_ball(x, radius, 1e-12);
  const double tol = set.tol_patch();
  std::vector<Vec> rel;
  for (std::size_t j : set.within(x, radius + tol)) rel.push_back(set[j] - x);
  return make_patch(std::move(rel), radius, tol);
}

Patch patch_at(const DeloneSet& set, std::size_t site, double radius) {
  bool clipped = false;
  Patch p = clipped_patch_at(set, site, radius, &clipped);
  if (clipped) throw InsufficientSample("insufficient sample: ball of radius " + std::to_string(radius) + " around " +
                                        fmt_vec(set[site]) + " leaves the window");
  return p;
}

Patch patch_at(const DeloneSet& set, const Vec& x, double radius) {
  auto i = set.find(x);
  if (!i) throw InvalidArgument("patch_at: " + fmt_vec(x) + " is not a point of the set");
  return patch_at(set, *i, radius);
}

std::vector<std::size_t> eligible_centers(const DeloneSet& set, double radius) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (set.window().contains_ball(set[i], radius, 1e-12)) out.push_back(i);
  return out;
}

std::vector<PatchClass> enumerate_patches(const DeloneSet& set, double radius) {
  std::unordered_map<std::vector<std::int64_t>, std::size_t, PatchKeyHash> pos;
  std::vector<PatchClass> classes;
  for (std::size_t i : eligible_centers(set, radius)) {
    Patch p = clipped_patch_at(set, i, radius, nullptr);
    auto [it, fresh] = pos.emplace(p.key, classes.size());
    if (fresh) classes.push_back(PatchClass{std::move(p), 0, {}});
    auto& c = classes[it->second];
    ++c.multiplicity;
    c.witnesses.push_back(i);
  }
  std::sort(classes.begin(), classes.end(), [](const PatchClass& a, const PatchClass& b) { return a.patch < b.patch; });
  return classes;
}

}  // namespace aperio
