#include "aperio/cuntz_pimsner.hpp"

#include "aperio/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aperio {

namespace {

void check_support(const OrderedLattice& ol, const StepKernel& f) {
  if (!f.value) throw InvalidArgument("step kernel has no values");
  if (f.support_lo > f.support_hi || f.support_lo < ol.min_gap() - ol.tol() || f.support_hi > ol.max_gap() + ol.tol())
    throw InvalidArgument("step kernel support lies outside the elementary step range");
}

// f(omega_t, x): zero unless t + x is a site and x in the support.
cd eval(const OrderedLattice& ol, const StepKernel& f, double t, double x) {
  if (x < f.support_lo - ol.tol() || x > f.support_hi + ol.tol()) return 0.0;
  if (!ol.index_of(t + x)) return 0.0;
  return f.value(t, x);
}

}  // namespace

OrderedLattice::OrderedLattice(std::vector<double> sorted, std::size_t zero_index, double min_gap, double max_gap,
                               double tol)
    : y_(std::move(sorted)), zero_(zero_index), min_gap_(min_gap), max_gap_(max_gap), tol_(tol) {}

double OrderedLattice::site(long n) const {
  if (n < n_min() || n > n_max()) throw InsufficientSample("ordered lattice: index outside the sample");
  return y_[static_cast<std::size_t>(n + static_cast<long>(zero_))];
}

std::optional<long> OrderedLattice::index_of(double x) const {
  auto it = std::lower_bound(y_.begin(), y_.end(), x - tol_);
  if (it == y_.end() || *it > x + tol_) return std::nullopt;
  return static_cast<long>(it - y_.begin()) - static_cast<long>(zero_);
}

OrderedLattice order_lattice(const DeloneSet& set) {
  if (set.dimension() != 1) throw InvalidArgument("order_lattice: d = 1 expected");
  const double tol = set.tol_patch();
  auto z = set.find(zero_vec(1), tol);
  if (!z) throw InvalidArgument("order_lattice: 0 is not a site");
  std::vector<double> y;
  for (const auto& p : set.points()) y.push_back(p(0));
  std::sort(y.begin(), y.end());
  const double lo = 2 * set.r() - tol, hi = 2 * set.R() + tol;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    double g = y[i + 1] - y[i];
    if (g < lo || g > hi) {
      std::ostringstream os;
      os << "order_lattice: gap " << g << " between " << y[i] << " and " << y[i + 1] << " outside [" << 2 * set.r()
         << ", " << 2 * set.R() << "]";
      throw InvalidArgument(os.str());
    }
  }
  auto it = std::lower_bound(y.begin(), y.end(), -tol);
  return OrderedLattice(std::move(y), static_cast<std::size_t>(it - y.begin()), 2 * set.r(), 2 * set.R(), tol);
}

long degree(const OrderedLattice& ol, double x) {
  auto n = ol.index_of(x);
  if (!n) throw InvalidArgument("degree: point is not a site");
  return *n;
}

std::vector<double> factorize(const OrderedLattice& ol, double x) {
  const long n = degree(ol, x);
  std::vector<double> steps;
  if (n > 0)
    for (long j = 1; j <= n; ++j) steps.push_back(ol.site(j) - ol.site(j - 1));
  else
    for (long j = -1; j >= n; --j) steps.push_back(ol.site(j) - ol.site(j + 1));
  return steps;
}

std::size_t count_factorizations(const OrderedLattice& ol, double x, std::size_t limit) {
  const long target = degree(ol, x);
  if (target == 0) return 1;
  const int dir = target > 0 ? 1 : -1;
  const auto& y = ol.sites();
  const long base = -ol.n_min();
  std::size_t count = 0;
  // Depth-first over all sites reachable by an admissible step.
  std::vector<long> stack{0};
  while (!stack.empty() && count < limit) {
    long n = stack.back();
    stack.pop_back();
    if (n == target) {
      ++count;
      continue;
    }
    const double t = y[static_cast<std::size_t>(n + base)];
    for (long m = n + dir; m >= ol.n_min() && m <= ol.n_max(); m += dir) {
      if (dir * (m - target) > 0) break;
      double step = std::abs(y[static_cast<std::size_t>(m + base)] - t);
      if (step > ol.max_gap() + ol.tol()) break;
      if (step >= ol.min_gap() - ol.tol()) stack.push_back(m);
    }
  }
  return count;
}

AdditivityReport check_degree_additivity(const DeloneSet& set, std::size_t window) {
  if (set.dimension() != 1) throw InvalidArgument("check_degree_additivity: d = 1 expected");
  const auto origin = order_lattice(set);
  if (origin.n_max() - origin.n_min() + 1 < static_cast<long>(window))
    throw InsufficientSample("check_degree_additivity: sample has fewer sites than the window");
  long lo = std::max(origin.n_min(), -static_cast<long>(window) / 2);
  long hi = lo + static_cast<long>(window) - 1;
  if (hi > origin.n_max()) {
    hi = origin.n_max();
    lo = hi - static_cast<long>(window) + 1;
  }
  std::vector<double> pts;
  for (long n = lo; n <= hi; ++n) pts.push_back(origin.site(n));
  std::vector<OrderedLattice> at;
  at.reserve(pts.size());
  for (double a : pts) at.push_back(order_lattice(translate(set, make_vec({a}))));

  AdditivityReport rep;
  rep.bases = pts.size();
  for (std::size_t ia = 0; ia < pts.size(); ++ia)
    for (std::size_t ib = 0; ib < pts.size(); ++ib) {
      const long dab = degree(at[ia], pts[ib] - pts[ia]);
      for (std::size_t ic = 0; ic < pts.size(); ++ic) {
        ++rep.pairs;
        if (dab + degree(at[ib], pts[ic] - pts[ib]) != degree(at[ia], pts[ic] - pts[ia])) ++rep.failures;
      }
    }
  return rep;
}

StepKernel constant_kernel(const OrderedLattice& ol, cd c) {
  return StepKernel{[c](double, double) { return c; }, ol.min_gap(), ol.max_gap()};
}

InnerTable right_inner(const OrderedLattice& ol, const StepKernel& f1, const StepKernel& f2) {
  check_support(ol, f1);
  check_support(ol, f2);
  InnerTable tab;
  const auto& y = ol.sites();
  // sum over y in L(omega_t) of conj f1(omega_{t+y}, -y) f2(omega_{t+y}, -y)
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    const double t = y[i];
    cd acc = 0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (std::abs(y[j] - t) > ol.max_gap() + ol.tol() || j == i) continue;
      const double s = y[j], x = t - s;
      acc += std::conj(eval(ol, f1, s, x)) * eval(ol, f2, s, x);
    }
    tab.points.push_back(t);
    tab.values.push_back(acc);
  }
  return tab;
}

InnerTable left_inner(const OrderedLattice& ol, const StepKernel& f1, const StepKernel& f2) {
  check_support(ol, f1);
  check_support(ol, f2);
  InnerTable tab;
  const auto& y = ol.sites();
  // sum over y in L(omega_t) of f1(omega_t, y) conj f2(omega_t, y)
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    const double t = y[i];
    cd acc = 0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (std::abs(y[j] - t) > ol.max_gap() + ol.tol() || j == i) continue;
      const double x = y[j] - t;
      acc += eval(ol, f1, t, x) * std::conj(eval(ol, f2, t, x));
    }
    tab.points.push_back(t);
    tab.values.push_back(acc);
  }
  return tab;
}

BimoduleReport check_bimodule(const OrderedLattice& ol, const StepKernel& f1, const StepKernel& f2,
                              const StepKernel& f3) {
  check_support(ol, f3);
  auto L = left_inner(ol, f1, f2);
  auto Rt = right_inner(ol, f2, f3);
  BimoduleReport rep;
  const auto& y = ol.sites();
  // Both sides are elements of E, compared at (omega_t, x) for the elementary x at t.
  for (std::size_t i = 1; i + 2 < y.size(); ++i) {
    const double t = y[i], x = y[i + 1] - t;
    cd lhs = L.values[i - 1] * eval(ol, f3, t, x);
    cd rhs = eval(ol, f1, t, x) * Rt.values[i];
    rep.imprimitivity_defect = std::max(rep.imprimitivity_defect, std::abs(lhs - rhs));
    ++rep.points;
  }
  auto R12 = right_inner(ol, f1, f2), R21 = right_inner(ol, f2, f1);
  auto L12 = left_inner(ol, f1, f2), L21 = left_inner(ol, f2, f1);
  for (std::size_t k = 0; k < R12.values.size(); ++k) {
    rep.right_adjoint_defect = std::max(rep.right_adjoint_defect, std::abs(std::conj(R12.values[k]) - R21.values[k]));
    rep.left_adjoint_defect = std::max(rep.left_adjoint_defect, std::abs(std::conj(L12.values[k]) - L21.values[k]));
  }
  return rep;
}

}  // namespace aperio
