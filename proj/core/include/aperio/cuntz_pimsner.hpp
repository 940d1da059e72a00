#pragma once

#include "aperio/delone.hpp"
#include "aperio/linalg.hpp"

#include <functional>
#include <vector>

namespace aperio {

/// Sites y_n of a one-dimensional sample, y_0 = 0, increasing in n.
class OrderedLattice {
 public:
  OrderedLattice(std::vector<double> sorted, std::size_t zero_index, double min_gap, double max_gap, double tol);

  long n_min() const { return -static_cast<long>(zero_); }
  long n_max() const { return static_cast<long>(y_.size() - zero_) - 1; }
  double site(long n) const;
  const std::vector<double>& sites() const { return y_; }
  /// Elementary steps have length in [min_gap, max_gap].
  double min_gap() const { return min_gap_; }
  double max_gap() const { return max_gap_; }
  double tol() const { return tol_; }
  /// Index n with |y_n - x| <= tol, if any.
  std::optional<long> index_of(double x) const;

 private:
  std::vector<double> y_;
  std::size_t zero_;
  double min_gap_, max_gap_, tol_;
};

/// Orders a d=1 sample containing 0. Consecutive gaps must lie in [2r, 2R].
OrderedLattice order_lattice(const DeloneSet& set);

long degree(const OrderedLattice& ol, double x);

/// Steps y_j - y_{j-1} from 0 to x (negative steps for x < 0).
std::vector<double> factorize(const OrderedLattice& ol, double x);

/// Number of site-to-site paths from 0 to x with every step of length in
/// [min_gap, max_gap] pointing towards x.
std::size_t count_factorizations(const OrderedLattice& ol, double x, std::size_t limit = 16);

struct AdditivityReport {
  std::size_t bases = 0;
  std::size_t pairs = 0;
  std::size_t failures = 0;
  bool ok() const { return pairs > 0 && failures == 0; }
};

/// deg_a(b - a) + deg_b(c - b) = deg_a(c - a) for all a, b, c among `window`
/// consecutive sites around 0, each degree taken in the ordering of the
/// translate of the set to its base point.
AdditivityReport check_degree_additivity(const DeloneSet& set, std::size_t window);

/// Finite kernel on the elementary elements (omega_t, x), x in [min_gap, max_gap];
/// `value(t, x)` is read at the transversal point translated to site t.
struct StepKernel {
  std::function<cd(double t, double x)> value;
  double support_lo = 0;
  double support_hi = 0;
};

StepKernel constant_kernel(const OrderedLattice& ol, cd c);

struct InnerTable {
  std::vector<double> points;  // sampled sites t
  std::vector<cd> values;
};

/// (f1 | f2)(t) = (f1^* * f2)(omega_t, 0).
InnerTable right_inner(const OrderedLattice& ol, const StepKernel& f1, const StepKernel& f2);
/// <f1, f2>(t) = (f1 * f2^*)(omega_t, 0).
InnerTable left_inner(const OrderedLattice& ol, const StepKernel& f1, const StepKernel& f2);

struct BimoduleReport {
  std::size_t points = 0;
  double imprimitivity_defect = 0;  // max |<f1,f2> f3 - f1 (f2|f3)|
  double right_adjoint_defect = 0;  // max |(f1|f2)^* - (f2|f1)|
  double left_adjoint_defect = 0;
};

BimoduleReport check_bimodule(const OrderedLattice& ol, const StepKernel& f1, const StepKernel& f2,
                              const StepKernel& f3);

}  // namespace aperio
