#include "aperio/linalg.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>

#include "aperio/error.hpp"

#include <lapacke.h>

#include <string>
#include <vector>

extern "C" void openblas_set_num_threads(int);

namespace aperio {

namespace {

// zheevr (MRRR). The divide-and-conquer drivers go through real dgemm, which
// is unreliable on some OpenBLAS kernels.
EigenDecomposition heevr(const CMat& H, bool with_vectors, char range, double vl, double vu, lapack_int il,
                         lapack_int iu) {
  if (H.rows() != H.cols()) throw InvalidArgument("eigh: matrix is not square");
  EigenDecomposition out;
  const lapack_int n = static_cast<lapack_int>(H.rows());
  if (n == 0) return out;
  CMat A = H;
  RVec w(n);
  CMat Z;
  if (with_vectors) Z.resize(n, n);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
  lapack_int m = 0;
  lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', range, 'U', n, A.data(), n, vl, vu, il,
                                   iu, 0.0, &m, w.data(), with_vectors ? Z.data() : nullptr, n, isuppz.data());
  if (info != 0) throw NumericalError("zheevr failed with info=" + std::to_string(info));
  out.values = w.head(m);
  if (with_vectors) out.vectors = Z.leftCols(m);
  return out;
}

}  // namespace

EigenDecomposition eigh(const CMat& H, bool with_vectors) { return heevr(H, with_vectors, 'A', 0, 0, 0, 0); }

EigenDecomposition eigh_window(const CMat& H, double lo, double hi) {
  if (!(hi > lo)) throw InvalidArgument("eigh_window: empty interval");
  return heevr(H, true, 'V', lo, hi, 0, 0);
}

SingularDecomposition svd(const CMat& A) {
  SingularDecomposition out;
  const lapack_int m = static_cast<lapack_int>(A.rows()), n = static_cast<lapack_int>(A.cols());
  const lapack_int k = std::min(m, n);
  out.s.resize(k);
  out.U.resize(m, m);
  CMat Vh(n, n);
  if (k == 0) {
    out.U.setIdentity();
    out.V = CMat::Identity(n, n);
    return out;
  }
  CMat B = A;
  std::vector<double> superb(static_cast<std::size_t>(k));
  lapack_int info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'A', 'A', m, n, B.data(), m, out.s.data(), out.U.data(), m,
                                   Vh.data(), n, superb.data());
  if (info != 0) throw NumericalError("zgesvd failed with info=" + std::to_string(info));
  out.V = Vh.adjoint();
  return out;
}

RVec singular_values(const CMat& A) {
  const lapack_int m = static_cast<lapack_int>(A.rows()), n = static_cast<lapack_int>(A.cols());
  RVec s(std::min(m, n));
  if (s.size() == 0) return s;
  CMat B = A;
  std::vector<double> superb(static_cast<std::size_t>(s.size()));
  lapack_int info =
      LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'N', 'N', m, n, B.data(), m, s.data(), nullptr, 1, nullptr, 1, superb.data());
  if (info != 0) throw NumericalError("zgesvd failed with info=" + std::to_string(info));
  return s;
}

CMat spectral_function(const EigenDecomposition& e, const std::function<cd(double)>& g) {
  CVec gv(e.values.size());
  for (Eigen::Index i = 0; i < gv.size(); ++i) gv(i) = g(e.values(i));
  CMat scaled = e.vectors * gv.asDiagonal();
  return scaled * e.vectors.adjoint();
}

double hermitian_defect(const CMat& A) {
  if (A.size() == 0) return 0.0;
  return (A - A.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const CMat& U) {
  if (U.size() == 0) return 0.0;
  CMat I = CMat::Identity(U.rows(), U.cols());
  return std::max((U.adjoint() * U - I).cwiseAbs().maxCoeff(), (U * U.adjoint() - I).cwiseAbs().maxCoeff());
}

void set_blas_threads(int n) {
  if (n > 0) openblas_set_num_threads(n);
}

}  // namespace aperio
