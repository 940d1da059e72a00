#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>

namespace aperio {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

struct EigenDecomposition {
  RVec values;   // ascending
  CMat vectors;  // columns
};

/// Dense Hermitian eigensolver (LAPACK zheevr). Only the upper triangle is read.
EigenDecomposition eigh(const CMat& H, bool with_vectors = true);
/// Eigenpairs with eigenvalue in (lo, hi].
EigenDecomposition eigh_window(const CMat& H, double lo, double hi);

struct SingularDecomposition {
  RVec s;  // descending
  CMat U;
  CMat V;  // A = U diag(s) V^*
};

/// Full SVD (LAPACK zgesvd).
SingularDecomposition svd(const CMat& A);
RVec singular_values(const CMat& A);

/// g(H) = V diag(g(lambda)) V^*.
CMat spectral_function(const EigenDecomposition& e, const std::function<cd(double)>& g);

double hermitian_defect(const CMat& A);
double unitarity_defect(const CMat& U);

/// Limit the BLAS/LAPACK worker pool; 0 leaves the default.
void set_blas_threads(int n);

}  // namespace aperio
