#pragma once

#include <vector>

#include "cortexkit/matrix.hpp"

namespace cortexkit {

struct SymEig {
  std::vector<double> values;  // descending
  Matrix vectors;              // column i pairs with values[i]
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Throws DimensionError when the input is not square or not symmetric
/// within 1e-10 (scaled by the largest entry when that exceeds 1).
SymEig sym_eig(const Matrix& m);

struct Svd {
  Matrix u;                    // rows x k
  std::vector<double> values;  // k = min(rows, cols), descending, >= 0
  Matrix v;                    // cols x k
};

/// Thin SVD via one-sided (Hestenes) Jacobi.
Svd svd(const Matrix& m);

double nuclear_norm(const Matrix& m);
double spectral_norm(const Matrix& m);

/// Moore-Penrose pseudo-inverse; singular values below
/// rcond * largest singular value are treated as zero.
Matrix pinv(const Matrix& m, double rcond = 1e-12);

/// Inverse of a symmetric positive-definite matrix. Throws SingularityError
/// when the smallest eigenvalue is not above rcond times the largest.
Matrix spd_inverse(const Matrix& m, double rcond = 1e-12);

}  // namespace cortexkit
