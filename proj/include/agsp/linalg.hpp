#pragma once

// Thin wrappers over LAPACK for the dense kernels that dominate runtime.
// Every routine takes a real fast path when the input has no imaginary part.

#include "agsp/types.hpp"

namespace agsp::linalg {

struct EigenPairs {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns
};

/// True when every imaginary part is exactly zero.
bool is_real(const Matrix& m);

double max_abs(const Matrix& m);

/// max |M - M^dagger| over entries.
double hermiticity_deviation(const Matrix& m);

struct RealEigenPairs {
  RealVector values;  // ascending
  RealMatrix vectors;
};

/// Full eigendecomposition of a Hermitian matrix (only the lower triangle is read).
EigenPairs eigh(const Matrix& m);

/// Same, but forcing the complex LAPACK route. Used to cross-check the real path.
EigenPairs eigh_complex(const Matrix& m);

/// Real symmetric eigendecomposition without a complex copy of the vectors.
RealEigenPairs eigh_real(const RealMatrix& m);

/// Eigenvalues only, ascending.
RealVector eigvalsh(const Matrix& m);

/// Singular values, descending.
RealVector singular_values(const Matrix& m);

struct ThinSvd {
  Matrix u;       // rows × k
  RealVector s;   // descending, k = min(rows, cols)
  Matrix v;       // cols × k, so m = u diag(s) v^dagger
};

ThinSvd svd(const Matrix& m);

/// Largest singular value.
double spectral_norm(const Matrix& m);

/// V diag(f) V^dagger, computed in real arithmetic when V is real.
Matrix reconstruct(const Matrix& vectors, const RealVector& values);

}  // namespace agsp::linalg
