#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace agsp {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Largest Hilbert-space dimension any dense vector or operator may have.
inline constexpr std::int64_t kDefaultDenseLimit = std::int64_t{1} << 14;
/// Largest dimension for which a full dense eigendecomposition is attempted.
inline constexpr std::int64_t kDefaultEigenLimit = std::int64_t{1} << 12;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateGroundStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// d^n as a 64-bit integer, saturating at INT64_MAX.
std::int64_t hilbert_dim(int n, int d);

}  // namespace agsp
