#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace rydcs {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr Complex kI{0.0, 1.0};

/// Below this magnitude of 1 + conj(p) q the ratio-form matrix elements are
/// refused. The joint-product evaluation has no such restriction.
inline constexpr double kDenominatorGuard = 1e-12;

class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a ratio-form evaluation hits a (near-)antipodal site pair or an
/// observable picks up a non-negligible imaginary part.
class NumericalError : public Error {
  using Error::Error;
};

}  // namespace rydcs
