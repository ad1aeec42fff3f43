#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "rydcs/common.hpp"

namespace rydcs {

inline constexpr double kDefaultRegularizationCutoff = 1e-10;

/// Raised when the overlap matrix carries no usable direction at all.
class RankCollapseError : public Error {
 public:
  RankCollapseError(const std::string& what, std::optional<double> time_us = std::nullopt)
      : Error(what), time_us_(time_us) {}
  std::optional<double> time_us() const noexcept { return time_us_; }

 private:
  std::optional<double> time_us_;
};

struct SolveDiagnostics {
  // Eigenvalue extremes; left at zero when the Cholesky path was taken.
  double largest_eigenvalue = 0.0;
  double smallest_eigenvalue = 0.0;
  /// largest / smallest eigenvalue; infinite for an exactly singular matrix.
  /// An L1-norm estimate when `estimated` is set.
  double condition = 1.0;
  std::size_t discarded_directions = 0;
  bool estimated = false;
};

struct RegularizedSolution {
  ComplexVector x;
  SolveDiagnostics diagnostics;
};

/// Minimum-norm solution of gram x = rhs for a Hermitian positive
/// semi-definite gram. Eigen-directions with eigenvalue below
/// cutoff * largest are dropped. Well-conditioned systems are solved by
/// Cholesky instead, which gives the same answer.
RegularizedSolution regularized_solve(const ComplexMatrix& gram, const ComplexVector& rhs,
                                      double cutoff = kDefaultRegularizationCutoff);

}  // namespace rydcs
