#include "rydcs/linear_solve.hpp"

#include <cmath>
#include <limits>

namespace rydcs {

RegularizedSolution regularized_solve(const ComplexMatrix& gram, const ComplexVector& rhs,
                                      double cutoff) {
  if (gram.rows() != gram.cols() || gram.rows() != rhs.size())
    throw std::invalid_argument("regularized_solve: dimension mismatch");
  if (!(cutoff > 0.0 && cutoff < 1.0))
    throw std::invalid_argument("regularized_solve: cutoff must lie in (0, 1)");
  if (gram.size() == 0) return {ComplexVector(), {}};
  if (!gram.allFinite()) throw RankCollapseError("overlap matrix has non-finite entries");

  // Cholesky is enough when even a pessimistic reading of its condition
  // estimate keeps every eigenvalue well above the cutoff: nothing would be
  // dropped, so the pseudo-inverse is the plain inverse.
  const Eigen::LLT<ComplexMatrix> llt(gram);
  if (llt.info() == Eigen::Success) {
    const double rcond = llt.rcond();
    const double margin = 1e3 * static_cast<double>(gram.rows());
    if (std::isfinite(rcond) && rcond > margin * cutoff) {
      SolveDiagnostics diag;
      diag.condition = 1.0 / rcond;
      diag.estimated = true;
      return {llt.solve(rhs), diag};
    }
  }

  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram);
  if (eig.info() != Eigen::Success) throw RankCollapseError("overlap eigendecomposition failed");

  // Eigenvalues come back in ascending order.
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double largest = values(values.size() - 1);
  SolveDiagnostics diag;
  diag.largest_eigenvalue = largest;
  diag.smallest_eigenvalue = values(0);
  if (!(largest > 0.0) || !std::isfinite(largest))
    throw RankCollapseError("overlap matrix has no positive direction");
  diag.condition = values(0) > 0.0 ? largest / values(0) : std::numeric_limits<double>::infinity();

  const double floor = cutoff * largest;
  const ComplexMatrix& vectors = eig.eigenvectors();
  const ComplexVector projected = vectors.adjoint() * rhs;
  ComplexVector scaled = ComplexVector::Zero(projected.size());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values(k) < floor) {
      ++diag.discarded_directions;
      continue;
    }
    scaled(k) = projected(k) / values(k);
  }
  return {vectors * scaled, diag};
}

}  // namespace rydcs
