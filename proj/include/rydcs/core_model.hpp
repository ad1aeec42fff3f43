#pragma once

// Coherent-state data model for a driven Rydberg chain and the closed-form
// matrix elements that enter the variational equations of motion.
//
// Single-site state:
//   |xi> = ((xi + 1)|g> + (xi - 1)|r>) / sqrt(2 (1 + |xi|^2))
// so xi = +1 is |g>, xi = -1 is -|r>, and xi = 0 is (|g> - |r>)/sqrt(2).
//
// Hamiltonian (hbar = 1, rad/us):
//   H(t) = Omega(t)/2 sum_i sx_i - Delta(t) sum_i n_i + sum_{i<j} V_ij n_i n_j
// Each unordered pair contributes once.

#include <array>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "rydcs/common.hpp"
#include "rydcs/linear_solve.hpp"

namespace rydcs {

/// One site of a coherent state in homogeneous form, xi = num / den. The
/// state is ((num + den)|g> + (num - den)|r>) / sqrt(2 (|num|^2 + |den|^2)),
/// which equals |xi> when den = 1 and differs from it by the phase
/// den / |den| otherwise. Propagation uses this form so the point xi = inf
/// (the state (|g> + |r>)/sqrt(2)) is an ordinary point of the flow.
struct SiteSpinor {
  Complex num = 1.0;
  Complex den = 1.0;

  double norm2() const noexcept { return std::norm(num) + std::norm(den); }
  /// num / den; infinite when den = 0.
  Complex xi() const noexcept;
  friend bool operator==(const SiteSpinor&, const SiteSpinor&) = default;
};

/// conj(p) . q over the two components.
inline Complex spinor_inner(const SiteSpinor& p, const SiteSpinor& q) noexcept {
  return std::conj(p.num) * q.num + std::conj(p.den) * q.den;
}

/// Normalized single-site bra-ket elements <p|1|q>, <p|sx|q>, <p|n|q>.
struct SiteElements {
  Complex overlap;
  Complex sigma_x;
  Complex rydberg;
};

SiteElements site_elements(const SiteSpinor& p, const SiteSpinor& q) noexcept;

/// A product coherent state, one complex parameter per site.
class CoherentBasisVector {
 public:
  CoherentBasisVector() = default;
  /// One xi per site (den = 1). Throws std::invalid_argument on an empty
  /// list or non-finite entries.
  explicit CoherentBasisVector(const std::vector<Complex>& xi);
  /// Throws on an empty list, non-finite entries, or a zero spinor.
  static CoherentBasisVector from_spinors(std::vector<SiteSpinor> sites);

  std::size_t size() const noexcept { return sites_.size(); }
  const SiteSpinor& site(std::size_t i) const { return sites_[i]; }
  SiteSpinor& site(std::size_t i) { return sites_[i]; }
  Complex xi(std::size_t i) const { return sites_[i].xi(); }
  std::span<const SiteSpinor> sites() const noexcept { return sites_; }
  /// max_i |xi_i|, infinite if any den = 0.
  double max_abs() const noexcept;
  /// Rescales every site to unit spinor norm; the state is unchanged.
  void normalize() noexcept;

  friend bool operator==(const CoherentBasisVector&, const CoherentBasisVector&) = default;

 private:
  std::vector<SiteSpinor> sites_;
};

/// Per-site time derivative of a basis vector in homogeneous form.
using SpinorRate = std::vector<SiteSpinor>;

using Basis = std::vector<CoherentBasisVector>;

/// Amplitudes over a (generally non-orthogonal) coherent basis.
struct WaveFunction {
  Basis basis;
  ComplexVector amplitudes;
  double time_us = 0.0;

  std::size_t size() const noexcept { return basis.size(); }
  std::size_t sites() const noexcept { return basis.empty() ? 0 : basis.front().size(); }

  /// Checks non-empty, equal lengths and uniform site count.
  void validate() const;

  /// sqrt(a^dagger Gamma a).
  double norm() const;
  double max_abs_xi() const noexcept;
};

/// Drive amplitude as a function of time (t in us, value in rad/us).
class DriveSchedule {
 public:
  struct Constant {
    double value = 0.0;
  };
  struct Cubic {
    std::array<double, 4> coefficients{};  // a + b t + c t^2 + d t^3
  };

  DriveSchedule() = default;
  static DriveSchedule constant(double value);
  static DriveSchedule cubic(std::array<double, 4> coefficients);

  double operator()(double t_us) const noexcept;

  bool is_constant() const noexcept { return std::holds_alternative<Constant>(form_); }
  const std::variant<Constant, Cubic>& form() const noexcept { return form_; }

  friend bool operator==(const DriveSchedule& a, const DriveSchedule& b);

 private:
  explicit DriveSchedule(std::variant<Constant, Cubic> form) : form_(form) {}
  std::variant<Constant, Cubic> form_{Constant{}};
};

struct ChainModel {
  int m = 0;
  DriveSchedule rabi;
  DriveSchedule detuning;
  RealMatrix interaction;  // symmetric, zero diagonal, rad/us

  /// Symmetry, zero diagonal, finite entries, matching size.
  void validate() const;

  static ChainModel nearest_neighbor(int m, DriveSchedule rabi, DriveSchedule detuning,
                                     double coupling);
};

/// <p|q> for single-site parameters.
Complex site_overlap(Complex p, Complex q) noexcept;

ComplexMatrix overlap_matrix(std::span<const CoherentBasisVector> basis);

/// <xi_m|H(t)|xi_l>, evaluated site by site so antipodal pairs are harmless.
ComplexMatrix hamiltonian_matrix(std::span<const CoherentBasisVector> basis,
                                 const ChainModel& model, double t_us);

/// Same quantity through the factored form (bracket) * Gamma_ml. Throws
/// NumericalError when a denominator falls below kDenominatorGuard.
ComplexMatrix hamiltonian_matrix_ratio(std::span<const CoherentBasisVector> basis,
                                       const ChainModel& model, double t_us);

/// Parameter velocities of one basis vector under its own mean field:
///   dxi_i/dt = -i [ Omega xi_i + (xi_i^2 - 1)/2 (-Delta + sum_j V_ij n_j) ].
/// Independent of the amplitudes and of every other basis vector. Requires
/// finite xi on every site.
std::vector<Complex> xi_time_derivative(const CoherentBasisVector& vector,
                                        const ChainModel& model, double t_us);

/// The same flow lifted to the homogeneous form. It is linear in (num, den)
/// with an anti-Hermitian generator, so it stays regular through xi = inf
/// and conserves each spinor norm.
SpinorRate spinor_time_derivative(const CoherentBasisVector& vector, const ChainModel& model,
                                  double t_us);

/// Homogeneous rate (den * dxi/dt, 0) reproducing the given xi velocities.
SpinorRate spinor_rate_from_xi(const CoherentBasisVector& vector,
                               std::span<const Complex> xi_rate);

/// chi_ml = <xi_m| d/dt |xi_l>.
ComplexMatrix coupling_matrix_chi(std::span<const CoherentBasisVector> basis,
                                  std::span<const SpinorRate> derivatives);
/// Convenience form taking xi velocities.
ComplexMatrix coupling_matrix_chi(std::span<const CoherentBasisVector> basis,
                                  std::span<const std::vector<Complex>> xi_rates);

/// Factored form M_ml * Gamma_ml with the same guard as hamiltonian_matrix_ratio.
ComplexMatrix coupling_matrix_chi_ratio(std::span<const CoherentBasisVector> basis,
                                        std::span<const std::vector<Complex>> xi_rates);

/// Gamma, H and chi from a single pass over basis pairs.
struct MatrixSet {
  ComplexMatrix overlap;
  ComplexMatrix hamiltonian;
  ComplexMatrix chi;
};

/// `derivatives` may be empty, in which case chi is left empty.
MatrixSet evaluate_matrices(std::span<const CoherentBasisVector> basis,
                            std::span<const SpinorRate> derivatives,
                            const ChainModel& model, double t_us);

/// Gamma, H and chi for the basis moving under spinor_time_derivative. The
/// mean-field generator is Hermitian, so chi reduces to one-body sums that
/// H already needs and one pass over the upper triangle suffices.
MatrixSet propagation_matrices(std::span<const CoherentBasisVector> basis, const ChainModel& model,
                               double t_us);

/// Solution of Gamma adot = (-chi - i H) a.
struct AmplitudeRhs {
  ComplexVector derivative;
  SolveDiagnostics diagnostics;
};

AmplitudeRhs amplitude_rhs(const WaveFunction& wave, const ComplexMatrix& overlap,
                           const ComplexMatrix& chi, const ComplexMatrix& hamiltonian,
                           double cutoff = kDefaultRegularizationCutoff);

}  // namespace rydcs
