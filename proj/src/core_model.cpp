#include "rydcs/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rydcs {

namespace {

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_uniform(std::span<const CoherentBasisVector> basis) {
  if (basis.empty()) throw std::invalid_argument("basis must not be empty");
  const std::size_t m = basis.front().size();
  for (const auto& v : basis)
    if (v.size() != m) throw std::invalid_argument("basis vectors have different site counts");
}

void check_model(const ChainModel& model, std::size_t m) {
  if (model.m < 1 || static_cast<std::size_t>(model.m) != m)
    throw std::invalid_argument("chain model has " + std::to_string(model.m) +
                                " sites, basis has " + std::to_string(m));
}

// Nonzero couplings above the diagonal, grouped by row so the pair sum can
// stop at the last partner of each site.
struct CouplingTable {
  explicit CouplingTable(const RealMatrix& v) : m(static_cast<int>(v.rows())), last(m, -1) {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (v(i, j) != 0.0) last[i] = j;
    values = v;
  }
  int m;
  std::vector<int> last;
  RealMatrix values;
};

// Per-site bra-ket elements for one pair of basis vectors, plus the prefix and
// suffix products of the site overlaps used to form "all sites but i" factors.
class PairKernel {
 public:
  explicit PairKernel(std::size_t m)
      : ov_(m), sx_(m), n_(m), d_(m), pre_(m + 1), suf_(m + 1) {}

  void load(std::span<const SiteSpinor> p, std::span<const double> ps,
            std::span<const SiteSpinor> q, std::span<const double> qs, const SiteSpinor* qdot) {
    const std::size_t m = ov_.size();
    for (std::size_t i = 0; i < m; ++i) {
      const double w = ps[i] * qs[i];
      const Complex pnq = std::conj(p[i].num) * q[i].num;
      const Complex pdq = std::conj(p[i].den) * q[i].den;
      ov_[i] = (pnq + pdq) * w;
      sx_[i] = (pnq - pdq) * w;
      n_[i] = 0.5 * w * std::conj(p[i].num - p[i].den) * (q[i].num - q[i].den);
      if (qdot) {
        // d/dt of the normalized ket: the rate itself minus its component
        // along the ket's own length.
        const double nu = -spinor_inner(q[i], qdot[i]).real() * qs[i] * qs[i];
        d_[i] = spinor_inner(p[i], qdot[i]) * w + ov_[i] * nu;
      }
    }
    pre_[0] = 1.0;
    for (std::size_t i = 0; i < m; ++i) pre_[i + 1] = pre_[i] * ov_[i];
    suf_[m] = 1.0;
    for (std::size_t i = m; i-- > 0;) suf_[i] = suf_[i + 1] * ov_[i];
  }

  Complex overlap() const { return pre_.back(); }
  Complex all_but(std::size_t i) const { return pre_[i] * suf_[i + 1]; }

  Complex hamiltonian(double rabi, double detuning, const CouplingTable& v) const {
    Complex single = 0.0;
    for (std::size_t i = 0; i < ov_.size(); ++i)
      single += (0.5 * rabi * sx_[i] - detuning * n_[i]) * all_but(i);
    return single + interaction(v);
  }

  Complex interaction(const CouplingTable& v) const {
    Complex pair = 0.0;
    for (int i = 0; i < v.m; ++i) {
      if (v.last[i] < 0) continue;
      Complex between = 1.0;
      for (int j = i + 1; j <= v.last[i]; ++j) {
        const double vij = v.values(i, j);
        if (vij != 0.0) pair += vij * n_[i] * n_[j] * pre_[i] * between * suf_[j + 1];
        between *= ov_[j];
      }
    }
    return pair;
  }

  // One-body sums shared by H and the mean-field chi: Sx = sum_i sx_i A_i and
  // occupancies N_i = n_i A_i, with A_i the overlap of every other site.
  void reduce() {
    sx_sum_ = 0.0;
    for (std::size_t i = 0; i < ov_.size(); ++i) {
      const Complex a = all_but(i);
      sx_sum_ += sx_[i] * a;
      d_[i] = n_[i] * a;
    }
  }

  Complex reduced_single(double rabi, double detuning) const {
    Complex occ = 0.0;
    for (const auto& x : d_) occ += x;
    return 0.5 * rabi * sx_sum_ - detuning * occ;
  }

  // <this bra| d/dt |this ket> when the ket follows the mean-field flow with
  // half-fields f; `adjoint` gives the reverse pair from the same sums.
  Complex reduced_chi(double rabi, std::span<const double> f, bool adjoint) const {
    Complex field_sum = 0.0;
    double f_total = 0.0;
    for (std::size_t i = 0; i < d_.size(); ++i) {
      field_sum += f[i] * (adjoint ? std::conj(d_[i]) : d_[i]);
      f_total += f[i];
    }
    const Complex sx = adjoint ? std::conj(sx_sum_) : sx_sum_;
    const Complex g = adjoint ? std::conj(overlap()) : overlap();
    return -kI * (0.5 * rabi * sx - g * f_total + 2.0 * field_sum);
  }

  Complex chi() const {
    Complex sum = 0.0;
    for (std::size_t i = 0; i < ov_.size(); ++i) sum += d_[i] * all_but(i);
    return sum;
  }

 private:
  std::vector<Complex> ov_, sx_, n_, d_, pre_, suf_;
  Complex sx_sum_ = 0.0;
};

std::vector<std::vector<double>> inverse_norms(std::span<const CoherentBasisVector> basis) {
  std::vector<std::vector<double>> out;
  out.reserve(basis.size());
  for (const auto& v : basis) {
    std::vector<double> s(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) s[i] = 1.0 / std::sqrt(v.site(i).norm2());
    out.push_back(std::move(s));
  }
  return out;
}

// 1 + conj(p) q in xi terms; zero dens fall back to the normalized overlap.
Complex guarded_denominator(const SiteSpinor& p, const SiteSpinor& q) {
  const Complex inner = spinor_inner(p, q);
  const double scale = p.den != 0.0 && q.den != 0.0 ? std::abs(p.den) * std::abs(q.den)
                                                    : std::sqrt(p.norm2() * q.norm2());
  if (std::abs(inner) < kDenominatorGuard * scale)
    throw NumericalError("near-antipodal site pair: |1 + conj(p) q| = " +
                         std::to_string(std::abs(inner) / scale) + " below guard");
  return inner;
}

template <class Rate>
void check_derivatives(std::span<const CoherentBasisVector> basis,
                       std::span<const Rate> derivatives) {
  if (derivatives.size() != basis.size())
    throw std::invalid_argument("one derivative list per basis vector required");
  for (std::size_t l = 0; l < basis.size(); ++l)
    if (derivatives[l].size() != basis[l].size())
      throw std::invalid_argument("derivative list length differs from site count");
}

}  // namespace

Complex SiteSpinor::xi() const noexcept {
  if (den == 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
  return num / den;
}

SiteElements site_elements(const SiteSpinor& p, const SiteSpinor& q) noexcept {
  const double w = 1.0 / std::sqrt(p.norm2() * q.norm2());
  const Complex pnq = std::conj(p.num) * q.num;
  const Complex pdq = std::conj(p.den) * q.den;
  return {(pnq + pdq) * w, (pnq - pdq) * w, 0.5 * w * std::conj(p.num - p.den) * (q.num - q.den)};
}

CoherentBasisVector::CoherentBasisVector(const std::vector<Complex>& xi) {
  if (xi.empty()) throw std::invalid_argument("coherent basis vector needs at least one site");
  sites_.reserve(xi.size());
  for (const auto& z : xi) {
    if (!is_finite(z)) throw std::invalid_argument("site parameter is not finite");
    sites_.push_back({z, 1.0});
  }
}

CoherentBasisVector CoherentBasisVector::from_spinors(std::vector<SiteSpinor> sites) {
  if (sites.empty()) throw std::invalid_argument("coherent basis vector needs at least one site");
  for (const auto& s : sites) {
    if (!is_finite(s.num) || !is_finite(s.den)) throw std::invalid_argument("site spinor is not finite");
    if (s.norm2() == 0.0) throw std::invalid_argument("site spinor is zero");
  }
  CoherentBasisVector out;
  out.sites_ = std::move(sites);
  return out;
}

double CoherentBasisVector::max_abs() const noexcept {
  double best = 0.0;
  for (const auto& s : sites_) best = std::max(best, std::abs(s.xi()));
  return best;
}

void CoherentBasisVector::normalize() noexcept {
  for (auto& s : sites_) {
    const double r = 1.0 / std::sqrt(s.norm2());
    s.num *= r;
    s.den *= r;
  }
}

void WaveFunction::validate() const {
  if (basis.empty()) throw std::invalid_argument("wave function has an empty basis");
  if (static_cast<std::size_t>(amplitudes.size()) != basis.size())
    throw std::invalid_argument("amplitude count differs from basis size");
  check_uniform(basis);
}

double WaveFunction::norm() const {
  const ComplexMatrix gamma = overlap_matrix(basis);
  const Complex sq = amplitudes.dot(gamma * amplitudes);
  return std::sqrt(std::max(0.0, sq.real()));
}

double WaveFunction::max_abs_xi() const noexcept {
  double best = 0.0;
  for (const auto& v : basis) best = std::max(best, v.max_abs());
  return best;
}

DriveSchedule DriveSchedule::constant(double value) { return DriveSchedule(Constant{value}); }

DriveSchedule DriveSchedule::cubic(std::array<double, 4> coefficients) {
  return DriveSchedule(Cubic{coefficients});
}

double DriveSchedule::operator()(double t_us) const noexcept {
  if (const auto* c = std::get_if<Constant>(&form_)) return c->value;
  const auto& k = std::get<Cubic>(form_).coefficients;
  return k[0] + t_us * (k[1] + t_us * (k[2] + t_us * k[3]));
}

bool operator==(const DriveSchedule& a, const DriveSchedule& b) {
  if (a.form_.index() != b.form_.index()) return false;
  if (const auto* c = std::get_if<DriveSchedule::Constant>(&a.form_))
    return c->value == std::get<DriveSchedule::Constant>(b.form_).value;
  return std::get<DriveSchedule::Cubic>(a.form_).coefficients ==
         std::get<DriveSchedule::Cubic>(b.form_).coefficients;
}

void ChainModel::validate() const {
  if (m < 1) throw std::invalid_argument("chain needs at least one site");
  if (interaction.rows() != m || interaction.cols() != m)
    throw std::invalid_argument("interaction matrix must be " + std::to_string(m) + "x" +
                                std::to_string(m));
  for (int i = 0; i < m; ++i) {
    if (interaction(i, i) != 0.0) throw std::invalid_argument("interaction diagonal must be zero");
    for (int j = 0; j < m; ++j) {
      if (!std::isfinite(interaction(i, j)))
        throw std::invalid_argument("interaction entries must be finite");
      if (interaction(i, j) != interaction(j, i))
        throw std::invalid_argument("interaction matrix must be symmetric");
    }
  }
}

ChainModel ChainModel::nearest_neighbor(int m, DriveSchedule rabi, DriveSchedule detuning,
                                        double coupling) {
  ChainModel model{m, rabi, detuning, RealMatrix::Zero(m, m)};
  for (int i = 0; i + 1 < m; ++i) model.interaction(i, i + 1) = model.interaction(i + 1, i) = coupling;
  return model;
}

Complex site_overlap(Complex p, Complex q) noexcept {
  // Same as site_elements({p, 1}, {q, 1}).overlap.
  return (1.0 + std::conj(p) * q) / std::sqrt((1.0 + std::norm(p)) * (1.0 + std::norm(q)));
}

ComplexMatrix overlap_matrix(std::span<const CoherentBasisVector> basis) {
  check_uniform(basis);
  const auto n = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix gamma(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    gamma(m, m) = 1.0;
    for (Eigen::Index l = m + 1; l < n; ++l) {
      Complex prod = 1.0;
      for (std::size_t i = 0; i < basis[m].size(); ++i)
        prod *= site_elements(basis[m].site(i), basis[l].site(i)).overlap;
      gamma(m, l) = prod;
      gamma(l, m) = std::conj(prod);
    }
  }
  return gamma;
}

MatrixSet evaluate_matrices(std::span<const CoherentBasisVector> basis,
                            std::span<const SpinorRate> derivatives,
                            const ChainModel& model, double t_us) {
  check_uniform(basis);
  const std::size_t m = basis.front().size();
  check_model(model, m);
  const bool with_chi = !derivatives.empty();
  if (with_chi) check_derivatives(basis, derivatives);

  const CouplingTable couplings(model.interaction);
  const double rabi = model.rabi(t_us);
  const double detuning = model.detuning(t_us);
  const auto scales = inverse_norms(basis);
  const auto n = static_cast<Eigen::Index>(basis.size());

  MatrixSet out{ComplexMatrix(n, n), ComplexMatrix(n, n),
                with_chi ? ComplexMatrix(n, n) : ComplexMatrix()};
  PairKernel kernel(m);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index k = 0; k < n; ++k) {
      // Gamma and H are Hermitian; the lower triangle only feeds chi.
      if (k < b && !with_chi) continue;
      kernel.load(basis[b].sites(), scales[b], basis[k].sites(), scales[k],
                  with_chi ? derivatives[k].data() : nullptr);
      if (with_chi) out.chi(b, k) = kernel.chi();
      if (k < b) continue;
      if (k == b) {
        out.overlap(b, b) = 1.0;
        out.hamiltonian(b, b) = kernel.hamiltonian(rabi, detuning, couplings).real();
        continue;
      }
      const Complex g = kernel.overlap();
      const Complex h = kernel.hamiltonian(rabi, detuning, couplings);
      out.overlap(b, k) = g;
      out.overlap(k, b) = std::conj(g);
      out.hamiltonian(b, k) = h;
      out.hamiltonian(k, b) = std::conj(h);
    }
  }
  return out;
}

ComplexMatrix hamiltonian_matrix(std::span<const CoherentBasisVector> basis,
                                 const ChainModel& model, double t_us) {
  return evaluate_matrices(basis, {}, model, t_us).hamiltonian;
}

ComplexMatrix hamiltonian_matrix_ratio(std::span<const CoherentBasisVector> basis,
                                       const ChainModel& model, double t_us) {
  check_uniform(basis);
  const std::size_t m = basis.front().size();
  check_model(model, m);
  const double rabi = model.rabi(t_us);
  const double detuning = model.detuning(t_us);
  const auto n = static_cast<Eigen::Index>(basis.size());
  const ComplexMatrix gamma = overlap_matrix(basis);

  ComplexMatrix h(n, n);
  std::vector<Complex> g(m);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index k = 0; k < n; ++k) {
      Complex bracket = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const SiteSpinor& p = basis[b].site(i);
        const SiteSpinor& q = basis[k].site(i);
        const Complex den = guarded_denominator(p, q);
        g[i] = std::conj(p.num - p.den) * (q.num - q.den) / den;
        bracket += 0.5 * rabi * (std::conj(p.num) * q.num - std::conj(p.den) * q.den) / den -
                   0.5 * detuning * g[i];
      }
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
          bracket += 0.25 * model.interaction(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j)) *
                     g[i] * g[j];
      h(b, k) = bracket * gamma(b, k);
    }
  }
  return h;
}

namespace {

// Mean-field coefficient multiplying (xi^2 - 1)/2 on each site.
std::vector<double> mean_field(const CoherentBasisVector& vector, const ChainModel& model,
                               double t_us) {
  const std::size_t m = vector.size();
  check_model(model, m);
  const double detuning = model.detuning(t_us);
  std::vector<double> population(m);
  for (std::size_t j = 0; j < m; ++j) {
    const SiteSpinor& s = vector.site(j);
    population[j] = 0.5 * std::norm(s.num - s.den) / s.norm2();
  }
  std::vector<double> field(m, -detuning);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (j != i)
        field[i] += model.interaction(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                    population[j];
  return field;
}

}  // namespace

std::vector<Complex> xi_time_derivative(const CoherentBasisVector& vector, const ChainModel& model,
                                        double t_us) {
  const auto field = mean_field(vector, model, t_us);
  const double rabi = model.rabi(t_us);
  std::vector<Complex> rate(vector.size());
  for (std::size_t i = 0; i < vector.size(); ++i) {
    const Complex xi = vector.xi(i);
    if (!is_finite(xi)) throw NumericalError("xi is infinite on site " + std::to_string(i));
    rate[i] = -kI * (rabi * xi + 0.5 * (xi * xi - 1.0) * field[i]);
  }
  return rate;
}

SpinorRate spinor_time_derivative(const CoherentBasisVector& vector, const ChainModel& model,
                                  double t_us) {
  // xi = num/den with dxi/dt = a xi^2 + b xi + c lifts to
  //   num' = (b/2) num + c den,  den' = -a num - (b/2) den.
  const auto field = mean_field(vector, model, t_us);
  const double rabi = model.rabi(t_us);
  SpinorRate rate(vector.size());
  for (std::size_t i = 0; i < vector.size(); ++i) {
    const SiteSpinor& s = vector.site(i);
    const double f = 0.5 * field[i];
    rate[i].num = -kI * (0.5 * rabi * s.num - f * s.den);
    rate[i].den = kI * (f * s.num + 0.5 * rabi * s.den);
  }
  return rate;
}

MatrixSet propagation_matrices(std::span<const CoherentBasisVector> basis, const ChainModel& model,
                               double t_us) {
  check_uniform(basis);
  const std::size_t m = basis.front().size();
  check_model(model, m);
  const CouplingTable couplings(model.interaction);
  const double rabi = model.rabi(t_us);
  const double detuning = model.detuning(t_us);
  const auto scales = inverse_norms(basis);
  std::vector<std::vector<double>> half_fields;
  half_fields.reserve(basis.size());
  for (const auto& v : basis) {
    auto f = mean_field(v, model, t_us);
    for (auto& x : f) x *= 0.5;
    half_fields.push_back(std::move(f));
  }

  const auto n = static_cast<Eigen::Index>(basis.size());
  MatrixSet out{ComplexMatrix(n, n), ComplexMatrix(n, n), ComplexMatrix(n, n)};
  PairKernel kernel(m);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index k = b; k < n; ++k) {
      kernel.load(basis[b].sites(), scales[b], basis[k].sites(), scales[k], nullptr);
      kernel.reduce();
      const Complex h = kernel.reduced_single(rabi, detuning) + kernel.interaction(couplings);
      out.chi(b, k) = kernel.reduced_chi(rabi, half_fields[k], false);
      if (k == b) {
        out.overlap(b, b) = 1.0;
        out.hamiltonian(b, b) = h.real();
        continue;
      }
      out.chi(k, b) = kernel.reduced_chi(rabi, half_fields[b], true);
      const Complex g = kernel.overlap();
      out.overlap(b, k) = g;
      out.overlap(k, b) = std::conj(g);
      out.hamiltonian(b, k) = h;
      out.hamiltonian(k, b) = std::conj(h);
    }
  }
  return out;
}

SpinorRate spinor_rate_from_xi(const CoherentBasisVector& vector, std::span<const Complex> xi_rate) {
  if (xi_rate.size() != vector.size())
    throw std::invalid_argument("derivative list length differs from site count");
  SpinorRate rate(vector.size());
  for (std::size_t i = 0; i < vector.size(); ++i) rate[i] = {vector.site(i).den * xi_rate[i], 0.0};
  return rate;
}

ComplexMatrix coupling_matrix_chi(std::span<const CoherentBasisVector> basis,
                                  std::span<const SpinorRate> derivatives) {
  check_uniform(basis);
  check_derivatives(basis, derivatives);
  const std::size_t m = basis.front().size();
  const auto scales = inverse_norms(basis);
  const auto n = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix chi(n, n);
  PairKernel kernel(m);
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index k = 0; k < n; ++k) {
      kernel.load(basis[b].sites(), scales[b], basis[k].sites(), scales[k], derivatives[k].data());
      chi(b, k) = kernel.chi();
    }
  return chi;
}

ComplexMatrix coupling_matrix_chi(std::span<const CoherentBasisVector> basis,
                                  std::span<const std::vector<Complex>> xi_rates) {
  check_derivatives(basis, xi_rates);
  std::vector<SpinorRate> rates;
  rates.reserve(basis.size());
  for (std::size_t l = 0; l < basis.size(); ++l) rates.push_back(spinor_rate_from_xi(basis[l], xi_rates[l]));
  return coupling_matrix_chi(basis, std::span<const SpinorRate>(rates));
}

ComplexMatrix coupling_matrix_chi_ratio(std::span<const CoherentBasisVector> basis,
                                        std::span<const std::vector<Complex>> xi_rates) {
  check_uniform(basis);
  check_derivatives(basis, xi_rates);
  const std::size_t m = basis.front().size();
  const auto n = static_cast<Eigen::Index>(basis.size());
  const ComplexMatrix gamma = overlap_matrix(basis);
  std::vector<SpinorRate> rates;
  for (std::size_t l = 0; l < basis.size(); ++l) rates.push_back(spinor_rate_from_xi(basis[l], xi_rates[l]));
  ComplexMatrix chi(n, n);
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index k = 0; k < n; ++k) {
      Complex sum = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const SiteSpinor& p = basis[b].site(i);
        const SiteSpinor& q = basis[k].site(i);
        const SiteSpinor& qd = rates[k][i];
        sum += spinor_inner(p, qd) / guarded_denominator(p, q) -
               spinor_inner(q, qd).real() / q.norm2();
      }
      chi(b, k) = sum * gamma(b, k);
    }
  return chi;
}

AmplitudeRhs amplitude_rhs(const WaveFunction& wave, const ComplexMatrix& overlap,
                           const ComplexMatrix& chi, const ComplexMatrix& hamiltonian,
                           double cutoff) {
  const auto n = static_cast<Eigen::Index>(wave.size());
  if (overlap.rows() != n || chi.rows() != n || hamiltonian.rows() != n ||
      wave.amplitudes.size() != n)
    throw std::invalid_argument("matrix sizes do not match the wave function");
  const ComplexVector rhs = (-chi - kI * hamiltonian) * wave.amplitudes;
  auto solved = regularized_solve(overlap, rhs, cutoff);
  return {std::move(solved.x), solved.diagnostics};
}

}  // namespace rydcs
