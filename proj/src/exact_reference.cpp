#include "rydcs/exact_reference.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rydcs/propagation.hpp"

namespace rydcs {

namespace {

void check_dense_sites(int m) {
  if (m < 1 || m > kMaxDenseSites)
    throw std::invalid_argument("dense reference supports 1.." + std::to_string(kMaxDenseSites) +
                                " sites, got " + std::to_string(m));
}

// H(t) = diag(t) + Omega(t)/2 * sum_i X_i with X_i flipping bit i.
class DenseGenerator {
 public:
  explicit DenseGenerator(const ChainModel& model)
      : model_(model), dim_(Eigen::Index{1} << model.m), excitations_(dim_), interaction_(dim_) {
    for (Eigen::Index b = 0; b < dim_; ++b) {
      const auto mask = static_cast<std::uint32_t>(b);
      excitations_(b) = std::popcount(mask);
      double e = 0.0;
      for (int i = 0; i < model.m; ++i)
        for (int j = i + 1; j < model.m; ++j)
          if (((mask >> i) & 1u) && ((mask >> j) & 1u)) e += model.interaction(i, j);
      interaction_(b) = e;
    }
  }

  Eigen::Index dim() const { return dim_; }

  Eigen::VectorXd diagonal(double t) const {
    return interaction_ - model_.detuning(t) * excitations_;
  }

  // out = -i H(t) a
  void apply(double t, const ComplexVector& a, ComplexVector& out) const {
    const double half_rabi = 0.5 * model_.rabi(t);
    const double detuning = model_.detuning(t);
    for (Eigen::Index b = 0; b < dim_; ++b) {
      Complex flip = 0.0;
      for (int i = 0; i < model_.m; ++i) flip += a(b ^ (Eigen::Index{1} << i));
      const double diag = interaction_(b) - detuning * excitations_(b);
      out(b) = -kI * (half_rabi * flip + diag * a(b));
    }
  }

 private:
  const ChainModel& model_;
  Eigen::Index dim_;
  Eigen::VectorXd excitations_;
  Eigen::VectorXd interaction_;
};

}  // namespace

DenseState DenseState::classical(const ClassicalConfiguration& config) {
  check_dense_sites(config.sites());
  DenseState s;
  s.sites = config.sites();
  s.amplitudes = ComplexVector::Zero(Eigen::Index{1} << config.sites());
  s.amplitudes(static_cast<Eigen::Index>(config.mask())) = 1.0;
  return s;
}

ComplexMatrix build_dense_hamiltonian(const ChainModel& model, double t_us) {
  check_dense_sites(model.m);
  model.validate();
  const DenseGenerator gen(model);
  const Eigen::Index dim = gen.dim();
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  const Eigen::VectorXd diag = gen.diagonal(t_us);
  const double half_rabi = 0.5 * model.rabi(t_us);
  for (Eigen::Index b = 0; b < dim; ++b) {
    h(b, b) = diag(b);
    for (int i = 0; i < model.m; ++i) h(b ^ (Eigen::Index{1} << i), b) += half_rabi;
  }
  return h;
}

DenseState to_dense(const WaveFunction& wave) {
  wave.validate();
  const int m = static_cast<int>(wave.sites());
  check_dense_sites(m);
  const Eigen::Index dim = Eigen::Index{1} << m;
  DenseState out;
  out.sites = m;
  out.time_us = wave.time_us;
  out.amplitudes = ComplexVector::Zero(dim);
  ComplexVector product(dim);
  for (std::size_t l = 0; l < wave.size(); ++l) {
    // Expand the product state one site at a time; site i toggles bit i.
    product(0) = 1.0;
    Eigen::Index filled = 1;
    for (int i = 0; i < m; ++i) {
      const SiteSpinor& s = wave.basis[l].site(static_cast<std::size_t>(i));
      const double scale = 1.0 / std::sqrt(2.0 * s.norm2());
      const Complex g = (s.num + s.den) * scale, r = (s.num - s.den) * scale;
      for (Eigen::Index b = 0; b < filled; ++b) {
        product(b + filled) = product(b) * r;
        product(b) *= g;
      }
      filled *= 2;
    }
    out.amplitudes += wave.amplitudes(static_cast<Eigen::Index>(l)) * product;
  }
  return out;
}

std::vector<DenseState> propagate_exact(const DenseState& initial, const ChainModel& model,
                                        double t_max_us, double step_us,
                                        double sample_interval_us) {
  check_dense_sites(model.m);
  model.validate();
  if (initial.sites != model.m || initial.amplitudes.size() != (Eigen::Index{1} << model.m))
    throw std::invalid_argument("initial state does not match the chain");
  if (!(step_us > 0.0)) throw std::invalid_argument("step must be positive");
  if (t_max_us < 0.0) throw std::invalid_argument("t_max must be non-negative");
  const std::size_t per_sample = whole_steps(sample_interval_us, step_us, "sample interval");
  const std::size_t total = whole_steps(t_max_us, step_us, "t_max");

  const DenseGenerator gen(model);
  const Eigen::Index dim = gen.dim();
  std::vector<DenseState> out{initial};
  ComplexVector a = initial.amplitudes;
  ComplexVector k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  const double t0 = initial.time_us;
  const double h = step_us;
  for (std::size_t s = 0; s < total; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    gen.apply(t, a, k1);
    tmp = a + 0.5 * h * k1;
    gen.apply(t + 0.5 * h, tmp, k2);
    tmp = a + 0.5 * h * k2;
    gen.apply(t + 0.5 * h, tmp, k3);
    tmp = a + h * k3;
    gen.apply(t + h, tmp, k4);
    a += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((s + 1) % per_sample == 0)
      out.push_back({a, model.m, t0 + static_cast<double>(s + 1) * h});
  }
  return out;
}

TrajectoryRecord run_exact(const DenseState& initial, const ChainModel& model, double t_max_us,
                           double step_us, double sample_interval_us,
                           std::span<const ClassicalConfiguration> tracked) {
  TrajectoryRecord record;
  record.tracked.assign(tracked.begin(), tracked.end());
  record.basis_size = std::size_t{1} << model.m;
  for (const auto& state : propagate_exact(initial, model, t_max_us, step_us, sample_interval_us)) {
    TrajectorySample sample;
    sample.observables = observe(state, tracked);
    record.samples.push_back(std::move(sample));
  }
  return record;
}

}  // namespace rydcs
