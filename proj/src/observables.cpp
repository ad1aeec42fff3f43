#include "rydcs/observables.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rydcs/exact_reference.hpp"

namespace rydcs {

namespace {

constexpr double kImaginaryTolerance = 1e-9;

void check_width(int expected, std::size_t actual) {
  if (static_cast<std::size_t>(expected) != actual)
    throw std::invalid_argument("configuration width " + std::to_string(expected) +
                                " does not match " + std::to_string(actual) + " sites");
}

}  // namespace

Complex classical_overlap(const ClassicalConfiguration& config, const CoherentBasisVector& vector) {
  check_width(config.sites(), vector.size());
  Complex prod = 1.0;
  for (int i = 0; i < config.sites(); ++i) {
    const SiteSpinor& s = vector.site(static_cast<std::size_t>(i));
    const double scale = 1.0 / std::sqrt(2.0 * s.norm2());
    prod *= (config.rydberg(i) ? s.num - s.den : s.num + s.den) * scale;
  }
  return prod;
}

double state_probability(const WaveFunction& wave, const ClassicalConfiguration& config) {
  Complex amp = 0.0;
  for (std::size_t l = 0; l < wave.size(); ++l)
    amp += classical_overlap(config, wave.basis[l]) * wave.amplitudes(static_cast<Eigen::Index>(l));
  return std::norm(amp);
}

double state_probability(const DenseState& state, const ClassicalConfiguration& config) {
  check_width(config.sites(), static_cast<std::size_t>(state.sites));
  return std::norm(state.amplitudes(static_cast<Eigen::Index>(config.mask())));
}

double domain_wall_value(const ClassicalConfiguration& config) {
  const int m = config.sites();
  int count = 0;
  for (int i = 0; i + 1 < m; ++i) count += config.rydberg(i) == config.rydberg(i + 1);
  count += !config.rydberg(0);
  count += !config.rydberg(m - 1);
  return static_cast<double>(count) / m;
}

double domain_wall_density_cs(const WaveFunction& wave) {
  wave.validate();
  const std::size_t m = wave.sites();
  if (m < 2) throw std::invalid_argument("domain-wall density needs at least two sites");
  const std::size_t n = wave.size();

  // D = (1/M) [ sum_i (2 n_i n_{i+1} - n_i - n_{i+1}) - n_1 - n_M + (M+1) ],
  // with every operator product evaluated site by site.
  std::vector<Complex> ov(m), occ(m), pre(m + 1), suf(m + 1);
  Complex total = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < m; ++i) {
        const SiteElements e = site_elements(wave.basis[b].site(i), wave.basis[k].site(i));
        ov[i] = e.overlap;
        occ[i] = e.rydberg;
      }
      pre[0] = 1.0;
      for (std::size_t i = 0; i < m; ++i) pre[i + 1] = pre[i] * ov[i];
      suf[m] = 1.0;
      for (std::size_t i = m; i-- > 0;) suf[i] = suf[i + 1] * ov[i];
      auto one_body = [&](std::size_t i) { return occ[i] * pre[i] * suf[i + 1]; };

      Complex element = static_cast<double>(m + 1) * pre[m] - one_body(0) - one_body(m - 1);
      for (std::size_t i = 0; i + 1 < m; ++i)
        element += 2.0 * occ[i] * occ[i + 1] * pre[i] * suf[i + 2] - one_body(i) - one_body(i + 1);
      total += std::conj(wave.amplitudes(static_cast<Eigen::Index>(b))) *
               wave.amplitudes(static_cast<Eigen::Index>(k)) * element;
    }
  }
  total /= static_cast<double>(m);
  if (std::abs(total.imag()) > kImaginaryTolerance)
    throw NumericalError("domain-wall expectation has imaginary part " +
                         std::to_string(total.imag()));
  return total.real();
}

double domain_wall_density_dense(const DenseState& state) {
  if (state.sites < 2) throw std::invalid_argument("domain-wall density needs at least two sites");
  double total = 0.0;
  for (Eigen::Index b = 0; b < state.amplitudes.size(); ++b) {
    const double weight = std::norm(state.amplitudes(b));
    if (weight != 0.0)
      total += weight * domain_wall_value({static_cast<std::uint32_t>(b), state.sites});
  }
  return total;
}

ObservableSample observe(const WaveFunction& wave, std::span<const ClassicalConfiguration> tracked) {
  ObservableSample out;
  out.time_us = wave.time_us;
  out.norm = wave.norm();
  out.probabilities.reserve(tracked.size());
  for (const auto& c : tracked) out.probabilities.push_back(state_probability(wave, c));
  out.domain_wall_density =
      wave.sites() >= 2 ? domain_wall_density_cs(wave) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

ObservableSample observe(const DenseState& state, std::span<const ClassicalConfiguration> tracked) {
  ObservableSample out;
  out.time_us = state.time_us;
  out.norm = state.norm();
  out.probabilities.reserve(tracked.size());
  for (const auto& c : tracked) out.probabilities.push_back(state_probability(state, c));
  out.domain_wall_density =
      state.sites >= 2 ? domain_wall_density_dense(state) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace rydcs
