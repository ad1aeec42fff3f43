#include "rydcs/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rydcs/observables.hpp"

namespace rydcs {

namespace {

std::string format_time(double t) {
  std::ostringstream os;
  os.precision(12);
  os << t;
  return os.str();
}

// wave + h * rate, at time wave.time + h.
WaveFunction advance(const WaveFunction& wave, const StateRate& rate, double h) {
  WaveFunction out = wave;
  for (std::size_t l = 0; l < out.size(); ++l)
    for (std::size_t i = 0; i < out.sites(); ++i) {
      SiteSpinor& s = out.basis[l].site(i);
      s.num += h * rate.basis[l][i].num;
      s.den += h * rate.basis[l][i].den;
    }
  out.amplitudes += h * rate.amplitudes;
  out.time_us = wave.time_us + h;
  return out;
}

bool all_finite(const WaveFunction& wave) {
  if (!wave.amplitudes.allFinite()) return false;
  for (const auto& v : wave.basis)
    for (const auto& s : v.sites())
      if (!std::isfinite(s.norm2()) || s.norm2() == 0.0) return false;
  return true;
}

double overlap_condition(const WaveFunction& wave) {
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(overlap_matrix(wave.basis),
                                                         Eigen::EigenvaluesOnly);
  const auto& v = eig.eigenvalues();
  return v(0) > 0.0 ? v(v.size() - 1) / v(0) : std::numeric_limits<double>::infinity();
}

}  // namespace

std::string_view to_string(IntegratorMethod method) noexcept {
  return method == IntegratorMethod::AdaptiveRk4 ? "adaptive-rk4" : "fixed-rk4";
}

IntegratorMethod parse_integrator_method(std::string_view text) {
  if (text == "fixed-rk4") return IntegratorMethod::FixedRk4;
  if (text == "adaptive-rk4") return IntegratorMethod::AdaptiveRk4;
  throw std::invalid_argument("unknown integrator method '" + std::string(text) + "'");
}

void IntegratorSettings::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("integrator tolerance must be positive");
  if (max_halvings < 0 || max_halvings > 30)
    throw std::invalid_argument("max_halvings must lie in [0, 30]");
  if (!(step_us > 0.0 && step_us <= 0.01))
    throw std::invalid_argument("integrator step must lie in (0, 0.01] us");
  if (!(regularization_cutoff > 0.0 && regularization_cutoff < 1.0))
    throw std::invalid_argument("regularization cutoff must lie in (0, 1)");
}

void ProjectionSettings::validate(const IntegratorSettings& integrator) const {
  if (!(interval_us > 0.0)) throw std::invalid_argument("projection interval must be positive");
  whole_steps(interval_us, integrator.step_us, "projection interval");
}

std::string_view to_string(ScenarioKind kind) noexcept {
  switch (kind) {
    case ScenarioKind::QuenchZ2: return "quench-z2";
    case ScenarioKind::PreparationSweep: return "preparation-sweep";
    case ScenarioKind::Custom: return "custom";
  }
  return "custom";
}

ScenarioKind parse_scenario_kind(std::string_view text) {
  if (text == "quench-z2") return ScenarioKind::QuenchZ2;
  if (text == "preparation-sweep") return ScenarioKind::PreparationSweep;
  if (text == "custom") return ScenarioKind::Custom;
  throw std::invalid_argument("unknown scenario '" + std::string(text) + "'");
}

void ScenarioSpec::validate(const IntegratorSettings& integrator) const {
  chain.validate();
  if (initial.sites() != chain.m)
    throw std::invalid_argument("initial configuration width differs from chain length");
  if (!(t_max_us >= 0.0)) throw std::invalid_argument("t_max must be non-negative");
  if (!(sample_interval_us >= integrator.step_us))
    throw std::invalid_argument("sample interval must be at least one integrator step");
  whole_steps(sample_interval_us, integrator.step_us, "sample interval");
  whole_steps(t_max_us, integrator.step_us, "t_max");
}

std::size_t whole_steps(double span, double step, std::string_view what) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  const double ratio = span / step;
  const double rounded = std::round(ratio);
  if (rounded < 0.0 || std::abs(ratio - rounded) > 1e-6 * std::max(1.0, ratio))
    throw std::invalid_argument(std::string(what) + " (" + format_time(span) +
                                " us) is not a whole number of " + format_time(step) +
                                " us steps");
  return static_cast<std::size_t>(rounded);
}

WaveFunction initialize(const ScenarioSpec& spec) {
  if (spec.initial.sites() != spec.chain.m)
    throw std::invalid_argument("initial configuration width differs from chain length");
  const auto configs = enumerate(spec.basis, spec.chain.m);
  const auto it = std::find(configs.begin(), configs.end(), spec.initial);
  if (it == configs.end())
    throw std::invalid_argument("initial configuration " + spec.initial.to_string() +
                                " is not part of the '" + std::string(to_string(spec.basis)) +
                                "' subset");
  WaveFunction wave;
  wave.basis.reserve(configs.size());
  wave.amplitudes = ComplexVector::Zero(static_cast<Eigen::Index>(configs.size()));
  for (const auto& c : configs) wave.basis.push_back(config_to_coherent(c).vector);
  wave.amplitudes(it - configs.begin()) = config_to_coherent(*it).sign;
  wave.time_us = 0.0;
  return wave;
}

StateRate evaluate_rate(const WaveFunction& wave, const ChainModel& model, double cutoff) {
  StateRate rate;
  rate.basis.reserve(wave.size());
  for (const auto& v : wave.basis) rate.basis.push_back(spinor_time_derivative(v, model, wave.time_us));
  const MatrixSet mats = propagation_matrices(wave.basis, model, wave.time_us);
  auto amp = amplitude_rhs(wave, mats.overlap, mats.chi, mats.hamiltonian, cutoff);
  rate.amplitudes = std::move(amp.derivative);
  rate.diagnostics = amp.diagnostics;
  return rate;
}

namespace {

WaveFunction rk4(const WaveFunction& wave, const ChainModel& model, double h, double cutoff,
                 StepDiagnostics& diag) {
  auto stage = [&](const WaveFunction& w) {
    try {
      StateRate r = evaluate_rate(w, model, cutoff);
      diag.cond_gamma = std::max(diag.cond_gamma, r.diagnostics.condition);
      diag.discarded_directions = std::max(diag.discarded_directions, r.diagnostics.discarded_directions);
      return r;
    } catch (const RankCollapseError& e) {
      throw RankCollapseError(std::string(e.what()) + " at t = " + format_time(w.time_us) + " us",
                              w.time_us);
    }
  };

  const StateRate k1 = stage(wave);
  const StateRate k2 = stage(advance(wave, k1, 0.5 * h));
  const StateRate k3 = stage(advance(wave, k2, 0.5 * h));
  const StateRate k4 = stage(advance(wave, k3, h));

  WaveFunction out = wave;
  auto combine = [&](Complex SiteSpinor::*part, std::size_t l, std::size_t i) {
    return (h / 6.0) * (k1.basis[l][i].*part + 2.0 * k2.basis[l][i].*part +
                        2.0 * k3.basis[l][i].*part + k4.basis[l][i].*part);
  };
  for (std::size_t l = 0; l < out.size(); ++l) {
    for (std::size_t i = 0; i < out.sites(); ++i) {
      SiteSpinor& s = out.basis[l].site(i);
      s.num += combine(&SiteSpinor::num, l, i);
      s.den += combine(&SiteSpinor::den, l, i);
    }
  }
  out.amplitudes +=
      (h / 6.0) * (k1.amplitudes + 2.0 * k2.amplitudes + 2.0 * k3.amplitudes + k4.amplitudes);
  out.time_us = wave.time_us + h;
  if (!all_finite(out))
    throw NumericalError("state became non-finite at t = " + format_time(out.time_us) + " us");
  // The flow conserves spinor norms; a positive rescale removes the RK4 drift
  // without touching the states.
  for (auto& v : out.basis) v.normalize();
  return out;
}

double local_difference(const WaveFunction& a, const WaveFunction& b) {
  double worst = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l)
    for (std::size_t i = 0; i < a.sites(); ++i) {
      const SiteSpinor &p = a.basis[l].site(i), &q = b.basis[l].site(i);
      worst = std::max({worst, std::abs(p.num - q.num), std::abs(p.den - q.den)});
    }
  const double scale = std::max(1.0, a.amplitudes.cwiseAbs().maxCoeff());
  return std::max(worst, (a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff() / scale);
}

// `full` is one RK4 step of length h from `wave`.
WaveFunction refine(const WaveFunction& wave, const WaveFunction& full, double h, int depth,
                    const ChainModel& model, const IntegratorSettings& settings, StepDiagnostics& diag) {
  const double cutoff = settings.regularization_cutoff;
  const WaveFunction left = rk4(wave, model, 0.5 * h, cutoff, diag);
  WaveFunction both = rk4(left, model, 0.5 * h, cutoff, diag);
  const bool accept = local_difference(full, both) <= settings.tolerance;
  if (accept || depth >= settings.max_halvings) {
    if (!accept) diag.unresolved = true;
    diag.substeps += 1;
    return both;
  }
  const WaveFunction first = refine(wave, left, 0.5 * h, depth + 1, model, settings, diag);
  const WaveFunction next = rk4(first, model, 0.5 * h, cutoff, diag);
  return refine(first, next, 0.5 * h, depth + 1, model, settings, diag);
}

}  // namespace

WaveFunction step(const WaveFunction& wave, const ChainModel& model,
                  const IntegratorSettings& settings, StepDiagnostics* diagnostics) {
  StepDiagnostics diag;
  const double h = settings.step_us;
  WaveFunction out = rk4(wave, model, h, settings.regularization_cutoff, diag);
  if (settings.method == IntegratorMethod::AdaptiveRk4) {
    diag.substeps = 0;
    out = refine(wave, out, h, 1, model, settings, diag);
    out.time_us = wave.time_us + h;
  }
  if (diagnostics) *diagnostics = diag;
  return out;
}

ProjectionResult project(const WaveFunction& wave, SubsetKind target, bool renormalize) {
  wave.validate();
  const int m = static_cast<int>(wave.sites());
  const auto configs = enumerate(target, m);
  ProjectionResult result;
  result.event.time_us = wave.time_us;
  result.event.norm_before = wave.norm();

  WaveFunction& out = result.wave;
  out.time_us = wave.time_us;
  out.basis.reserve(configs.size());
  out.amplitudes = ComplexVector::Zero(static_cast<Eigen::Index>(configs.size()));
  for (std::size_t c = 0; c < configs.size(); ++c) {
    Complex alpha = 0.0;
    for (std::size_t l = 0; l < wave.size(); ++l)
      alpha += classical_overlap(configs[c], wave.basis[l]) *
               wave.amplitudes(static_cast<Eigen::Index>(l));
    auto seed = config_to_coherent(configs[c]);
    out.basis.push_back(std::move(seed.vector));
    out.amplitudes(static_cast<Eigen::Index>(c)) = static_cast<double>(seed.sign) * alpha;
  }
  result.event.norm_after = out.amplitudes.norm();
  result.event.discarded_norm = result.event.norm_before - result.event.norm_after;
  if (renormalize && result.event.norm_after > 0.0) out.amplitudes /= result.event.norm_after;
  return result;
}

TrajectoryRecord run(const ScenarioSpec& spec, const IntegratorSettings& integrator,
                     const ProjectionSettings& projection,
                     std::span<const ClassicalConfiguration> tracked, WaveFunction* final_state) {
  integrator.validate();
  spec.validate(integrator);
  if (projection.enabled) projection.validate(integrator);
  for (const auto& c : tracked)
    if (c.sites() != spec.chain.m)
      throw std::invalid_argument("tracked configuration width differs from chain length");

  const double h = integrator.step_us;
  const std::size_t total = whole_steps(spec.t_max_us, h, "t_max");
  const std::size_t per_sample = whole_steps(spec.sample_interval_us, h, "sample interval");
  const std::size_t per_projection =
      projection.enabled ? whole_steps(projection.interval_us, h, "projection interval") : 0;

  TrajectoryRecord record;
  record.tracked.assign(tracked.begin(), tracked.end());
  WaveFunction wave = initialize(spec);
  record.basis_size = wave.size();

  auto take_sample = [&](double cond, std::size_t discarded) {
    TrajectorySample s;
    s.observables = observe(wave, tracked);
    s.max_abs_xi = wave.max_abs_xi();
    s.cond_gamma = cond;
    s.discarded_directions = discarded;
    record.samples.push_back(std::move(s));
  };
  take_sample(overlap_condition(wave), 0);

  double worst_cond = 1.0;
  std::size_t worst_discarded = 0;
  for (std::size_t s = 0; s < total; ++s) {
    StepDiagnostics diag;
    wave = step(wave, spec.chain, integrator, &diag);
    wave.time_us = static_cast<double>(s + 1) * h;
    worst_cond = std::max(worst_cond, diag.cond_gamma);
    worst_discarded = std::max(worst_discarded, diag.discarded_directions);
    record.substeps += diag.substeps;
    record.unresolved_steps += diag.unresolved ? 1 : 0;

    if (projection.enabled && (s + 1) % per_projection == 0) {
      auto projected = project(wave, projection.target, projection.renormalize);
      wave = std::move(projected.wave);
      record.projections.push_back(projected.event);
    }
    if ((s + 1) % per_sample == 0) {
      take_sample(worst_cond, worst_discarded);
      worst_cond = 1.0;
      worst_discarded = 0;
    }
  }
  if (final_state) *final_state = std::move(wave);
  return record;
}

}  // namespace rydcs
