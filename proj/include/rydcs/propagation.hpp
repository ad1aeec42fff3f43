#pragma once

// Joint RK4 integration of the basis parameters and amplitudes, the periodic
// projector back onto classical configurations, and the scenario driver.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "rydcs/basis_sampling.hpp"
#include "rydcs/core_model.hpp"
#include "rydcs/linear_solve.hpp"
#include "rydcs/trajectory.hpp"

namespace rydcs {

enum class IntegratorMethod {
  FixedRk4,     // one classical RK4 step per step_us
  AdaptiveRk4,  // step doubling; halves step_us locally until the estimate meets tolerance
};

std::string_view to_string(IntegratorMethod method) noexcept;
IntegratorMethod parse_integrator_method(std::string_view text);

struct IntegratorSettings {
  double step_us = 1e-3;
  IntegratorMethod method = IntegratorMethod::FixedRk4;
  double regularization_cutoff = kDefaultRegularizationCutoff;
  // Adaptive only: accepted local difference between one step and two half
  // steps (spinor components and amplitudes, the latter relative to max(1, |a|)),
  // and the deepest subdivision of one step.
  double tolerance = 1e-9;
  int max_halvings = 12;

  /// 0 < step <= 0.01 us, cutoff in (0, 1), tolerance > 0, 0 <= max_halvings <= 30.
  void validate() const;
  friend bool operator==(const IntegratorSettings&, const IntegratorSettings&) = default;
};

struct ProjectionSettings {
  bool enabled = false;
  double interval_us = 0.1;
  SubsetKind target = SubsetKind::All;
  bool renormalize = true;

  /// interval > 0 and an integer multiple of the integrator step.
  void validate(const IntegratorSettings& integrator) const;
  friend bool operator==(const ProjectionSettings&, const ProjectionSettings&) = default;
};

enum class ScenarioKind { QuenchZ2, PreparationSweep, Custom };

std::string_view to_string(ScenarioKind kind) noexcept;
ScenarioKind parse_scenario_kind(std::string_view text);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::Custom;
  ChainModel chain;
  ClassicalConfiguration initial;
  SubsetKind basis = SubsetKind::All;
  double t_max_us = 0.0;
  double sample_interval_us = 0.1;

  void validate(const IntegratorSettings& integrator) const;
};

/// Number of whole steps of `step` contained in `span`; throws when `span`
/// is not an integer multiple to within rounding.
std::size_t whole_steps(double span, double step, std::string_view what);

/// Seeds every configuration of the subset; the amplitude of the initial
/// configuration carries its seed sign so the state is exactly |zeta_initial>.
WaveFunction initialize(const ScenarioSpec& spec);

struct StepDiagnostics {
  double cond_gamma = 1.0;  // worst over the RK4 stages
  std::size_t discarded_directions = 0;
  std::size_t substeps = 1;
  bool unresolved = false;  // adaptive: max_halvings reached above tolerance
};

/// Time derivatives of the full state at the wave's own time.
struct StateRate {
  std::vector<SpinorRate> basis;
  ComplexVector amplitudes;
  SolveDiagnostics diagnostics;
};

StateRate evaluate_rate(const WaveFunction& wave, const ChainModel& model, double cutoff);

/// Advances by settings.step_us. Throws RankCollapseError naming the time on
/// solver failure.
WaveFunction step(const WaveFunction& wave, const ChainModel& model,
                  const IntegratorSettings& settings, StepDiagnostics* diagnostics = nullptr);

struct ProjectionResult {
  WaveFunction wave;
  ProjectionEvent event;
};

/// Re-expresses the wave on fresh classical seeds of the target subset.
ProjectionResult project(const WaveFunction& wave, SubsetKind target, bool renormalize);

/// Integrates for spec.t_max_us, projecting every projection.interval_us when
/// enabled and sampling every spec.sample_interval_us.
TrajectoryRecord run(const ScenarioSpec& spec, const IntegratorSettings& integrator,
                     const ProjectionSettings& projection,
                     std::span<const ClassicalConfiguration> tracked,
                     WaveFunction* final_state = nullptr);

}  // namespace rydcs
