#pragma once

#include <cstddef>
#include <vector>

#include "rydcs/basis_sampling.hpp"
#include "rydcs/observables.hpp"

namespace rydcs {

struct TrajectorySample {
  ObservableSample observables;
  double max_abs_xi = 1.0;
  double cond_gamma = 1.0;
  std::size_t discarded_directions = 0;
};

/// One application of the periodic projector.
struct ProjectionEvent {
  double time_us = 0.0;
  double norm_before = 0.0;
  double norm_after = 0.0;  // before any renormalization
  double discarded_norm = 0.0;
};

struct TrajectoryRecord {
  std::vector<ClassicalConfiguration> tracked;
  std::vector<TrajectorySample> samples;
  std::vector<ProjectionEvent> projections;
  std::size_t basis_size = 0;
  std::size_t substeps = 0;          // RK4 steps actually taken
  std::size_t unresolved_steps = 0;  // adaptive steps that hit max_halvings
};

}  // namespace rydcs
