#pragma once

// Reference propagation in the complete, fixed classical basis. Amplitudes are
// indexed by configuration bitmask (site 0 = least significant bit).

#include <span>
#include <vector>

#include "rydcs/basis_sampling.hpp"
#include "rydcs/core_model.hpp"
#include "rydcs/trajectory.hpp"

namespace rydcs {

inline constexpr int kMaxDenseSites = 14;

struct DenseState {
  ComplexVector amplitudes;
  int sites = 0;
  double time_us = 0.0;

  static DenseState classical(const ClassicalConfiguration& config);
  double norm() const { return amplitudes.norm(); }
};

/// Explicit 2^M x 2^M Hamiltonian at time t.
ComplexMatrix build_dense_hamiltonian(const ChainModel& model, double t_us);

/// Re-expresses a coherent-state wave function in the classical basis.
DenseState to_dense(const WaveFunction& wave);

/// Fixed-step RK4 on i d/dt a = H(t) a. Returns the state at t = 0 and every
/// sample_interval up to t_max. step must divide sample_interval.
std::vector<DenseState> propagate_exact(const DenseState& initial, const ChainModel& model,
                                        double t_max_us, double step_us,
                                        double sample_interval_us);

/// Convenience wrapper recording observables in the same layout as the
/// coherent-state engine.
TrajectoryRecord run_exact(const DenseState& initial, const ChainModel& model, double t_max_us,
                           double step_us, double sample_interval_us,
                           std::span<const ClassicalConfiguration> tracked);

}  // namespace rydcs
