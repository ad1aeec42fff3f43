#pragma once

#include <span>
#include <vector>

#include "rydcs/basis_sampling.hpp"
#include "rydcs/core_model.hpp"

namespace rydcs {

struct DenseState;

struct ObservableSample {
  double time_us = 0.0;
  double norm = 0.0;
  std::vector<double> probabilities;  // aligned with the tracked configuration list
  double domain_wall_density = 0.0;  // NaN for single-site chains
};

/// <zeta|xi>: component of one coherent basis vector on a classical state.
Complex classical_overlap(const ClassicalConfiguration& config,
                          const CoherentBasisVector& vector);

/// |<zeta|Psi>|^2.
double state_probability(const WaveFunction& wave, const ClassicalConfiguration& config);
double state_probability(const DenseState& state, const ClassicalConfiguration& config);

/// Per-qubit domain-wall count of a classical configuration: same-state
/// neighbours plus ground-state chain ends, divided by the site count.
double domain_wall_value(const ClassicalConfiguration& config);

/// <Psi|D|Psi> for a coherent-state expansion. Throws NumericalError if the
/// imaginary part exceeds 1e-9.
double domain_wall_density_cs(const WaveFunction& wave);
double domain_wall_density_dense(const DenseState& state);

ObservableSample observe(const WaveFunction& wave, std::span<const ClassicalConfiguration> tracked);
ObservableSample observe(const DenseState& state, std::span<const ClassicalConfiguration> tracked);

}  // namespace rydcs
