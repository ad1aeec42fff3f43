#include <doctest.h>

#include <cmath>
#include <random>

#include "dense_oracle.hpp"
#include "rydcs/exact_reference.hpp"
#include "rydcs/observables.hpp"
#include "rydcs/run_config.hpp"

using namespace rydcs;

TEST_CASE("dense Hamiltonian examples") {
  const ChainModel one{1, DriveSchedule::constant(3.0), DriveSchedule::constant(0.0), RealMatrix::Zero(1, 1)};
  const ComplexMatrix h1 = build_dense_hamiltonian(one, 0.0);
  CHECK(std::abs(h1(0, 1) - 1.5) < 1e-15);
  CHECK(std::abs(h1(1, 0) - 1.5) < 1e-15);
  CHECK(std::abs(h1(0, 0)) < 1e-15);
  CHECK(std::abs(h1(1, 1)) < 1e-15);

  const double v = 7.0;
  const ChainModel two = ChainModel::nearest_neighbor(2, DriveSchedule::constant(0.0), DriveSchedule::constant(0.0), v);
  const ComplexMatrix h2 = build_dense_hamiltonian(two, 0.0);
  ComplexMatrix want = ComplexMatrix::Zero(4, 4);
  want(3, 3) = v;
  CHECK(oracle::max_abs(h2 - want) < 1e-15);
}

TEST_CASE("dense Hamiltonian matches the Kronecker oracle and is Hermitian") {
  std::mt19937_64 rng(41);
  for (int m = 1; m <= 6; ++m)
    for (int trial = 0; trial < 5; ++trial) {
      const ChainModel model = oracle::random_model(rng, m);
      const double t = 0.7 * trial;
      const ComplexMatrix h = build_dense_hamiltonian(model, t);
      CHECK(oracle::max_abs(h - oracle::hamiltonian(model, t)) < 1e-12);
      CHECK(oracle::max_abs(h - h.adjoint()) == 0.0);
    }
}

TEST_CASE("single-site Rabi oscillation") {
  const double omega = kTwoPi * 2.0;
  const ChainModel model{1, DriveSchedule::constant(omega), DriveSchedule::constant(0.0), RealMatrix::Zero(1, 1)};
  const auto states = propagate_exact(DenseState::classical(ClassicalConfiguration::ground(1)), model, 1.0, 1e-4, 0.05);
  CHECK(states.size() == 21);
  for (const auto& s : states) {
    const double want = std::pow(std::sin(omega * s.time_us / 2.0), 2);
    CHECK(std::abs(state_probability(s, ClassicalConfiguration(1u, 1)) - want) < 1e-9);
  }
}

TEST_CASE("norm and energy are conserved") {
  RunConfig q = preset(ScenarioKind::QuenchZ2, 6, SubsetKind::All, false);
  const ChainModel model = q.chain();
  const auto states = propagate_exact(DenseState::classical(ClassicalConfiguration::z2(6)), model, 2.0, 1e-4, 0.5);
  const ComplexMatrix h = build_dense_hamiltonian(model, 0.0);
  const double e0 = (states.front().amplitudes.adjoint() * h * states.front().amplitudes)(0).real();
  for (const auto& s : states) {
    CHECK(std::abs(s.norm() - 1.0) < 1e-9);
    CHECK(std::abs((s.amplitudes.adjoint() * h * s.amplitudes)(0).real() - e0) < 1e-7);
  }
  RunConfig p = preset(ScenarioKind::PreparationSweep, 5, SubsetKind::All, false);
  const auto swept = propagate_exact(DenseState::classical(ClassicalConfiguration::ground(5)), p.chain(), 3.0, 5e-5, 3.0);
  CHECK(std::abs(swept.back().norm() - 1.0) < 1e-9);
}

TEST_CASE("propagation converges on the oracle exponential") {
  // Constant drive: compare with exp(-iHt) from the oracle's eigendecomposition.
  RunConfig q = preset(ScenarioKind::QuenchZ2, 4, SubsetKind::All, false);
  const ChainModel model = q.chain();
  const ComplexMatrix h = oracle::hamiltonian(model, 0.0);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
  const double t = 0.5;
  const ComplexVector phases = (eig.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp();
  const DenseState start = DenseState::classical(ClassicalConfiguration::z2(4));
  const ComplexVector want = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint() * start.amplitudes;
  const auto states = propagate_exact(start, model, t, 1e-4, t);
  CHECK((states.back().amplitudes - want).norm() < 1e-7);
}

TEST_CASE("coherent expansion maps onto the classical basis") {
  std::mt19937_64 rng(42);
  for (int m = 1; m <= 4; ++m) {
    WaveFunction w;
    w.basis = oracle::random_basis(rng, m, 3);
    w.basis.push_back(oracle::random_spinor_vector(rng, m));
    w.amplitudes = ComplexVector::Random(4);
    const ComplexVector want = oracle::basis_columns(w.basis) * w.amplitudes;
    CHECK((to_dense(w).amplitudes - want).norm() < 1e-13);
  }
}

TEST_CASE("exact engine validation") {
  const ChainModel model = ChainModel::nearest_neighbor(2, DriveSchedule::constant(1.0), DriveSchedule::constant(0.0), 1.0);
  const DenseState z = DenseState::classical(ClassicalConfiguration::ground(2));
  CHECK_THROWS(propagate_exact(DenseState::classical(ClassicalConfiguration::ground(3)), model, 1.0, 1e-3, 0.1));
  CHECK_THROWS(propagate_exact(z, model, 1.0, 0.0, 0.1));
  CHECK_THROWS(propagate_exact(z, model, -1.0, 1e-3, 0.1));
  CHECK_THROWS(propagate_exact(z, model, 1.0, 3e-3, 0.1));
  CHECK(propagate_exact(z, model, 0.0, 1e-3, 0.1).size() == 1);
}
