#include <doctest.h>

#include <cmath>
#include <random>

#include "dense_oracle.hpp"
#include "rydcs/exact_reference.hpp"
#include "rydcs/observables.hpp"
#include "rydcs/propagation.hpp"
#include "rydcs/run_config.hpp"

using namespace rydcs;

namespace {

WaveFunction single_vector(const CoherentBasisVector& v) {
  WaveFunction w;
  w.basis = {v};
  w.amplitudes = ComplexVector::Ones(1);
  return w;
}

ComplexVector dense(const WaveFunction& w) { return to_dense(w).amplitudes; }

WaveFunction random_wave(std::mt19937_64& rng, int m, int n) {
  WaveFunction w;
  w.basis = oracle::random_basis(rng, m, n, 1.0);
  w.amplitudes = ComplexVector::Random(n);
  w.amplitudes /= w.norm();
  return w;
}

// Final dense state of the M = 2 quench run for `t` with fixed RK4 at `h`.
ComplexVector quench_final(double h, double t) {
  RunConfig c = preset(ScenarioKind::QuenchZ2, 2, SubsetKind::All, false);
  c.t_max_us = t;
  c.sample_interval_us = t;
  c.integrator.method = IntegratorMethod::FixedRk4;
  c.integrator.step_us = h;
  WaveFunction final_state;
  run(c.scenario_spec(), c.integrator, c.projection, {}, &final_state);
  return dense(final_state);
}

}  // namespace

TEST_CASE("zero generator leaves the state unchanged") {
  std::mt19937_64 rng(31);
  const ChainModel idle{3, DriveSchedule::constant(0.0), DriveSchedule::constant(0.0), RealMatrix::Zero(3, 3)};
  const WaveFunction w = random_wave(rng, 3, 4);
  WaveFunction out = w;
  for (int k = 0; k < 10; ++k) out = step(out, idle, {});
  CHECK(out.time_us == doctest::Approx(0.01));
  CHECK((dense(out) - dense(w)).norm() < 1e-14);
  for (std::size_t l = 0; l < w.size(); ++l)
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(out.basis[l].xi(i) - w.basis[l].xi(i)) < 1e-13);
}

TEST_CASE("single site without detuning rotates xi on its circle") {
  const double omega = 2.0;
  const ChainModel model{1, DriveSchedule::constant(omega), DriveSchedule::constant(0.0), RealMatrix::Zero(1, 1)};
  WaveFunction w = single_vector(CoherentBasisVector(std::vector<Complex>{1.0}));
  IntegratorSettings s;
  s.step_us = 1e-3;
  for (int k = 0; k < 1000; ++k) {
    w = step(w, model, s);
    REQUIRE(std::abs(std::abs(w.basis[0].xi(0)) - 1.0) < 1e-12);
  }
  CHECK(std::abs(w.basis[0].xi(0) - std::exp(Complex(0.0, -omega))) < 1e-10);
  // One vector is an exact solution: the dense state matches exp(-iHt).
  const ComplexMatrix h = oracle::hamiltonian(model, 0.0);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
  const ComplexVector phases = (eig.eigenvalues().cast<Complex>() * Complex(0.0, -1.0)).array().exp();
  const ComplexVector start = oracle::product_state(CoherentBasisVector(std::vector<Complex>{1.0}));
  const ComplexVector want = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint() * start;
  CHECK((dense(w) - want).norm() < 1e-10);
}

TEST_CASE("initialize examples") {
  RunConfig c = preset(ScenarioKind::QuenchZ2, 7, SubsetKind::Isolated, false);
  const WaveFunction w = initialize(c.scenario_spec());
  CHECK(w.size() == 34);
  CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(state_probability(w, ClassicalConfiguration::z2(7)) == doctest::Approx(1.0).epsilon(1e-14));
  const ComplexVector d = dense(w);
  CHECK(std::abs(d(ClassicalConfiguration::z2(7).mask()) - Complex(1.0)) < 1e-14);
  RunConfig g = preset(ScenarioKind::PreparationSweep, 4, SubsetKind::All, false);
  CHECK(initialize(g.scenario_spec()).size() == 16);
}

TEST_CASE("projection onto the full subset is exact") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 1 + trial % 4;
    const WaveFunction w = random_wave(rng, m, 3 + trial % 3);
    const auto p = project(w, SubsetKind::All, false);
    CHECK(p.event.norm_before == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(p.event.norm_after - 1.0) < 1e-12);
    CHECK(std::abs(p.event.discarded_norm) < 1e-12);
    CHECK((dense(p.wave) - dense(w)).norm() < 1e-12);
    // Idempotent.
    const auto again = project(p.wave, SubsetKind::All, false);
    CHECK((again.wave.amplitudes - p.wave.amplitudes).norm() < 1e-13);
  }
}

TEST_CASE("projection onto a subset discards the complement") {
  std::mt19937_64 rng(33);
  const WaveFunction w = random_wave(rng, 4, 5);
  const auto p = project(w, SubsetKind::Isolated, false);
  const ComplexVector full = dense(w);
  double kept = 0.0;
  for (const auto& c : enumerate(SubsetKind::Isolated, 4)) kept += std::norm(full(c.mask()));
  CHECK(p.event.norm_after == doctest::Approx(std::sqrt(kept)).epsilon(1e-12));
  CHECK(p.event.discarded_norm == doctest::Approx(p.event.norm_before - p.event.norm_after));
  CHECK(p.wave.size() == 8);
  const auto renormalized = project(w, SubsetKind::Isolated, true);
  CHECK(renormalized.wave.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // A classical state inside the target passes through unchanged.
  RunConfig c = preset(ScenarioKind::QuenchZ2, 5, SubsetKind::Isolated, false);
  const WaveFunction z2 = initialize(c.scenario_spec());
  const auto pz = project(z2, SubsetKind::Isolated, false);
  CHECK((dense(pz.wave) - dense(z2)).norm() < 1e-14);
}

TEST_CASE("fixed RK4 converges at fourth order on the two-site quench") {
  const double t = 0.5;
  const ComplexVector a = quench_final(0.01, t);
  const ComplexVector b = quench_final(0.005, t);
  const ComplexVector c = quench_final(0.0025, t);
  const double ratio = (a - b).norm() / (b - c).norm();
  CAPTURE(ratio);
  CHECK(std::log2(ratio) > 3.8);
}

TEST_CASE("coherent run of the two-site quench matches the exact engine") {
  RunConfig c = preset(ScenarioKind::QuenchZ2, 2, SubsetKind::All, false);
  c.t_max_us = 1.0;
  const auto tracked = c.tracked_configurations();
  const auto cs = run(c.scenario_spec(), c.integrator, c.projection, tracked);
  const auto ex = run_exact(DenseState::classical(ClassicalConfiguration::z2(2)), c.chain(), 1.0, 1e-4,
                            c.sample_interval_us, tracked);
  REQUIRE(cs.samples.size() == ex.samples.size());
  CHECK(cs.samples.size() == 101);
  for (std::size_t k = 0; k < cs.samples.size(); ++k) {
    for (std::size_t j = 0; j < tracked.size(); ++j)
      CHECK(std::abs(cs.samples[k].observables.probabilities[j] - ex.samples[k].observables.probabilities[j]) <
            1e-5);
    CHECK(std::abs(cs.samples[k].observables.norm - 1.0) < 1e-6);
  }
}

TEST_CASE("adaptive steps reach the tolerance where fixed steps do not") {
  RunConfig c = preset(ScenarioKind::PreparationSweep, 3, SubsetKind::All, false);
  c.t_max_us = 1.5;
  c.sample_interval_us = 1.5;
  const auto tracked = c.tracked_configurations();
  const auto ex = run_exact(DenseState::classical(ClassicalConfiguration::ground(3)), c.chain(), 1.5, 1e-5, 1.5,
                            tracked);
  c.integrator.method = IntegratorMethod::AdaptiveRk4;
  c.integrator.tolerance = 1e-8;
  const auto ad = run(c.scenario_spec(), c.integrator, c.projection, tracked);
  CHECK(ad.substeps >= whole_steps(1.5, c.integrator.step_us, "t"));
  CHECK(ad.unresolved_steps == 0);
  for (std::size_t j = 0; j < tracked.size(); ++j)
    CHECK(std::abs(ad.samples.back().observables.probabilities[j] - ex.samples.back().observables.probabilities[j]) <
          1e-5);
}

TEST_CASE("runs are deterministic and zero duration gives one sample") {
  RunConfig c = preset(ScenarioKind::QuenchZ2, 3, SubsetKind::IsolatedPlusSinglePair, true);
  c.t_max_us = 0.3;
  const auto tracked = c.tracked_configurations();
  const auto a = run(c.scenario_spec(), c.integrator, c.projection, tracked);
  const auto b = run(c.scenario_spec(), c.integrator, c.projection, tracked);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    CHECK(a.samples[k].observables.probabilities == b.samples[k].observables.probabilities);
    CHECK(a.samples[k].observables.domain_wall_density == b.samples[k].observables.domain_wall_density);
  }
  CHECK(a.projections.size() == 3);
  c.t_max_us = 0.0;
  const auto z = run(c.scenario_spec(), c.integrator, c.projection, tracked);
  CHECK(z.samples.size() == 1);
  CHECK(z.samples[0].observables.probabilities[1] == doctest::Approx(1.0));
}

TEST_CASE("settings validation") {
  IntegratorSettings s;
  CHECK_NOTHROW(s.validate());
  s.step_us = 0.0;
  CHECK_THROWS(s.validate());
  s = {};
  s.step_us = 0.02;
  CHECK_THROWS(s.validate());
  s = {};
  s.tolerance = 0.0;
  CHECK_THROWS(s.validate());
  s = {};
  ProjectionSettings p;
  p.enabled = true;
  p.interval_us = 0.1005;
  CHECK_THROWS(p.validate(s));
  CHECK(parse_integrator_method("adaptive-rk4") == IntegratorMethod::AdaptiveRk4);
  CHECK_THROWS(parse_integrator_method("rk45"));
  CHECK(whole_steps(0.1, 1e-3, "x") == 100);
  CHECK_THROWS(whole_steps(0.1005, 1e-3, "x"));
}
