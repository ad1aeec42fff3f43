#include <doctest.h>

#include <cmath>
#include <random>

#include "dense_oracle.hpp"
#include "rydcs/exact_reference.hpp"
#include "rydcs/observables.hpp"

using namespace rydcs;

namespace {

double dense_expectation(const ComplexMatrix& op, const ComplexVector& psi) {
  return (psi.adjoint() * op * psi)(0).real();
}

}  // namespace

TEST_CASE("domain-wall values of classical configurations") {
  CHECK(domain_wall_value(ClassicalConfiguration::ground(7)) == doctest::Approx(8.0 / 7.0));
  CHECK(domain_wall_value(ClassicalConfiguration::z2(7)) == 0.0);
  CHECK(domain_wall_value(ClassicalConfiguration::z2_shifted(7)) == doctest::Approx(2.0 / 7.0));
  CHECK(domain_wall_value(ClassicalConfiguration::from_string("rr")) == doctest::Approx(0.5));
  for (int m = 2; m <= 8; ++m) {
    const ComplexMatrix d = oracle::domain_wall_operator(m);
    for (const auto& c : enumerate(SubsetKind::All, m))
      CHECK(std::abs(domain_wall_value(c) - d(c.mask(), c.mask()).real()) < 1e-14);
  }
}

TEST_CASE("uniform superposition on two sites") {
  // xi = inf on every site is (|g> + |r>)/sqrt(2).
  WaveFunction w;
  w.basis = {CoherentBasisVector::from_spinors({{1.0, 0.0}, {1.0, 0.0}})};
  w.amplitudes = ComplexVector::Ones(1);
  CHECK(domain_wall_density_cs(w) == doctest::Approx(0.75));
  CHECK(domain_wall_density_dense(to_dense(w)) == doctest::Approx(0.75));
  for (const auto& c : enumerate(SubsetKind::All, 2)) CHECK(state_probability(w, c) == doctest::Approx(0.25));
}

TEST_CASE("coherent observables agree with the dense oracle") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 120; ++trial) {
    const int m = 2 + trial % 3;
    WaveFunction w;
    w.basis = oracle::random_basis(rng, m, 2 + trial % 4);
    if (trial % 2) w.basis.push_back(oracle::random_spinor_vector(rng, m));
    w.amplitudes = ComplexVector::Random(static_cast<Eigen::Index>(w.size()));
    w.amplitudes /= w.norm();
    const ComplexVector psi = oracle::basis_columns(w.basis) * w.amplitudes;
    CHECK(std::abs(domain_wall_density_cs(w) - dense_expectation(oracle::domain_wall_operator(m), psi)) < 1e-9);
    const DenseState d = to_dense(w);
    CHECK(std::abs(domain_wall_density_dense(d) - domain_wall_density_cs(w)) < 1e-9);
    for (const auto& c : enumerate(SubsetKind::All, m)) {
      CHECK(std::abs(state_probability(w, c) - std::norm(psi(c.mask()))) < 1e-12);
      CHECK(std::abs(state_probability(d, c) - state_probability(w, c)) < 1e-12);
    }
  }
}

TEST_CASE("classical overlaps of seeds") {
  for (const auto& a : enumerate(SubsetKind::All, 3))
    for (const auto& b : enumerate(SubsetKind::All, 3)) {
      const auto seed = config_to_coherent(b);
      const Complex o = static_cast<double>(seed.sign) * classical_overlap(a, seed.vector);
      CHECK(std::abs(o - (a == b ? 1.0 : 0.0)) < 1e-15);
    }
}

TEST_CASE("observe fills every field") {
  const DenseState z2 = DenseState::classical(ClassicalConfiguration::z2(5));
  const std::vector<ClassicalConfiguration> tracked{ClassicalConfiguration::ground(5), ClassicalConfiguration::z2(5)};
  const ObservableSample s = observe(z2, tracked);
  CHECK(s.norm == 1.0);
  CHECK(s.probabilities == std::vector<double>{0.0, 1.0});
  CHECK(s.domain_wall_density == 0.0);
  CHECK(std::isnan(observe(DenseState::classical(ClassicalConfiguration::ground(1)), {}).domain_wall_density));
  CHECK_THROWS(observe(z2, std::vector<ClassicalConfiguration>{ClassicalConfiguration::ground(4)}));
}
