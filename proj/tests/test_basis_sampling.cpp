#include <doctest.h>

#include <set>

#include "dense_oracle.hpp"
#include "rydcs/basis_sampling.hpp"

using namespace rydcs;

namespace {

// Longest run of consecutive Rydberg sites and the number of adjacent pairs,
// computed site by site from the string form.
std::pair<int, int> runs(const ClassicalConfiguration& c) {
  const std::string s = c.to_string();
  int longest = 0, current = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    current = s[i] == 'r' ? current + 1 : 0;
    longest = std::max(longest, current);
    if (i > 0 && s[i] == 'r' && s[i - 1] == 'r') ++pairs;
  }
  return {longest, pairs};
}

std::vector<std::uint32_t> masks(const std::vector<ClassicalConfiguration>& cs) {
  std::vector<std::uint32_t> out;
  for (const auto& c : cs) out.push_back(c.mask());
  return out;
}

}  // namespace

TEST_CASE("configuration basics") {
  const auto z2 = ClassicalConfiguration::z2(7);
  CHECK(z2.to_string() == "rgrgrgr");
  CHECK(z2.mask() == 0b1010101u);
  CHECK(ClassicalConfiguration::z2_shifted(7).to_string() == "grgrgrg");
  CHECK(ClassicalConfiguration::ground(3).mask() == 0u);
  CHECK(ClassicalConfiguration::from_string("rrg").mask() == 0b011u);
  CHECK(ClassicalConfiguration::from_string("rrg").adjacent_pairs() == 1);
  CHECK(ClassicalConfiguration::from_string("rrr").adjacent_pairs() == 2);
  CHECK(z2.excitations() == 4);
  CHECK_THROWS(ClassicalConfiguration(0b100u, 2));
  CHECK_THROWS(ClassicalConfiguration(0u, 0));
  CHECK_THROWS(ClassicalConfiguration(0u, 31));
  CHECK_THROWS(ClassicalConfiguration::from_string("grx"));
  CHECK(parse_subset_kind("iso") == SubsetKind::Isolated);
  CHECK(to_string(SubsetKind::IsolatedPlusSinglePair) == "pair");
  CHECK_THROWS(parse_subset_kind("isolated"));
}

TEST_CASE("enumeration examples") {
  CHECK(masks(enumerate(SubsetKind::Isolated, 2)) == std::vector<std::uint32_t>{0b00, 0b01, 0b10});
  CHECK(masks(enumerate_single_pair(4)) == std::vector<std::uint32_t>{0b0011, 0b0110, 0b1011, 0b1100, 0b1101});
  CHECK(enumerate(SubsetKind::All, 7).size() == 128);
  CHECK(enumerate(SubsetKind::Isolated, 7).size() == 34);
  CHECK(enumerate(SubsetKind::IsolatedPlusSinglePair, 7).size() == 72);
  CHECK_THROWS(enumerate(SubsetKind::All, 0));
  CHECK_THROWS(enumerate(SubsetKind::Isolated, 31));
}

TEST_CASE("enumeration is ascending, duplicate free, and structurally correct") {
  for (int m = 1; m <= 12; ++m) {
    for (auto kind : {SubsetKind::All, SubsetKind::Isolated, SubsetKind::IsolatedPlusSinglePair}) {
      const auto list = enumerate(kind, m);
      for (std::size_t k = 1; k < list.size(); ++k) REQUIRE(list[k - 1].mask() < list[k].mask());
      for (const auto& c : list) {
        REQUIRE(c.sites() == m);
        const auto [longest, pairs] = runs(c);
        if (kind == SubsetKind::Isolated) REQUIRE(longest <= 1);
        if (kind == SubsetKind::IsolatedPlusSinglePair) {
          REQUIRE(longest <= 2);
          REQUIRE(pairs <= 1);
        }
      }
    }
    // Exhaustive filter over all masks as an independent reference.
    std::size_t iso = 0, single = 0;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      const auto [longest, pairs] = runs(ClassicalConfiguration(mask, m));
      iso += longest <= 1;
      single += longest == 2 && pairs == 1;
    }
    CHECK(enumerate(SubsetKind::Isolated, m).size() == iso);
    CHECK(enumerate_single_pair(m).size() == single);
    CHECK(enumerate(SubsetKind::IsolatedPlusSinglePair, m).size() == iso + single);
  }
}

TEST_CASE("closed-form counts equal enumeration up to twelve sites") {
  for (int m = 1; m <= 12; ++m) {
    CAPTURE(m);
    CHECK(count_closed_form(SubsetKind::All, m) == enumerate(SubsetKind::All, m).size());
    CHECK(count_closed_form(SubsetKind::Isolated, m) == enumerate(SubsetKind::Isolated, m).size());
    CHECK(count_single_pair_closed_form(m) == enumerate_single_pair(m).size());
    CHECK(count_closed_form(SubsetKind::IsolatedPlusSinglePair, m) ==
          enumerate(SubsetKind::IsolatedPlusSinglePair, m).size());
  }
  CHECK(count_closed_form(SubsetKind::Isolated, 7) == 34);
  CHECK(count_single_pair_closed_form(7) == 38);
  CHECK(count_single_pair_closed_form(4) == 5);
  CHECK(count_closed_form(SubsetKind::All, 2) == 4);
}

TEST_CASE("isolated counts follow the Fibonacci recurrence") {
  CHECK(count_closed_form(SubsetKind::Isolated, 1) == 2);
  CHECK(count_closed_form(SubsetKind::Isolated, 2) == 3);
  for (int m = 3; m <= 30; ++m)
    CHECK(count_closed_form(SubsetKind::Isolated, m) ==
          count_closed_form(SubsetKind::Isolated, m - 1) + count_closed_form(SubsetKind::Isolated, m - 2));
}

TEST_CASE("coherent seeds") {
  const auto ground = config_to_coherent(ClassicalConfiguration::ground(4));
  CHECK(ground.sign == 1);
  for (std::size_t i = 0; i < 4; ++i) CHECK(ground.vector.xi(i) == Complex(1.0));
  const auto single = config_to_coherent(ClassicalConfiguration(1u, 1));
  CHECK(single.sign == -1);
  CHECK(single.vector.xi(0) == Complex(-1.0));
  const auto z2 = config_to_coherent(ClassicalConfiguration::z2(7));
  CHECK(z2.sign == 1);
  for (std::size_t i = 0; i < 7; ++i) CHECK(z2.vector.xi(i) == Complex(i % 2 == 0 ? -1.0 : 1.0));
}

TEST_CASE("signed seeds are exactly the classical basis states") {
  for (int m = 1; m <= 6; ++m) {
    const auto all = enumerate(SubsetKind::All, m);
    for (const auto& a : all) {
      const auto seed = config_to_coherent(a);
      const ComplexVector state = static_cast<double>(seed.sign) * oracle::product_state(seed.vector);
      ComplexVector want = ComplexVector::Zero(Eigen::Index{1} << m);
      want(a.mask()) = 1.0;
      REQUIRE((state - want).cwiseAbs().maxCoeff() < 1e-15);
    }
    // Pairwise overlaps including signs form the identity.
    Basis basis;
    std::vector<int> signs;
    for (const auto& a : all) {
      auto s = config_to_coherent(a);
      basis.push_back(s.vector);
      signs.push_back(s.sign);
    }
    const ComplexMatrix g = overlap_matrix(basis);
    for (std::size_t p = 0; p < all.size(); ++p)
      for (std::size_t q = 0; q < all.size(); ++q) {
        const Complex signed_overlap = static_cast<double>(signs[p] * signs[q]) * g(p, q);
        REQUIRE(std::abs(signed_overlap - (p == q ? 1.0 : 0.0)) < 1e-15);
      }
  }
}
