#pragma once

// Classical (product g/r) configurations of an open chain and the subsets used
// to seed the coherent basis.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rydcs/core_model.hpp"

namespace rydcs {

inline constexpr int kMaxEnumerableSites = 30;

/// Occupation bitmask over `sites` sites; bit i set means site i is in |r>.
/// Site 0 is the least significant bit.
class ClassicalConfiguration {
 public:
  ClassicalConfiguration() = default;
  /// Throws std::invalid_argument when sites is out of [1, 30] or mask has
  /// bits above the chain.
  ClassicalConfiguration(std::uint32_t mask, int sites);

  static ClassicalConfiguration ground(int sites);
  /// |r g r g ...>, Rydberg on site 0.
  static ClassicalConfiguration z2(int sites);
  /// |g r g r ...>.
  static ClassicalConfiguration z2_shifted(int sites);
  /// Parses a g/r string, site 0 first, e.g. "rgrgrgr".
  static ClassicalConfiguration from_string(std::string_view text);

  std::uint32_t mask() const noexcept { return mask_; }
  int sites() const noexcept { return sites_; }
  bool rydberg(int site) const noexcept { return (mask_ >> site) & 1u; }
  int excitations() const noexcept;
  /// Number of adjacent Rydberg pairs.
  int adjacent_pairs() const noexcept;
  std::string to_string() const;

  auto operator<=>(const ClassicalConfiguration&) const = default;

 private:
  std::uint32_t mask_ = 0;
  int sites_ = 1;
};

enum class SubsetKind { All, Isolated, IsolatedPlusSinglePair };

/// "all", "iso", "pair".
std::string_view to_string(SubsetKind kind) noexcept;
SubsetKind parse_subset_kind(std::string_view text);

/// Ascending-mask list of the configurations in the subset.
std::vector<ClassicalConfiguration> enumerate(SubsetKind kind, int sites);

/// Configurations with exactly one adjacent Rydberg pair and nothing else
/// adjacent.
std::vector<ClassicalConfiguration> enumerate_single_pair(int sites);

/// Closed-form subset sizes from the combinatorial counting argument.
std::uint64_t count_closed_form(SubsetKind kind, int sites);
std::uint64_t count_single_pair_closed_form(int sites);

struct CoherentSeed {
  CoherentBasisVector vector;
  int sign = 1;  // sign * |vector> equals the classical state exactly
};

/// xi = +1 on ground sites, -1 on Rydberg sites; sign = (-1)^excitations.
CoherentSeed config_to_coherent(const ClassicalConfiguration& config);

}  // namespace rydcs
