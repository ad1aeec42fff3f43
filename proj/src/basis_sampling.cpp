#include "rydcs/basis_sampling.hpp"

#include <bit>
#include <stdexcept>

namespace rydcs {

namespace {

void check_sites(int sites) {
  if (sites < 1 || sites > kMaxEnumerableSites)
    throw std::invalid_argument("site count " + std::to_string(sites) + " outside [1, " +
                                std::to_string(kMaxEnumerableSites) + "]");
}

std::uint32_t full_mask(int sites) {
  return sites >= 32 ? ~0u : ((1u << sites) - 1u);
}

bool has_run_of_three(std::uint32_t mask) { return (mask & (mask >> 1) & (mask >> 2)) != 0; }

// Binomial coefficient; zero outside 0 <= k <= n.
std::uint64_t choose(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t out = 1;
  for (long i = 1; i <= k; ++i) out = out * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return out;
}

long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

}  // namespace

ClassicalConfiguration::ClassicalConfiguration(std::uint32_t mask, int sites)
    : mask_(mask), sites_(sites) {
  check_sites(sites);
  if ((mask & ~full_mask(sites)) != 0)
    throw std::invalid_argument("mask has bits beyond the chain length");
}

ClassicalConfiguration ClassicalConfiguration::ground(int sites) { return {0u, sites}; }

ClassicalConfiguration ClassicalConfiguration::z2(int sites) {
  check_sites(sites);
  std::uint32_t mask = 0;
  for (int i = 0; i < sites; i += 2) mask |= 1u << i;
  return {mask, sites};
}

ClassicalConfiguration ClassicalConfiguration::z2_shifted(int sites) {
  check_sites(sites);
  std::uint32_t mask = 0;
  for (int i = 1; i < sites; i += 2) mask |= 1u << i;
  return {mask, sites};
}

ClassicalConfiguration ClassicalConfiguration::from_string(std::string_view text) {
  const int sites = static_cast<int>(text.size());
  check_sites(sites);
  std::uint32_t mask = 0;
  for (int i = 0; i < sites; ++i) {
    if (text[i] == 'r') mask |= 1u << i;
    else if (text[i] != 'g')
      throw std::invalid_argument("configuration string may only contain 'g' and 'r': " +
                                  std::string(text));
  }
  return {mask, sites};
}

int ClassicalConfiguration::excitations() const noexcept { return std::popcount(mask_); }

int ClassicalConfiguration::adjacent_pairs() const noexcept {
  return std::popcount(mask_ & (mask_ >> 1));
}

std::string ClassicalConfiguration::to_string() const {
  std::string out(static_cast<std::size_t>(sites_), 'g');
  for (int i = 0; i < sites_; ++i)
    if (rydberg(i)) out[static_cast<std::size_t>(i)] = 'r';
  return out;
}

std::string_view to_string(SubsetKind kind) noexcept {
  switch (kind) {
    case SubsetKind::All: return "all";
    case SubsetKind::Isolated: return "iso";
    case SubsetKind::IsolatedPlusSinglePair: return "pair";
  }
  return "all";
}

SubsetKind parse_subset_kind(std::string_view text) {
  if (text == "all") return SubsetKind::All;
  if (text == "iso") return SubsetKind::Isolated;
  if (text == "pair") return SubsetKind::IsolatedPlusSinglePair;
  throw std::invalid_argument("unknown basis subset '" + std::string(text) +
                              "' (expected all, iso or pair)");
}

std::vector<ClassicalConfiguration> enumerate(SubsetKind kind, int sites) {
  check_sites(sites);
  std::vector<ClassicalConfiguration> out;
  const std::uint64_t limit = std::uint64_t{1} << sites;
  for (std::uint64_t raw = 0; raw < limit; ++raw) {
    const auto mask = static_cast<std::uint32_t>(raw);
    const int pairs = std::popcount(mask & (mask >> 1));
    bool keep = false;
    switch (kind) {
      case SubsetKind::All: keep = true; break;
      case SubsetKind::Isolated: keep = pairs == 0; break;
      case SubsetKind::IsolatedPlusSinglePair:
        keep = pairs == 0 || (pairs == 1 && !has_run_of_three(mask));
        break;
    }
    if (keep) out.emplace_back(mask, sites);
  }
  return out;
}

std::vector<ClassicalConfiguration> enumerate_single_pair(int sites) {
  std::vector<ClassicalConfiguration> out;
  for (const auto& c : enumerate(SubsetKind::IsolatedPlusSinglePair, sites))
    if (c.adjacent_pairs() == 1) out.push_back(c);
  return out;
}

std::uint64_t count_single_pair_closed_form(int sites) {
  check_sites(sites);
  // sum_{y=2}^{P} (M-y+1)! / ((M-2y+2)! (y-2)!),  P = (M-2)//2 + 2.
  // Each term equals (y-1) * C(M-y+1, y-1).
  const long m = sites;
  const long upper = floor_div(m - 2, 2) + 2;
  std::uint64_t total = 0;
  for (long y = 2; y <= upper; ++y) {
    if (m - 2 * y + 2 < 0) continue;
    total += static_cast<std::uint64_t>(y - 1) * choose(m - y + 1, y - 1);
  }
  return total;
}

std::uint64_t count_closed_form(SubsetKind kind, int sites) {
  check_sites(sites);
  const long m = sites;
  if (kind == SubsetKind::All) return std::uint64_t{1} << sites;
  // sum_{y=0}^{O} (M-y+1)! / ((M-2y+1)! y!),  O = M//2 (+1 for odd M).
  const long upper = m / 2 + (m % 2);
  std::uint64_t isolated = 0;
  for (long y = 0; y <= upper; ++y) isolated += choose(m - y + 1, y);
  if (kind == SubsetKind::Isolated) return isolated;
  return isolated + count_single_pair_closed_form(sites);
}

CoherentSeed config_to_coherent(const ClassicalConfiguration& config) {
  std::vector<Complex> xi(static_cast<std::size_t>(config.sites()));
  for (int i = 0; i < config.sites(); ++i) xi[static_cast<std::size_t>(i)] = config.rydberg(i) ? -1.0 : 1.0;
  return {CoherentBasisVector(std::move(xi)), config.excitations() % 2 == 0 ? 1 : -1};
}

}  // namespace rydcs
