#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "mmcs/errors.hpp"

namespace mmcs {

// A subset of the N+1 links (bit i set <=> link i scheduled; link 0 = LB-BS).
// The canonical index of a combination is its bitmask value.
struct LinkCombination {
  std::uint32_t mask = 0;

  int index() const { return static_cast<int>(mask); }
  int size() const { return std::popcount(mask); }
  bool empty() const { return mask == 0; }
  bool contains(int link) const { return (mask >> link) & 1u; }

  std::vector<int> members() const {
    std::vector<int> out;
    for (int i = 0; i < 32; ++i)
      if (contains(i)) out.push_back(i);
    return out;
  }

  static LinkCombination all(int n_links) {
    return LinkCombination{(n_links >= 32 ? 0xffffffffu : (1u << n_links) - 1u)};
  }

  friend bool operator==(const LinkCombination& a, const LinkCombination& b) {
    return a.mask == b.mask;
  }
};

struct CombinationSet {
  int n_links = 0;
  std::vector<LinkCombination> combos;  // index j == combos[j].mask

  std::size_t size() const { return combos.size(); }
  const LinkCombination& operator[](std::size_t j) const { return combos[j]; }
};

// All 2^n_links subsets in bitmask order; index 0 is the empty set.
inline CombinationSet enumerate_combinations(int n_links) {
  if (n_links < 1) throw InputError("enumerate_combinations: need at least one link");
  if (n_links > 16) throw InputError("enumerate_combinations: strategy space cap is 16 links");
  CombinationSet s;
  s.n_links = n_links;
  s.combos.resize(std::size_t{1} << n_links);
  for (std::uint32_t j = 0; j < s.combos.size(); ++j) s.combos[j] = LinkCombination{j};
  return s;
}

}  // namespace mmcs
