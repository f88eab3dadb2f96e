#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "ldq/improve.hpp"

namespace ldq::test {

// Brute force over every subset of the item universe.
inline std::vector<AssociationRule> oracle_rules(const std::vector<Transaction>& txs,
                                                 const Rational& min_support,
                                                 const Rational& min_confidence) {
  std::set<Item> universe;
  for (const auto& t : txs) universe.insert(t.items.begin(), t.items.end());
  std::vector<Item> items(universe.begin(), universe.end());
  const std::size_t n = txs.size();
  auto count = [&](unsigned mask) {
    std::size_t c = 0;
    for (const auto& t : txs) {
      bool all = true;
      for (std::size_t i = 0; i < items.size(); ++i)
        if ((mask >> i & 1) && !t.items.count(items[i])) all = false;
      c += all;
    }
    return c;
  };
  std::vector<AssociationRule> out;
  for (unsigned mask = 1; mask < (1u << items.size()); ++mask) {
    if (__builtin_popcount(mask) < 2) continue;
    std::size_t whole = count(mask);
    if (ratio(whole, n) < min_support) continue;
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (!(mask >> j & 1)) continue;
      unsigned ante = mask & ~(1u << j);
      Rational conf = ratio(whole, count(ante));
      if (conf < min_confidence) continue;
      AssociationRule r;
      for (std::size_t i = 0; i < items.size(); ++i)
        if (ante >> i & 1) r.antecedent.push_back(items[i]);
      r.consequent = items[j];
      r.support = ratio(whole, n);
      r.confidence = conf;
      out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.support != b.support) return a.support > b.support;
    return a.text() < b.text();
  });
  return out;
}

}  // namespace ldq::test
