#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "decomine/dataset.hpp"
#include "decomine/itemset.hpp"
#include "decomine/jtree.hpp"
#include "decomine/miner.hpp"

namespace fixtures {

using decomine::AttributeId;
using decomine::Itemset;

// "abd" -> {0, 1, 3}. Letters only.
inline Itemset S(const std::string& letters) {
  Itemset x;
  for (char c : letters) x.insert(static_cast<AttributeId>(c - 'a'));
  return x;
}

// Rows from dense 0/1 strings.
inline decomine::TransactionDataset Dense(const std::vector<std::string>& lines) {
  std::vector<Itemset> rows;
  for (const auto& l : lines) {
    Itemset r;
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (l[i] == '1') r.insert(static_cast<AttributeId>(i));
    }
    rows.push_back(r);
  }
  return decomine::TransactionDataset(decomine::default_attribute_names(lines.front().size()),
                                      std::move(rows));
}

// Each attribute either copies a random earlier one through a noisy
// channel or is an independent biased coin.
inline decomine::TransactionDataset RandomData(std::size_t k, std::size_t n,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> parent(k, -1);
  std::vector<double> p(k, 0.5);
  for (std::size_t i = 0; i < k; ++i) {
    if (i > 0 && u(rng) < 0.65) {
      parent[i] = static_cast<int>(std::uniform_int_distribution<std::size_t>(0, i - 1)(rng));
      p[i] = 0.02 + 0.4 * u(rng);
    } else {
      p[i] = 0.15 + 0.7 * u(rng);
    }
  }
  std::vector<Itemset> rows;
  for (std::size_t r = 0; r < n; ++r) {
    Itemset row;
    for (std::size_t i = 0; i < k; ++i) {
      bool v = u(rng) < p[i];
      if (parent[i] >= 0) v = row.contains(static_cast<AttributeId>(parent[i])) != v;
      if (v) row.insert(static_cast<AttributeId>(i));
    }
    rows.push_back(row);
  }
  return decomine::TransactionDataset(decomine::default_attribute_names(k), std::move(rows));
}

// The junction tree ab - bcd - bcf - ce over a..f.
inline decomine::JunctionForest ChainForest() {
  return decomine::JunctionForest({S("ab"), S("bcd"), S("bcf"), S("ce")},
                                  {{0, 1}, {1, 2}, {2, 3}});
}

// Cliques ab, bc, cde, cf, fg, fh over a..h.
inline decomine::JunctionForest BranchingForest() {
  return decomine::JunctionForest({S("ab"), S("bc"), S("cde"), S("cf"), S("fg"), S("fh")},
                                  {{0, 1}, {1, 2}, {1, 3}, {3, 4}, {4, 5}});
}

// {}, a..e, ab ac ad bc bd cd ce, abc acd bcd, with counts from d.
inline decomine::CandidateFamily Example1Family(const decomine::TransactionDataset& d) {
  decomine::CandidateFamily f(d.num_rows(), 0.0);
  for (const char* s : {"", "a", "b", "c", "d", "e", "ab", "ac", "ad", "bc", "bd", "cd", "ce",
                        "abc", "acd", "bcd"}) {
    f.insert(S(s), d.support_count(S(s)));
  }
  return f;
}

}  // namespace fixtures
