#pragma once

#include <utility>
#include <vector>

#include "decomine/dataset.hpp"
#include "decomine/jtree.hpp"
#include "decomine/lp.hpp"
#include "decomine/miner.hpp"
#include "decomine/query.hpp"

// Brute-force references for tests and the `check` command. Apart from the
// LP engine nothing here reuses the main code paths.
namespace decomine::oracle {

inline constexpr std::size_t kMaxJointAttributes = 20;
inline constexpr std::size_t kMaxTableAttributes = 12;
inline constexpr std::size_t kMaxVertexAttributes = 4;

struct OracleBounds {
  QueryInterval interval;
  lp::Status min_status = lp::Status::kOptimal;
  lp::Status max_status = lp::Status::kOptimal;
  bool ok() const {
    return min_status == lp::Status::kOptimal && max_status == lp::Status::kOptimal;
  }
};

// LP over all 2^k joint cells: one equality per family member plus
// normalization; min and max of the mass on cells containing q.
OracleBounds full_lp_bounds(const CandidateFamily& family, const Itemset& q, std::size_t k);

// Same bounds by enumerating every basic feasible solution (k <= 4).
QueryInterval vertex_enumeration_bounds(const CandidateFamily& family, const Itemset& q,
                                        std::size_t k);

// The product-form distribution of t evaluated at all 2^K points. Index
// bit i is attribute i. Throws CapacityError for K > 12.
std::vector<double> enumerate_tree_distribution(const JunctionForest& t,
                                                const TransactionDataset& d);

// Shannon entropy (nats) of a probability table.
double table_entropy(const std::vector<double>& table);

// Marginal probability of the cells whose restriction to `scope` equals
// `ones`, summed from a full table.
double table_marginal(const std::vector<double>& table, const Itemset& scope,
                      const Itemset& ones);

struct ChowLiuForest {
  std::vector<std::pair<AttributeId, AttributeId>> edges;
  double total_weight = 0.0;
};

// Maximum-weight spanning forest (Kruskal) over pairwise mutual information,
// restricted to pairs in f that pass the level-one gate of `method`.
ChowLiuForest chow_liu_reference(const TransactionDataset& d, const CandidateFamily& f,
                                 Method method);

}  // namespace decomine::oracle
