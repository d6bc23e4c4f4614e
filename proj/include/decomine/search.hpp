#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "decomine/dataset.hpp"
#include "decomine/forest_graph.hpp"
#include "decomine/jtree.hpp"
#include "decomine/miner.hpp"

namespace decomine {

// w = H(X) + H(Y) - H(X n Y) - H(X u Y): the conditional mutual
// information of X\Y and Y\X given X n Y. Tiny negative rounding is
// clamped to 0.
double edge_weight(const TransactionDataset& d, const Itemset& x, const Itemset& y);
double edge_weight(EntropyCache& cache, const Itemset& x, const Itemset& y);

// Right-hand side of the per-edge admission test N * w >= threshold at
// level n. Method kNone uses 1e-12 so that only strictly informative edges
// are joined.
double gate_threshold(Method method, int level, std::uint64_t dataset_size);

inline constexpr double kNoneThreshold = 1e-12;

// An edge of the level graph, endpoints ordered x < y.
struct LevelEdge {
  Itemset x;
  Itemset y;
  double weight = 0.0;
};

// Heavier first; ties broken by lexicographic (x, y).
struct LevelEdgeOrder {
  bool operator()(const LevelEdge& a, const LevelEdge& b) const;
};

// Callbacks fired by search_tree. Every member is optional.
struct SearchObserver {
  std::function<void(int level, const JunctionForest& start)> on_round_start;
  // Called for every popped edge; `joined` tells whether the tree changed.
  std::function<void(int level, const LevelEdge& edge, bool joined)> on_edge;
  // After each accepted join, with the forest before and after.
  std::function<void(int level, const LevelEdge& edge, const JunctionForest& before,
                     const JunctionForest& after)>
      on_join;
  std::function<void(int level, std::size_t considered, std::size_t accepted,
                     const JunctionForest& purged)>
      on_round_end;
};

struct SearchOptions {
  // Replaces entropy-based edge weights (used to replay traces with a
  // prescribed pick order). Gates still apply to the supplied weights.
  std::function<double(const Itemset&, const Itemset&)> weight_override;
  SearchObserver observer;
  // Snapshotting the forest for on_join costs O(tree size) per join.
  bool snapshot_joins = false;
};

// The mutable state of one tree search: the current tree T_n and the level
// graph G_n. search_tree drives it; tests may drive it step by step.
class SearchState {
 public:
  SearchState(const CandidateFamily& family, EntropyCache& cache, Method method,
              SearchOptions options = {});

  // Replaces the tree (for instance with a known T_{n-1}).
  void reset_tree(const JunctionForest& start);

  // Generate: nodes are the cliques of size n, edges the admissible pairs
  // (X, Y) with |X n Y| = n - 1 and X u Y in the family.
  void begin_round(int n);
  int level() const { return level_; }

  bool has_pending_edges() const { return !pending_.empty(); }
  LevelEdge pop_edge();
  std::vector<LevelEdge> pending_edges() const;
  std::vector<Itemset> level_nodes() const;

  // n-1-connectivity of x and y in the current tree.
  bool joinable(const Itemset& x, const Itemset& y) const;

  // Adds V = X u Y, its size-n faces W (new ones also enter the level
  // graph), the edges (V, W), and removes one separator-(n-1) edge on the
  // old X..Y path. Throws std::logic_error on precondition violations.
  void modify_tree(const Itemset& x, const Itemset& y);

  // Purge: drops redundant cliques. Returns whether a clique of size n+1
  // was created during the round.
  bool end_round();

  JunctionForest forest() const { return tree_.to_forest(); }
  std::vector<Itemset> marked() const;

 private:
  double weight(const Itemset& x, const Itemset& y);
  bool admissible(double w) const;
  void add_level_node(std::size_t tree_id);
  void connect_level_node(const Itemset& w, const Itemset* exclude_union);

  const CandidateFamily& family_;
  EntropyCache& cache_;
  Method method_;
  SearchOptions options_;
  ForestGraph tree_;
  int level_ = 0;
  double threshold_ = 0.0;
  std::vector<Itemset> level_nodes_;
  std::set<LevelEdge, LevelEdgeOrder> pending_;
  std::set<Itemset> marked_;
  bool grew_ = false;
};

// Greedy level-wise construction starting from isolated singletons.
// Requires a downward closed family covering every attribute of d
// (FamilyError otherwise).
JunctionForest search_tree(const CandidateFamily& family, const TransactionDataset& d,
                           Method method, const SearchOptions& options = {});
JunctionForest search_tree(const CandidateFamily& family, EntropyCache& cache, Method method,
                           const SearchOptions& options = {});

struct FamilyModel {
  JunctionForest forest;
  // Downward closure of the forest's cliques, with counts.
  CandidateFamily family;
};

// Repeated search: after each round, candidates containing a non-singleton
// member of the last family are discarded. Stops once a family holds only
// singletons, or after max_families families (0 = unlimited).
std::vector<FamilyModel> search_sequence(const CandidateFamily& family,
                                         const TransactionDataset& d, Method method,
                                         std::size_t max_families = 0,
                                         const SearchOptions& options = {});

// Candidates minus every member containing a non-singleton itemset of g.
CandidateFamily filter_candidates(const CandidateFamily& candidates, const CandidateFamily& g);

}  // namespace decomine
