#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "decomine/dataset.hpp"
#include "decomine/itemset.hpp"

namespace decomine {

// Cliques joined by edges; each edge is labeled by the intersection of its
// endpoints (the separator). A valid junction forest is acyclic, has no
// duplicate or empty cliques, and satisfies the running intersection
// property. The constructor enforces the index-level invariants only;
// acyclicity and running intersection are checked by
// check_running_intersection so that malformed inputs can be diagnosed.
class JunctionForest {
 public:
  struct Edge {
    std::size_t a;
    std::size_t b;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  JunctionForest() = default;
  JunctionForest(std::vector<Itemset> cliques, std::vector<Edge> edges);

  // K isolated singleton cliques.
  static JunctionForest Singletons(std::size_t k);

  const std::vector<Itemset>& cliques() const { return cliques_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return cliques_.size(); }

  Itemset separator(const Edge& e) const { return cliques_[e.a] & cliques_[e.b]; }
  std::vector<Itemset> separators() const;
  std::optional<std::size_t> find(const Itemset& clique) const;
  Itemset coverage() const;

  std::vector<std::vector<std::size_t>> adjacency() const;
  // Component label per clique, labels numbered in order of first clique.
  std::vector<std::size_t> components() const;
  std::size_t num_components() const;
  // Clique indices from `from` to `to` inclusive; nullopt if disconnected.
  // Assumes the edge set is acyclic.
  std::optional<std::vector<std::size_t>> path(std::size_t from, std::size_t to) const;

  // Cliques sorted lexicographically, edges renumbered and sorted.
  JunctionForest canonical() const;

 private:
  std::vector<Itemset> cliques_;
  std::vector<Edge> edges_;
};

bool operator==(const JunctionForest& a, const JunctionForest& b);

// True iff the edges form a forest and, for every attribute, the cliques
// containing it induce a connected subtree. On failure `diagnostic`
// (when given) names the offending cycle or attribute.
bool check_running_intersection(const JunctionForest& t, std::string* diagnostic = nullptr);

// n >= 2: the path between x and y exists and has a separator of size
// exactly n-1. n == 1: x and y lie in different components.
// Throws std::invalid_argument if x or y is not a clique of t.
bool is_n1_connected(const JunctionForest& t, const Itemset& x, const Itemset& y, int n);

// Sum of clique entropies minus sum of separator entropies.
double tree_entropy(const JunctionForest& t, const TransactionDataset& d);
double tree_entropy(const JunctionForest& t, EntropyCache& cache);

// The product-of-cliques over product-of-separators distribution built from
// empirical marginals. Holds the projected tables for repeated evaluation.
class DecomposableDistribution {
 public:
  DecomposableDistribution(const JunctionForest& t, const TransactionDataset& d);
  // v is the set of attributes equal to 1. A zero separator factor
  // implies a zero clique factor; such points evaluate to 0.
  double probability(const Itemset& v) const;

 private:
  std::vector<MarginalTable> cliques_;
  std::vector<MarginalTable> separators_;
};

double tree_distribution_eval(const JunctionForest& t, const TransactionDataset& d,
                              const Itemset& v);

// -N * tree_entropy.
double tree_log_likelihood(const JunctionForest& t, const TransactionDataset& d);

// Removes every clique contained in another; each removed clique's other
// neighbors are reattached to a neighbor that contains it.
JunctionForest purge_redundant(const JunctionForest& t);

enum class Method { kNone, kAic, kBic, kMdl };

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view s);

// costmdl(k) = (k-1)/2 log N - 1/2 log pi - log Gamma(k/2), in nats.
double mdl_cost(double k, std::uint64_t dataset_size);

// sum over cliques (2^|X| - 1) minus sum over separators (2^|Y| - 1).
double parameter_count(const JunctionForest& t);

struct ModelScore {
  double entropy_nats = 0.0;
  double log_likelihood = 0.0;
  double penalty = 0.0;
  // -log_likelihood + penalty
  double total = 0.0;
  Method method = Method::kNone;
};

ModelScore score(const JunctionForest& t, const TransactionDataset& d, Method method);
ModelScore score(const JunctionForest& t, EntropyCache& cache, Method method);
// Score from a known entropy; useful when entropies are not recomputable.
ModelScore score_from_entropy(const JunctionForest& t, double entropy_nats,
                              std::uint64_t dataset_size, Method method);

}  // namespace decomine
