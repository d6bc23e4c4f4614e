#pragma once

#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "decomine/itemset.hpp"
#include "decomine/jtree.hpp"

namespace decomine {

// Mutable clique forest used while a tree is under construction or being
// reshaped. Node ids are stable; removed nodes stay as tombstones.
class ForestGraph {
 public:
  ForestGraph() = default;
  explicit ForestGraph(const JunctionForest& t);

  std::size_t add_node(Itemset clique);
  void remove_node(std::size_t id);
  void add_edge(std::size_t a, std::size_t b);
  void remove_edge(std::size_t a, std::size_t b);
  bool has_edge(std::size_t a, std::size_t b) const { return adj_[a].count(b) != 0; }

  bool alive(std::size_t id) const { return alive_[id]; }
  const Itemset& clique(std::size_t id) const { return cliques_[id]; }
  void set_clique(std::size_t id, Itemset clique);
  const std::set<std::size_t>& neighbors(std::size_t id) const { return adj_[id]; }
  std::size_t capacity() const { return cliques_.size(); }
  std::size_t num_alive() const { return num_alive_; }

  // Most recently added live node holding exactly this clique.
  std::optional<std::size_t> find(const Itemset& clique) const;
  // Live node ids, ascending.
  std::vector<std::size_t> nodes() const;
  // Node ids from a to b inclusive, or nullopt if they are disconnected.
  std::optional<std::vector<std::size_t>> path(std::size_t a, std::size_t b) const;

  // Repeatedly removes a clique contained in one of its neighbors (lowest
  // id first, absorbing into the lowest-id containing neighbor) and
  // reattaches its other neighbors to that neighbor. Returns the number of
  // cliques removed.
  std::size_t purge_redundant();

  JunctionForest to_forest() const;

 private:
  std::vector<Itemset> cliques_;
  std::vector<bool> alive_;
  std::vector<std::set<std::size_t>> adj_;
  std::unordered_map<Itemset, std::size_t, ItemsetHash> index_;
  std::size_t num_alive_ = 0;
};

}  // namespace decomine
