#include "decomine/forest_graph.hpp"

#include <deque>
#include <stdexcept>

namespace decomine {

ForestGraph::ForestGraph(const JunctionForest& t) {
  for (const Itemset& c : t.cliques()) add_node(c);
  for (const auto& e : t.edges()) add_edge(e.a, e.b);
}

std::size_t ForestGraph::add_node(Itemset clique) {
  const std::size_t id = cliques_.size();
  index_[clique] = id;
  cliques_.push_back(std::move(clique));
  alive_.push_back(true);
  adj_.emplace_back();
  ++num_alive_;
  return id;
}

void ForestGraph::remove_node(std::size_t id) {
  if (!alive_[id]) return;
  for (std::size_t n : adj_[id]) adj_[n].erase(id);
  adj_[id].clear();
  alive_[id] = false;
  --num_alive_;
  auto it = index_.find(cliques_[id]);
  if (it != index_.end() && it->second == id) index_.erase(it);
}

void ForestGraph::add_edge(std::size_t a, std::size_t b) {
  if (a == b) throw std::invalid_argument("self loop");
  if (!alive_[a] || !alive_[b]) throw std::invalid_argument("edge to removed node");
  adj_[a].insert(b);
  adj_[b].insert(a);
}

void ForestGraph::remove_edge(std::size_t a, std::size_t b) {
  adj_[a].erase(b);
  adj_[b].erase(a);
}

void ForestGraph::set_clique(std::size_t id, Itemset clique) {
  auto it = index_.find(cliques_[id]);
  if (it != index_.end() && it->second == id) index_.erase(it);
  index_[clique] = id;
  cliques_[id] = std::move(clique);
}

std::optional<std::size_t> ForestGraph::find(const Itemset& clique) const {
  auto it = index_.find(clique);
  if (it == index_.end() || !alive_[it->second]) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> ForestGraph::nodes() const {
  std::vector<std::size_t> out;
  out.reserve(num_alive_);
  for (std::size_t i = 0; i < cliques_.size(); ++i) {
    if (alive_[i]) out.push_back(i);
  }
  return out;
}

std::optional<std::vector<std::size_t>> ForestGraph::path(std::size_t a, std::size_t b) const {
  if (a == b) return std::vector<std::size_t>{a};
  std::unordered_map<std::size_t, std::size_t> parent;
  parent[a] = a;
  std::deque<std::size_t> queue{a};
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : adj_[u]) {
      if (parent.count(v)) continue;
      parent[v] = u;
      if (v == b) {
        std::vector<std::size_t> out{b};
        for (std::size_t w = b; w != a;) {
          w = parent[w];
          out.push_back(w);
        }
        return std::vector<std::size_t>(out.rbegin(), out.rend());
      }
      queue.push_back(v);
    }
  }
  return std::nullopt;
}

std::size_t ForestGraph::purge_redundant() {
  std::size_t removed = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t c = 0; c < cliques_.size(); ++c) {
      if (!alive_[c]) continue;
      std::optional<std::size_t> host;
      for (std::size_t n : adj_[c]) {
        if (cliques_[c].is_subset_of(cliques_[n])) {
          host = n;
          break;
        }
      }
      if (!host) continue;
      const std::set<std::size_t> others = adj_[c];
      remove_node(c);
      for (std::size_t n : others) {
        if (n != *host) add_edge(n, *host);
      }
      ++removed;
      changed = true;
    }
  }
  return removed;
}

JunctionForest ForestGraph::to_forest() const {
  std::vector<std::size_t> remap(cliques_.size(), 0);
  std::vector<Itemset> cliques;
  for (std::size_t i = 0; i < cliques_.size(); ++i) {
    if (!alive_[i]) continue;
    remap[i] = cliques.size();
    cliques.push_back(cliques_[i]);
  }
  std::vector<JunctionForest::Edge> edges;
  for (std::size_t i = 0; i < cliques_.size(); ++i) {
    if (!alive_[i]) continue;
    for (std::size_t j : adj_[i]) {
      if (j > i) edges.push_back({remap[i], remap[j]});
    }
  }
  return JunctionForest(std::move(cliques), std::move(edges));
}

}  // namespace decomine
