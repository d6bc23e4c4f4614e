#include "decomine/search.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "decomine/error.hpp"

namespace decomine {

double edge_weight(EntropyCache& cache, const Itemset& x, const Itemset& y) {
  const double w = cache(x) + cache(y) - cache(x & y) - cache(x | y);
  return w < 0.0 ? 0.0 : w;
}

double edge_weight(const TransactionDataset& d, const Itemset& x, const Itemset& y) {
  EntropyCache cache(d);
  return edge_weight(cache, x, y);
}

double gate_threshold(Method method, int level, std::uint64_t dataset_size) {
  if (level < 1) throw ParameterError("level must be >= 1");
  if (dataset_size < 1) throw ParameterError("dataset size must be >= 1");
  const double n = static_cast<double>(dataset_size);
  switch (method) {
    case Method::kNone:
      return kNoneThreshold;
    case Method::kAic:
      return std::ldexp(1.0, level - 1);
    case Method::kBic:
      return std::ldexp(1.0, level - 2) * std::log(n);
    case Method::kMdl:
      return mdl_cost(std::ldexp(1.0, level + 1), dataset_size) -
             2.0 * mdl_cost(std::ldexp(1.0, level), dataset_size) +
             mdl_cost(std::ldexp(1.0, level - 1), dataset_size);
  }
  return kNoneThreshold;
}

bool LevelEdgeOrder::operator()(const LevelEdge& a, const LevelEdge& b) const {
  if (a.weight != b.weight) return a.weight > b.weight;
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

SearchState::SearchState(const CandidateFamily& family, EntropyCache& cache, Method method,
                         SearchOptions options)
    : family_(family), cache_(cache), method_(method), options_(std::move(options)) {
  reset_tree(JunctionForest::Singletons(cache.dataset().num_attributes()));
}

void SearchState::reset_tree(const JunctionForest& start) {
  tree_ = ForestGraph(start);
  level_ = 0;
  level_nodes_.clear();
  pending_.clear();
  marked_.clear();
  grew_ = false;
}

double SearchState::weight(const Itemset& x, const Itemset& y) {
  if (options_.weight_override) return options_.weight_override(x, y);
  return edge_weight(cache_, x, y);
}

bool SearchState::admissible(double w) const {
  return static_cast<double>(cache_.dataset().num_rows()) * w >= threshold_;
}

void SearchState::begin_round(int n) {
  level_ = n;
  threshold_ = gate_threshold(method_, n, cache_.dataset().num_rows());
  pending_.clear();
  marked_.clear();
  grew_ = false;
  level_nodes_.clear();
  for (std::size_t id : tree_.nodes()) {
    if (tree_.clique(id).size() == static_cast<std::size_t>(n)) {
      level_nodes_.push_back(tree_.clique(id));
    }
  }
  const auto k = static_cast<std::size_t>(n - 1);
  for (std::size_t i = 0; i < level_nodes_.size(); ++i) {
    for (std::size_t j = i + 1; j < level_nodes_.size(); ++j) {
      const Itemset& x = level_nodes_[i];
      const Itemset& y = level_nodes_[j];
      if ((x & y).size() != k) continue;
      if (!family_.contains(x | y)) continue;
      const double w = weight(x, y);
      if (!admissible(w)) continue;
      if (x < y) {
        pending_.insert({x, y, w});
      } else {
        pending_.insert({y, x, w});
      }
    }
  }
}

LevelEdge SearchState::pop_edge() {
  if (pending_.empty()) throw std::logic_error("pop_edge on empty level graph");
  LevelEdge e = *pending_.begin();
  pending_.erase(pending_.begin());
  return e;
}

std::vector<LevelEdge> SearchState::pending_edges() const {
  return {pending_.begin(), pending_.end()};
}

std::vector<Itemset> SearchState::level_nodes() const { return level_nodes_; }

std::vector<Itemset> SearchState::marked() const { return {marked_.begin(), marked_.end()}; }

bool SearchState::joinable(const Itemset& x, const Itemset& y) const {
  const auto xi = tree_.find(x);
  const auto yi = tree_.find(y);
  if (!xi || !yi) return false;
  const auto p = tree_.path(*xi, *yi);
  if (level_ <= 1) return !p.has_value();
  if (!p) {
    // Cliques sharing level-1 >= 1 attributes live in one component.
    throw std::logic_error("cliques sharing attributes lie in different components");
  }
  const auto sep_size = static_cast<std::size_t>(level_ - 1);
  for (std::size_t i = 0; i + 1 < p->size(); ++i) {
    if ((tree_.clique((*p)[i]) & tree_.clique((*p)[i + 1])).size() == sep_size) return true;
  }
  return false;
}

void SearchState::connect_level_node(const Itemset& w, const Itemset* exclude_union) {
  const auto k = static_cast<std::size_t>(level_ - 1);
  for (const Itemset& z : level_nodes_) {
    if (z == w) continue;
    if ((w & z).size() != k) continue;
    const Itemset u = w | z;
    if (exclude_union && u == *exclude_union) continue;
    if (!family_.contains(u)) continue;
    const double wt = weight(w, z);
    if (!admissible(wt)) continue;
    if (w < z) {
      pending_.insert({w, z, wt});
    } else {
      pending_.insert({z, w, wt});
    }
  }
}

void SearchState::modify_tree(const Itemset& x, const Itemset& y) {
  const auto n = static_cast<std::size_t>(level_);
  if (x.size() != n || y.size() != n || (x & y).size() + 1 != n) {
    throw std::logic_error("modify_tree: endpoints do not fit the current level");
  }
  const Itemset v = x | y;
  if (!family_.contains(v)) throw std::logic_error("modify_tree: union not in family");
  const auto xi = tree_.find(x);
  const auto yi = tree_.find(y);
  if (!xi || !yi) throw std::logic_error("modify_tree: endpoint not in tree");
  if (!joinable(x, y)) throw std::logic_error("modify_tree: endpoints not n-1-connected");
  if (tree_.find(v)) throw std::logic_error("modify_tree: union already a clique");

  const auto old_path = tree_.path(*xi, *yi);
  const std::size_t vid = tree_.add_node(v);
  grew_ = true;
  v.for_each([&](AttributeId a) {
    Itemset w = v;
    w.erase(a);
    marked_.insert(w);
    std::size_t wid = 0;
    if (auto existing = tree_.find(w)) {
      // Only X and Y can already be present: any other face would force
      // the union into the tree already (running intersection).
      if (!(w == x) && !(w == y)) {
        throw std::logic_error("modify_tree: unexpected pre-existing face");
      }
      wid = *existing;
    } else {
      wid = tree_.add_node(w);
      level_nodes_.push_back(w);
      connect_level_node(w, &v);
    }
    tree_.add_edge(vid, wid);
  });

  if (old_path) {
    const std::size_t sep_size = n - 1;
    for (std::size_t i = 0; i + 1 < old_path->size(); ++i) {
      const std::size_t a = (*old_path)[i];
      const std::size_t b = (*old_path)[i + 1];
      if ((tree_.clique(a) & tree_.clique(b)).size() == sep_size) {
        tree_.remove_edge(a, b);
        return;
      }
    }
    throw std::logic_error("modify_tree: no separator of size n-1 on the path");
  }
}

bool SearchState::end_round() {
  tree_.purge_redundant();
  marked_.clear();
  pending_.clear();
  return grew_;
}

namespace {

void validate_family(const CandidateFamily& family, const TransactionDataset& d) {
  for (AttributeId a = 0; a < d.num_attributes(); ++a) {
    if (!family.contains(Itemset::Single(a))) {
      throw FamilyError("candidate family does not cover attribute '" + d.name(a) + "'");
    }
  }
  if (!family.coverage().is_subset_of(d.all_attributes())) {
    throw FamilyError("candidate family mentions attributes outside the dataset");
  }
  if (auto bad = family.closure_violation()) {
    throw FamilyError("candidate family not downward closed: {" + d.format(bad->first) +
                      "} present but {" + d.format(bad->second) + "} missing");
  }
}

}  // namespace

JunctionForest search_tree(const CandidateFamily& family, EntropyCache& cache, Method method,
                           const SearchOptions& options) {
  const TransactionDataset& d = cache.dataset();
  validate_family(family, d);
  SearchState state(family, cache, method, options);
  const auto& obs = options.observer;
  const std::size_t k = d.num_attributes();
  for (int n = 1; static_cast<std::size_t>(n) < k + 1; ++n) {
    if (obs.on_round_start) obs.on_round_start(n, state.forest());
    state.begin_round(n);
    std::size_t considered = 0;
    std::size_t accepted = 0;
    while (state.has_pending_edges()) {
      const LevelEdge e = state.pop_edge();
      ++considered;
      const bool join = state.joinable(e.x, e.y);
      if (join) {
        if (obs.on_join && options.snapshot_joins) {
          const JunctionForest before = state.forest();
          state.modify_tree(e.x, e.y);
          obs.on_join(n, e, before, state.forest());
        } else {
          state.modify_tree(e.x, e.y);
        }
        ++accepted;
      }
      if (obs.on_edge) obs.on_edge(n, e, join);
    }
    const bool grew = state.end_round();
    if (obs.on_round_end) obs.on_round_end(n, considered, accepted, state.forest());
    if (!grew || static_cast<std::size_t>(n) + 1 >= k) break;
  }
  return state.forest().canonical();
}

JunctionForest search_tree(const CandidateFamily& family, const TransactionDataset& d,
                           Method method, const SearchOptions& options) {
  EntropyCache cache(d);
  return search_tree(family, cache, method, options);
}

CandidateFamily filter_candidates(const CandidateFamily& candidates, const CandidateFamily& g) {
  std::unordered_set<Itemset, ItemsetHash> pairs;
  for (const auto& [x, e] : g.entries()) {
    if (x.size() == 2) pairs.insert(x);
  }
  CandidateFamily out(candidates.num_rows(), candidates.min_support());
  for (const auto& [x, e] : candidates.entries()) {
    // g is downward closed, so a non-singleton member inside x exists iff
    // one of g's pairs lies inside x.
    bool hit = false;
    const auto members = x.members();
    for (std::size_t i = 0; i < members.size() && !hit; ++i) {
      for (std::size_t j = i + 1; j < members.size() && !hit; ++j) {
        hit = pairs.count(Itemset{members[i], members[j]}) != 0;
      }
    }
    if (!hit) out.insert(x, e.count, e.forced);
  }
  return out;
}

std::vector<FamilyModel> search_sequence(const CandidateFamily& family,
                                         const TransactionDataset& d, Method method,
                                         std::size_t max_families,
                                         const SearchOptions& options) {
  EntropyCache cache(d);
  std::vector<FamilyModel> out;
  CandidateFamily current = family;
  while (true) {
    JunctionForest forest = search_tree(current, cache, method, options);
    CandidateFamily g = closure_family(forest.cliques(), current);
    bool only_singletons = true;
    for (const Itemset& c : forest.cliques()) only_singletons &= c.size() == 1;
    out.push_back({std::move(forest), g});
    if (only_singletons) break;
    if (max_families != 0 && out.size() >= max_families) break;
    current = filter_candidates(current, g);
  }
  return out;
}

}  // namespace decomine
