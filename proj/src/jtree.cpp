#include "decomine/jtree.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include "decomine/forest_graph.hpp"

namespace decomine {

JunctionForest::JunctionForest(std::vector<Itemset> cliques, std::vector<Edge> edges)
    : cliques_(std::move(cliques)), edges_(std::move(edges)) {
  std::unordered_set<Itemset, ItemsetHash> seen;
  for (const Itemset& c : cliques_) {
    if (c.empty()) throw std::invalid_argument("junction forest clique is empty");
    if (!seen.insert(c).second) throw std::invalid_argument("duplicate clique in forest");
  }
  std::set<std::pair<std::size_t, std::size_t>> edge_set;
  for (const Edge& e : edges_) {
    if (e.a >= cliques_.size() || e.b >= cliques_.size()) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.a == e.b) throw std::invalid_argument("self loop in forest");
    if (!edge_set.insert(std::minmax(e.a, e.b)).second) {
      throw std::invalid_argument("duplicate edge in forest");
    }
  }
}

JunctionForest JunctionForest::Singletons(std::size_t k) {
  std::vector<Itemset> cliques;
  for (std::size_t i = 0; i < k; ++i) cliques.push_back(Itemset::Single(static_cast<AttributeId>(i)));
  return JunctionForest(std::move(cliques), {});
}

std::vector<Itemset> JunctionForest::separators() const {
  std::vector<Itemset> out;
  out.reserve(edges_.size());
  for (const Edge& e : edges_) out.push_back(separator(e));
  return out;
}

std::optional<std::size_t> JunctionForest::find(const Itemset& clique) const {
  for (std::size_t i = 0; i < cliques_.size(); ++i) {
    if (cliques_[i] == clique) return i;
  }
  return std::nullopt;
}

Itemset JunctionForest::coverage() const {
  Itemset u;
  for (const Itemset& c : cliques_) u |= c;
  return u;
}

std::vector<std::vector<std::size_t>> JunctionForest::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(cliques_.size());
  for (const Edge& e : edges_) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

std::vector<std::size_t> JunctionForest::components() const {
  const auto adj = adjacency();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(cliques_.size(), kUnset);
  std::size_t next = 0;
  for (std::size_t s = 0; s < cliques_.size(); ++s) {
    if (label[s] != kUnset) continue;
    std::vector<std::size_t> stack{s};
    label[s] = next;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : adj[u]) {
        if (label[v] == kUnset) {
          label[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return label;
}

std::size_t JunctionForest::num_components() const {
  const auto label = components();
  return label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
}

std::optional<std::vector<std::size_t>> JunctionForest::path(std::size_t from,
                                                             std::size_t to) const {
  return ForestGraph(*this).path(from, to);
}

JunctionForest JunctionForest::canonical() const {
  std::vector<std::size_t> order(cliques_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return cliques_[a] < cliques_[b]; });
  std::vector<std::size_t> rank(cliques_.size());
  std::vector<Itemset> cliques;
  for (std::size_t i = 0; i < order.size(); ++i) {
    rank[order[i]] = i;
    cliques.push_back(cliques_[order[i]]);
  }
  std::vector<Edge> edges;
  for (const Edge& e : edges_) {
    auto [lo, hi] = std::minmax(rank[e.a], rank[e.b]);
    edges.push_back({lo, hi});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return JunctionForest(std::move(cliques), std::move(edges));
}

bool operator==(const JunctionForest& a, const JunctionForest& b) {
  const JunctionForest ca = a.canonical();
  const JunctionForest cb = b.canonical();
  return ca.cliques() == cb.cliques() && ca.edges() == cb.edges();
}

bool check_running_intersection(const JunctionForest& t, std::string* diagnostic) {
  auto fail = [&](std::string msg) {
    if (diagnostic) *diagnostic = std::move(msg);
    return false;
  };
  const auto& cliques = t.cliques();
  std::vector<std::size_t> parent(cliques.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : t.edges()) {
    const std::size_t ra = root(e.a);
    const std::size_t rb = root(e.b);
    if (ra == rb) {
      return fail("edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) +
                  ") closes a cycle");
    }
    parent[ra] = rb;
  }
  // In an acyclic graph, the cliques holding attribute a are connected iff
  // the edges among them number one less than the cliques.
  const Itemset cover = t.coverage();
  bool ok = true;
  cover.for_each([&](AttributeId a) {
    if (!ok) return;
    std::size_t holders = 0;
    for (const Itemset& c : cliques) holders += c.contains(a) ? 1 : 0;
    std::size_t links = 0;
    for (const auto& e : t.edges()) {
      links += (cliques[e.a].contains(a) && cliques[e.b].contains(a)) ? 1 : 0;
    }
    if (links + 1 != holders) {
      ok = fail("attribute " + std::to_string(a) + " occurs in " + std::to_string(holders) +
                " cliques that do not form a connected subtree");
    }
  });
  return ok;
}

bool is_n1_connected(const JunctionForest& t, const Itemset& x, const Itemset& y, int n) {
  const auto xi = t.find(x);
  const auto yi = t.find(y);
  if (!xi || !yi) throw std::invalid_argument("is_n1_connected: not a clique of the forest");
  const auto p = t.path(*xi, *yi);
  if (n <= 1) return !p.has_value();
  if (!p) return false;
  for (std::size_t i = 0; i + 1 < p->size(); ++i) {
    const Itemset sep = t.cliques()[(*p)[i]] & t.cliques()[(*p)[i + 1]];
    if (sep.size() == static_cast<std::size_t>(n - 1)) return true;
  }
  return false;
}

double tree_entropy(const JunctionForest& t, EntropyCache& cache) {
  double h = 0.0;
  for (const Itemset& c : t.cliques()) h += cache(c);
  for (const auto& e : t.edges()) h -= cache(t.separator(e));
  return h;
}

double tree_entropy(const JunctionForest& t, const TransactionDataset& d) {
  EntropyCache cache(d);
  return tree_entropy(t, cache);
}

DecomposableDistribution::DecomposableDistribution(const JunctionForest& t,
                                                   const TransactionDataset& d) {
  for (const Itemset& c : t.cliques()) cliques_.push_back(project(d, c));
  for (const auto& e : t.edges()) separators_.push_back(project(d, t.separator(e)));
}

double DecomposableDistribution::probability(const Itemset& v) const {
  double numerator = 1.0;
  for (const auto& m : cliques_) {
    const double p = m.probability(v & m.scope());
    if (p == 0.0) return 0.0;
    numerator *= p;
  }
  double denominator = 1.0;
  for (const auto& m : separators_) {
    const double p = m.probability(v & m.scope());
    if (p == 0.0) return 0.0;  // 0/0 := 0
    denominator *= p;
  }
  return numerator / denominator;
}

double tree_distribution_eval(const JunctionForest& t, const TransactionDataset& d,
                              const Itemset& v) {
  return DecomposableDistribution(t, d).probability(v);
}

double tree_log_likelihood(const JunctionForest& t, const TransactionDataset& d) {
  return -static_cast<double>(d.num_rows()) * tree_entropy(t, d);
}

JunctionForest purge_redundant(const JunctionForest& t) {
  ForestGraph g(t);
  g.purge_redundant();
  return g.to_forest();
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kNone: return "none";
    case Method::kAic: return "aic";
    case Method::kBic: return "bic";
    case Method::kMdl: return "mdl";
  }
  return "none";
}

std::optional<Method> parse_method(std::string_view s) {
  if (s == "none") return Method::kNone;
  if (s == "aic") return Method::kAic;
  if (s == "bic") return Method::kBic;
  if (s == "mdl") return Method::kMdl;
  return std::nullopt;
}

double mdl_cost(double k, std::uint64_t dataset_size) {
  return (k - 1.0) / 2.0 * std::log(static_cast<double>(dataset_size)) -
         0.5 * std::log(std::numbers::pi) - std::lgamma(k / 2.0);
}

namespace {

double cells(const Itemset& x) { return std::ldexp(1.0, static_cast<int>(x.size())); }

}  // namespace

double parameter_count(const JunctionForest& t) {
  double k = 0.0;
  for (const Itemset& c : t.cliques()) k += cells(c) - 1.0;
  for (const auto& e : t.edges()) k -= cells(t.separator(e)) - 1.0;
  return k;
}

ModelScore score_from_entropy(const JunctionForest& t, double entropy_nats,
                              std::uint64_t dataset_size, Method method) {
  ModelScore s;
  s.method = method;
  s.entropy_nats = entropy_nats;
  const double n = static_cast<double>(dataset_size);
  s.log_likelihood = -n * entropy_nats;
  switch (method) {
    case Method::kNone:
      s.penalty = 0.0;
      break;
    case Method::kAic:
      s.penalty = parameter_count(t);
      break;
    case Method::kBic:
      s.penalty = 0.5 * std::log(n) * parameter_count(t);
      break;
    case Method::kMdl: {
      double p = 0.0;
      for (const Itemset& c : t.cliques()) p += mdl_cost(cells(c), dataset_size);
      for (const auto& e : t.edges()) p -= mdl_cost(cells(t.separator(e)), dataset_size);
      s.penalty = p;
      break;
    }
  }
  s.total = -s.log_likelihood + s.penalty;
  return s;
}

ModelScore score(const JunctionForest& t, EntropyCache& cache, Method method) {
  return score_from_entropy(t, tree_entropy(t, cache), cache.dataset().num_rows(), method);
}

ModelScore score(const JunctionForest& t, const TransactionDataset& d, Method method) {
  EntropyCache cache(d);
  return score(t, cache, method);
}

}  // namespace decomine
