#include "decomine/query.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "decomine/error.hpp"
#include "decomine/forest_graph.hpp"

namespace decomine {

namespace {

constexpr double kMaxPlanVariables = 1 << 22;
constexpr double kIntervalTolerance = 1e-9;

double cell_count(const Itemset& c) { return std::ldexp(1.0, static_cast<int>(c.size())); }

JunctionForest component_forest(const JunctionForest& forest, std::size_t component) {
  const auto labels = forest.components();
  std::vector<std::size_t> remap(forest.size(), 0);
  std::vector<Itemset> cliques;
  for (std::size_t i = 0; i < forest.size(); ++i) {
    if (labels[i] != component) continue;
    remap[i] = cliques.size();
    cliques.push_back(forest.cliques()[i]);
  }
  if (cliques.empty()) throw QueryError("no such forest component");
  std::vector<JunctionForest::Edge> edges;
  for (const auto& e : forest.edges()) {
    if (labels[e.a] == component) edges.push_back({remap[e.a], remap[e.b]});
  }
  return JunctionForest(std::move(cliques), std::move(edges));
}

// Drops leaves whose query attributes are also in their neighbor.
bool prune_leaves(ForestGraph& g, const Itemset& q) {
  bool changed = false;
  for (std::size_t id : g.nodes()) {
    if (g.num_alive() <= 1) break;
    if (g.neighbors(id).size() != 1) continue;
    const std::size_t nb = *g.neighbors(id).begin();
    if ((g.clique(id) & q).is_subset_of(g.clique(nb))) {
      g.remove_node(id);
      changed = true;
    }
  }
  return changed;
}

// Removes attributes outside q held by exactly one clique.
bool drop_private_attributes(ForestGraph& g, const Itemset& q) {
  bool changed = false;
  const auto nodes = g.nodes();
  Itemset cover;
  for (std::size_t id : nodes) cover |= g.clique(id);
  (cover - q).for_each([&](AttributeId a) {
    std::size_t holder = 0;
    std::size_t holders = 0;
    for (std::size_t id : nodes) {
      if (g.clique(id).contains(a)) {
        holder = id;
        ++holders;
      }
    }
    if (holders == 1) {
      Itemset c = g.clique(holder);
      c.erase(a);
      g.set_clique(holder, c);
      changed = true;
    }
  });
  return changed;
}

ForestGraph augment(const JunctionForest& pruned, std::size_t root, const Itemset& q) {
  ForestGraph g(pruned);
  q.for_each([&](AttributeId a) {
    for (std::size_t c = 0; c < pruned.size(); ++c) {
      if (!pruned.cliques()[c].contains(a)) continue;
      const auto p = g.path(root, c);
      for (std::size_t id : *p) {
        Itemset x = g.clique(id);
        x.insert(a);
        g.set_clique(id, x);
      }
    }
  });
  g.purge_redundant();
  return g;
}

QueryInterval clamp_unit(double lo, double hi) {
  lo = std::clamp(lo, 0.0, 1.0);
  hi = std::clamp(hi, 0.0, 1.0);
  if (lo > hi && lo - hi <= kIntervalTolerance) lo = hi;
  return {lo, hi};
}

}  // namespace

ComponentPlan plan_component(const JunctionForest& forest, std::size_t component,
                             const Itemset& q, bool prune) {
  const JunctionForest comp = component_forest(forest, component);
  if (q.empty()) throw QueryError("empty query restriction");
  if (!q.is_subset_of(comp.coverage())) throw QueryError("query not covered by component");

  ForestGraph g(comp);
  if (prune) {
    bool changed = true;
    while (changed) {
      changed = prune_leaves(g, q);
      changed |= drop_private_attributes(g, q);
      changed |= g.purge_redundant() > 0;
    }
  }
  ComponentPlan plan;
  plan.component = component;
  plan.query = q;
  plan.pruned = g.to_forest();

  const auto& cliques = plan.pruned.cliques();
  bool have = false;
  std::size_t best_size = 0;
  for (std::size_t r = 0; r < cliques.size(); ++r) {
    const JunctionForest aug = augment(plan.pruned, r, q).to_forest();
    double vars = 0.0;
    for (const Itemset& c : aug.cliques()) vars += cell_count(c);
    const bool better = !have || std::make_tuple(vars, aug.size(), cliques[r]) <
                                     std::make_tuple(plan.variables, best_size, plan.root);
    if (better) {
      have = true;
      plan.variables = vars;
      best_size = aug.size();
      plan.root = cliques[r];
      plan.augmented = aug;
    }
  }
  if (plan.variables > kMaxPlanVariables) {
    throw CapacityError("query plan needs " + std::to_string(plan.variables) +
                        " LP variables");
  }
  return plan;
}

lp::Problem build_component_lp(const ComponentPlan& plan, const CandidateFamily& family,
                               lp::Sense sense) {
  const JunctionForest& t = plan.augmented;
  const auto& cliques = t.cliques();
  std::vector<std::size_t> offset(cliques.size() + 1, 0);
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    if (cliques[i].size() > 30) throw CapacityError("augmented clique too large");
    offset[i + 1] = offset[i] + (std::size_t{1} << cliques[i].size());
  }
  lp::Problem p;
  p.num_vars = offset.back();
  p.sense = sense;
  p.objective.assign(p.num_vars, 0.0);

  for (std::size_t i = 0; i < cliques.size(); ++i) {
    const Itemset& c = cliques[i];
    const std::uint64_t cells = std::uint64_t{1} << c.size();
    for (std::uint64_t x = 0; x < cells; ++x) {
      const Itemset xs = unpack_pattern(x, c);
      double rhs = 1.0;
      if (!xs.empty()) {
        if (!family.contains(xs)) continue;
        rhs = family.frequency(xs);
      }
      std::vector<double> row(p.num_vars, 0.0);
      for (std::uint64_t v = 0; v < cells; ++v) {
        if ((v & x) == x) row[offset[i] + v] = 1.0;
      }
      p.add_constraint(std::move(row), rhs);
    }
  }

  for (const auto& e : t.edges()) {
    const Itemset s = t.separator(e);
    const std::uint64_t patterns = std::uint64_t{1} << s.size();
    std::vector<double> blank(p.num_vars, 0.0);
    std::vector<std::vector<double>> rows(patterns, blank);
    auto add = [&](std::size_t idx, double sign) {
      const Itemset& c = cliques[idx];
      const std::uint64_t cells = std::uint64_t{1} << c.size();
      for (std::uint64_t v = 0; v < cells; ++v) {
        const std::uint64_t sp = pack_pattern(unpack_pattern(v, c), s);
        rows[sp][offset[idx] + v] = sign;
      }
    };
    add(e.a, 1.0);
    add(e.b, -1.0);
    for (auto& r : rows) p.add_constraint(std::move(r), 0.0);
  }

  std::size_t target = cliques.size();
  for (std::size_t i = 0; i < cliques.size() && target == cliques.size(); ++i) {
    if (plan.root.is_subset_of(cliques[i]) && plan.query.is_subset_of(cliques[i])) target = i;
  }
  if (target == cliques.size()) throw std::logic_error("augmented tree lost its root");
  const Itemset& r = cliques[target];
  const std::uint64_t qmask = pack_pattern(plan.query, r);
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << r.size()); ++v) {
    if ((v & qmask) == qmask) p.objective[offset[target] + v] = 1.0;
  }
  return p;
}

QueryInterval singleton_interval(const std::vector<double>& frequencies) {
  if (frequencies.empty()) return {1.0, 1.0};
  double sum = 0.0;
  double lowest = 1.0;
  for (double f : frequencies) {
    if (!(f >= 0.0 && f <= 1.0)) throw ParameterError("frequency outside [0, 1]");
    sum += f;
    lowest = std::min(lowest, f);
  }
  const double m = static_cast<double>(frequencies.size());
  return {std::max(0.0, sum - (m - 1.0)), lowest};
}

QueryResult query_bounds(const JunctionForest& forest, const CandidateFamily& family,
                         const Itemset& q, const QueryOptions& options) {
  if (q.empty()) throw QueryError("query is empty");
  if (!q.is_subset_of(forest.coverage())) throw QueryError("query mentions uncovered attributes");

  const auto labels = forest.components();
  const std::size_t m = forest.num_components();
  std::vector<Itemset> cover(m);
  for (std::size_t i = 0; i < forest.size(); ++i) cover[labels[i]] |= forest.cliques()[i];

  QueryResult result;
  double alpha_sum = 0.0;
  double beta_min = 1.0;
  for (std::size_t c = 0; c < m; ++c) {
    ComponentResult cr;
    const Itemset qc = q & cover[c];
    if (!qc.empty()) {
      cr.solved = true;
      cr.plan = plan_component(forest, c, qc, options.prune);
      const lp::Solution lo =
          lp::solve(build_component_lp(cr.plan, family, lp::Sense::kMinimize), options.lp);
      const lp::Solution hi =
          lp::solve(build_component_lp(cr.plan, family, lp::Sense::kMaximize), options.lp);
      cr.min_status = lo.status;
      cr.max_status = hi.status;
      QueryInterval fallback{0.0, 1.0};
      if (lo.status != lp::Status::kOptimal || hi.status != lp::Status::kOptimal) {
        result.degraded = true;
        std::vector<double> f;
        qc.for_each([&](AttributeId a) { f.push_back(family.frequency(Itemset::Single(a))); });
        fallback = singleton_interval(f);
      }
      cr.alpha = lo.status == lp::Status::kOptimal ? std::clamp(lo.value, 0.0, 1.0) : fallback.lo;
      cr.beta = hi.status == lp::Status::kOptimal ? std::clamp(hi.value, 0.0, 1.0) : fallback.hi;
    }
    alpha_sum += cr.alpha;
    beta_min = std::min(beta_min, cr.beta);
    result.components.push_back(std::move(cr));
  }
  result.interval =
      clamp_unit(std::max(alpha_sum - (static_cast<double>(m) - 1.0), 0.0), beta_min);
  return result;
}

QueryInterval intersect_intervals(const std::vector<QueryInterval>& intervals) {
  QueryInterval out{0.0, 1.0};
  for (const auto& i : intervals) {
    out.lo = std::max(out.lo, i.lo);
    out.hi = std::min(out.hi, i.hi);
  }
  if (out.lo > out.hi) {
    if (out.lo - out.hi > kIntervalTolerance) {
      throw ConsistencyError("frequency intervals do not intersect: gap " +
                             std::to_string(out.lo - out.hi));
    }
    out.lo = out.hi = 0.5 * (out.lo + out.hi);
  }
  return out;
}

QueryInterval query_multi(const std::vector<FamilyRef>& families, const Itemset& q,
                          const QueryOptions& options) {
  if (families.empty()) throw QueryError("no families to query");
  std::vector<QueryInterval> parts;
  for (const auto& f : families) {
    parts.push_back(query_bounds(*f.forest, *f.family, q, options).interval);
  }
  return intersect_intervals(parts);
}

}  // namespace decomine
