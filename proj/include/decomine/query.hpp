#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "decomine/itemset.hpp"
#include "decomine/jtree.hpp"
#include "decomine/lp.hpp"
#include "decomine/miner.hpp"

namespace decomine {

struct QueryInterval {
  double lo = 0.0;
  double hi = 1.0;
  double width() const { return hi - lo; }
  bool contains(double f, double tol = 0.0) const { return f >= lo - tol && f <= hi + tol; }
};

// How one connected component of a forest is turned into a linear program.
struct ComponentPlan {
  std::size_t component = 0;
  // The query restricted to the component's attributes.
  Itemset query;
  // Cliques of the smallest subtree covering the query, after removing
  // non-query attributes that occur in a single clique and redundant
  // cliques.
  JunctionForest pruned;
  Itemset root;
  // The pruned tree with query attributes pushed towards the root; every
  // clique on a path from the root to a holder of a query attribute
  // receives that attribute.
  JunctionForest augmented;
  // Sum over augmented cliques of 2^|clique|.
  double variables = 0.0;
};

struct ComponentResult {
  ComponentPlan plan;
  double alpha = 1.0;
  double beta = 1.0;
  lp::Status min_status = lp::Status::kOptimal;
  lp::Status max_status = lp::Status::kOptimal;
  // False when the component has no query attributes and contributes [1, 1].
  bool solved = false;
};

struct QueryResult {
  QueryInterval interval;
  // Some component LP failed; its bounds fell back to singleton bounds.
  bool degraded = false;
  std::vector<ComponentResult> components;
};

struct QueryOptions {
  // When false, subtree selection and attribute removal are skipped and the
  // program spans the whole component. Bounds are the same either way.
  bool prune = true;
  lp::Options lp;
};

// Plans component `component` (a label of forest.components()) for q, a
// nonempty set of attributes covered by that component. Among candidate
// roots the plan with fewest variables wins, then fewest cliques, then the
// lexicographically smallest root.
ComponentPlan plan_component(const JunctionForest& forest, std::size_t component,
                             const Itemset& q, bool prune = true);

// Frequency interval of q consistent with the frequencies of `family` (the
// downward closure of the forest's cliques, with counts). Throws
// QueryError when q is empty or not covered by the forest.
QueryResult query_bounds(const JunctionForest& forest, const CandidateFamily& family,
                         const Itemset& q, const QueryOptions& options = {});

// Intersection over several families. Intervals that miss each other by
// at most 1e-9 collapse to a point; larger gaps raise ConsistencyError.
QueryInterval intersect_intervals(const std::vector<QueryInterval>& intervals);

struct FamilyRef {
  const JunctionForest* forest;
  const CandidateFamily* family;
};

QueryInterval query_multi(const std::vector<FamilyRef>& families, const Itemset& q,
                          const QueryOptions& options = {});

// Frechet bounds [max(0, sum f - (m - 1)), min f].
QueryInterval singleton_interval(const std::vector<double>& frequencies);

// The linear program of one side (maximize or minimize) of a plan.
lp::Problem build_component_lp(const ComponentPlan& plan, const CandidateFamily& family,
                               lp::Sense sense);

}  // namespace decomine
