#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "decomine/dataset.hpp"
#include "decomine/jtree.hpp"
#include "decomine/miner.hpp"
#include "decomine/search.hpp"

namespace decomine::cli {

struct StoredFamily {
  JunctionForest forest;
  CandidateFamily family;
  // One table per clique, in clique order.
  std::vector<MarginalTable> marginals;
  ModelScore score;
};

struct Model {
  std::vector<std::string> attributes;
  std::uint64_t num_rows = 0;
  std::string dataset_digest;
  Method method = Method::kNone;
  double min_support = 0.0;
  std::vector<StoredFamily> families;
};

// Fills marginals and scores from the data.
Model make_model(const TransactionDataset& d, Method method, double min_support,
                 const std::vector<FamilyModel>& families);

// JSON. Supports are stored as [count, N] integer pairs so a round trip is
// exact. read_model throws ParseError on malformed documents; it does not
// check running intersection (see validate_model).
void write_model(std::ostream& out, const Model& m);
Model read_model(std::istream& in);
void save_model(const std::string& path, const Model& m);
Model load_model(const std::string& path);

// Structural checks: running intersection, family closure and coverage,
// marginal totals. Returns one message per problem.
std::vector<std::string> validate_model(const Model& m);

// Graphviz: one cluster per forest component, nodes labeled with clique
// tokens and edges with separator tokens.
void write_dot(std::ostream& out, const JunctionForest& forest,
               const std::vector<std::string>& names);

std::string format_tokens(const Itemset& x, const std::vector<std::string>& names);

}  // namespace decomine::cli
