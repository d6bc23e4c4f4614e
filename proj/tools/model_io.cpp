#include "model_io.hpp"

#include <fstream>
#include <ostream>
#include <unordered_map>

#include "decomine/error.hpp"
#include "json.hpp"

namespace decomine::cli {

using nlohmann::json;

namespace {

json tokens(const Itemset& x, const std::vector<std::string>& names) {
  json out = json::array();
  x.for_each([&](AttributeId a) { out.push_back(names.at(a)); });
  return out;
}

Itemset from_tokens(const json& j, const std::unordered_map<std::string, AttributeId>& index) {
  if (!j.is_array()) throw ParseError("expected a token array");
  Itemset x;
  for (const auto& t : j) {
    auto it = index.find(t.get<std::string>());
    if (it == index.end()) throw ParseError("unknown attribute '" + t.get<std::string>() + "'");
    x.insert(it->second);
  }
  return x;
}

std::string pattern_string(const Itemset& ones, const Itemset& scope) {
  std::string s;
  scope.for_each([&](AttributeId a) { s.push_back(ones.contains(a) ? '1' : '0'); });
  return s;
}

Itemset pattern_from_string(const std::string& s, const Itemset& scope) {
  if (s.size() != scope.size()) throw ParseError("marginal pattern length mismatch");
  Itemset ones;
  std::size_t i = 0;
  bool ok = true;
  scope.for_each([&](AttributeId a) {
    const char c = s[i++];
    if (c == '1') {
      ones.insert(a);
    } else if (c != '0') {
      ok = false;
    }
  });
  if (!ok) throw ParseError("marginal pattern must be 0/1");
  return ones;
}

json score_json(const ModelScore& s) {
  return {{"method", std::string(method_name(s.method))},
          {"entropy_nats", s.entropy_nats},
          {"log_likelihood", s.log_likelihood},
          {"penalty", s.penalty},
          {"total", s.total}};
}

}  // namespace

std::string format_tokens(const Itemset& x, const std::vector<std::string>& names) {
  std::string out;
  x.for_each([&](AttributeId a) {
    if (!out.empty()) out.push_back(' ');
    out += names.at(a);
  });
  return out;
}

Model make_model(const TransactionDataset& d, Method method, double min_support,
                 const std::vector<FamilyModel>& families) {
  Model m;
  m.attributes = d.names();
  m.num_rows = d.num_rows();
  m.dataset_digest = dataset_digest(d);
  m.method = method;
  m.min_support = min_support;
  EntropyCache cache(d);
  for (const auto& f : families) {
    StoredFamily s{f.forest, f.family, {}, score(f.forest, cache, method)};
    for (const Itemset& c : f.forest.cliques()) s.marginals.push_back(project(d, c));
    m.families.push_back(std::move(s));
  }
  return m;
}

void write_model(std::ostream& out, const Model& m) {
  json root;
  root["format"] = "decomine-model";
  root["version"] = 1;
  root["attributes"] = m.attributes;
  root["num_rows"] = m.num_rows;
  root["dataset_digest"] = m.dataset_digest;
  root["method"] = std::string(method_name(m.method));
  root["min_support"] = m.min_support;
  json fams = json::array();
  for (const auto& f : m.families) {
    json jf;
    json cliques = json::array();
    for (const Itemset& c : f.forest.cliques()) cliques.push_back(tokens(c, m.attributes));
    jf["cliques"] = cliques;
    json edges = json::array();
    json seps = json::array();
    for (const auto& e : f.forest.edges()) {
      edges.push_back({e.a, e.b});
      seps.push_back(tokens(f.forest.separator(e), m.attributes));
    }
    jf["edges"] = edges;
    jf["separators"] = seps;
    json marg = json::array();
    for (const auto& t : f.marginals) {
      json cells = json::array();
      for (const auto& c : t.cells()) cells.push_back({pattern_string(c.ones, t.scope()), c.count});
      marg.push_back({{"scope", tokens(t.scope(), m.attributes)},
                      {"total", t.total()},
                      {"cells", cells}});
    }
    jf["marginals"] = marg;
    json items = json::array();
    for (const Itemset& x : f.family.sorted_members()) {
      items.push_back({{"items", tokens(x, m.attributes)},
                       {"support", {*f.family.count(x), f.family.num_rows()}}});
    }
    jf["itemsets"] = items;
    jf["score"] = score_json(f.score);
    fams.push_back(std::move(jf));
  }
  root["families"] = fams;
  out << root.dump(1) << '\n';
}

Model read_model(std::istream& in) {
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model is not valid JSON: ") + e.what());
  }
  try {
    if (root.value("format", "") != "decomine-model") throw ParseError("not a decomine model");
    Model m;
    m.attributes = root.at("attributes").get<std::vector<std::string>>();
    m.num_rows = root.at("num_rows").get<std::uint64_t>();
    m.dataset_digest = root.at("dataset_digest").get<std::string>();
    const auto method = parse_method(root.at("method").get<std::string>());
    if (!method) throw ParseError("unknown method in model");
    m.method = *method;
    m.min_support = root.at("min_support").get<double>();
    if (m.num_rows == 0) throw ParseError("model has no rows");

    std::unordered_map<std::string, AttributeId> index;
    for (std::size_t i = 0; i < m.attributes.size(); ++i) {
      if (!index.emplace(m.attributes[i], static_cast<AttributeId>(i)).second) {
        throw ParseError("duplicate attribute '" + m.attributes[i] + "'");
      }
    }
    for (const auto& jf : root.at("families")) {
      std::vector<Itemset> cliques;
      for (const auto& c : jf.at("cliques")) cliques.push_back(from_tokens(c, index));
      std::vector<JunctionForest::Edge> edges;
      for (const auto& e : jf.at("edges")) {
        edges.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>()});
      }
      JunctionForest forest;
      try {
        forest = JunctionForest(std::move(cliques), std::move(edges));
      } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("bad forest: ") + e.what());
      }
      CandidateFamily family(m.num_rows, m.min_support);
      for (const auto& it : jf.at("itemsets")) {
        const Itemset x = from_tokens(it.at("items"), index);
        const auto& sup = it.at("support");
        const auto count = sup.at(0).get<std::uint64_t>();
        if (sup.at(1).get<std::uint64_t>() != m.num_rows) {
          throw ParseError("itemset support denominator differs from num_rows");
        }
        if (count > m.num_rows) throw ParseError("support count exceeds num_rows");
        const bool forced = x.size() == 1 &&
                            static_cast<double>(count) / static_cast<double>(m.num_rows) <
                                m.min_support;
        family.insert(x, count, forced);
      }
      std::vector<MarginalTable> marginals;
      for (const auto& jm : jf.value("marginals", json::array())) {
        const Itemset scope = from_tokens(jm.at("scope"), index);
        std::vector<MarginalTable::Cell> cells;
        for (const auto& c : jm.at("cells")) {
          cells.push_back({pattern_from_string(c.at(0).get<std::string>(), scope),
                           c.at(1).get<std::uint64_t>()});
        }
        marginals.emplace_back(scope, jm.at("total").get<std::uint64_t>(), std::move(cells));
      }
      ModelScore s;
      if (jf.contains("score")) {
        const auto& js = jf.at("score");
        s.method = m.method;
        s.entropy_nats = js.at("entropy_nats").get<double>();
        s.log_likelihood = js.at("log_likelihood").get<double>();
        s.penalty = js.at("penalty").get<double>();
        s.total = js.at("total").get<double>();
      }
      m.families.push_back({std::move(forest), std::move(family), std::move(marginals), s});
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model: ") + e.what());
  }
}

void save_model(const std::string& path, const Model& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_model(out, m);
  if (!out) throw IoError("write failed for " + path);
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_model(in);
}

std::vector<std::string> validate_model(const Model& m) {
  std::vector<std::string> problems;
  const Itemset all = Itemset::FirstN(m.attributes.size());
  for (std::size_t i = 0; i < m.families.size(); ++i) {
    const auto& f = m.families[i];
    const std::string tag = "family " + std::to_string(i) + ": ";
    std::string diag;
    if (!check_running_intersection(f.forest, &diag)) {
      problems.push_back(tag + "running intersection violated: " + diag);
    }
    if (!(f.forest.coverage() == all)) problems.push_back(tag + "cliques do not cover attributes");
    if (auto bad = f.family.closure_violation()) {
      problems.push_back(tag + "itemsets not downward closed at {" +
                         format_tokens(bad->first, m.attributes) + "}");
    }
    for (const Itemset& c : f.forest.cliques()) {
      if (!f.family.contains(c)) {
        problems.push_back(tag + "clique {" + format_tokens(c, m.attributes) +
                           "} missing from itemsets");
      }
    }
    for (const auto& t : f.marginals) {
      std::uint64_t sum = 0;
      for (const auto& c : t.cells()) sum += c.count;
      if (sum != t.total() || t.total() != m.num_rows) {
        problems.push_back(tag + "marginal of {" + format_tokens(t.scope(), m.attributes) +
                           "} does not sum to num_rows");
      }
    }
  }
  return problems;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

void write_dot(std::ostream& out, const JunctionForest& forest,
               const std::vector<std::string>& names) {
  const auto labels = forest.components();
  const std::size_t m = forest.num_components();
  out << "graph junction_forest {\n";
  out << "  node [shape=box];\n";
  for (std::size_t c = 0; c < m; ++c) {
    out << "  subgraph cluster_" << c << " {\n";
    out << "    label=\"component " << c << "\";\n";
    for (std::size_t i = 0; i < forest.size(); ++i) {
      if (labels[i] != c) continue;
      out << "    n" << i << " [label=\"" << dot_escape(format_tokens(forest.cliques()[i], names))
          << "\"];\n";
    }
    for (const auto& e : forest.edges()) {
      if (labels[e.a] != c) continue;
      out << "    n" << e.a << " -- n" << e.b << " [label=\""
          << dot_escape(format_tokens(forest.separator(e), names)) << "\"];\n";
    }
    out << "  }\n";
  }
  out << "}\n";
}

}  // namespace decomine::cli
