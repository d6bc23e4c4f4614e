#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "decomine/error.hpp"
#include "decomine/miner.hpp"
#include "decomine/oracle.hpp"
#include "decomine/query.hpp"
#include "decomine/search.hpp"
#include "json.hpp"
#include "model_io.hpp"

namespace decomine::cli {

namespace {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

LogLevel log_level() {
  const char* env = std::getenv("DECOMINE_LOG");
  if (!env) return LogLevel::kWarn;
  const std::string v = env;
  if (v == "error") return LogLevel::kError;
  if (v == "info") return LogLevel::kInfo;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kWarn;
}

void log(std::ostream& err, LogLevel level, const std::string& msg) {
  static const char* kNames[] = {"error", "warn", "info", "debug"};
  if (level <= log_level()) err << "[" << kNames[static_cast<int>(level)] << "] " << msg << '\n';
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

DataFormat parse_format(const std::string& s) {
  return s == "dense" ? DataFormat::kDense : DataFormat::kTokens;
}

// ---------------------------------------------------------------- mine

struct MineArgs {
  std::string data;
  std::string format = "tokens";
  double min_support = 0.0;
  std::string out;
};

int cmd_mine(const MineArgs& a, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  const TransactionDataset d = load_transactions(a.data, parse_format(a.format));
  const CandidateFamily f = mine_candidates(d, a.min_support);
  save_family(a.out, f, d.names());
  out << "itemsets: " << f.size() << '\n';
  out << "time_ms: " << std::fixed << std::setprecision(1) << elapsed_ms(start) << '\n';
  log(err, LogLevel::kInfo, "wrote " + a.out);
  return kOk;
}

// ---------------------------------------------------------------- build

struct BuildArgs {
  std::string data;
  std::string format = "tokens";
  std::string family;
  double min_support = 0.0;
  std::string reg = "bic";
  bool sequence = false;
  std::size_t max_families = 0;
  std::string out;
  bool verbose = false;
};

int cmd_build(const BuildArgs& a, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  const TransactionDataset d = load_transactions(a.data, parse_format(a.format));
  const Method method = *parse_method(a.reg);
  const CandidateFamily candidates =
      a.family.empty() ? mine_candidates(d, a.min_support) : load_family(a.family, d.names());

  SearchOptions options;
  if (a.verbose) {
    options.observer.on_round_end = [&err](int level, std::size_t considered,
                                           std::size_t accepted, const JunctionForest& t) {
      nlohmann::json j = {{"event", "round"},   {"level", level},
                          {"considered", considered}, {"accepted", accepted},
                          {"cliques", t.size()}};
      err << j.dump() << '\n';
    };
  }
  std::vector<FamilyModel> families;
  if (a.sequence) {
    families = search_sequence(candidates, d, method, a.max_families, options);
  } else {
    JunctionForest forest = search_tree(candidates, d, method, options);
    CandidateFamily g = closure_family(forest.cliques(), candidates);
    families.push_back({std::move(forest), std::move(g)});
  }
  const Model m = make_model(d, method, candidates.min_support(), families);
  save_model(a.out, m);

  std::set<Itemset> all;
  out << "candidates |F|: " << candidates.size() << '\n';
  for (std::size_t i = 0; i < m.families.size(); ++i) {
    const auto& f = m.families[i];
    for (const auto& [x, e] : f.family.entries()) all.insert(x);
    out << "family " << i + 1 << ": cliques=" << f.forest.size()
        << " components=" << f.forest.num_components() << " |G|=" << f.family.size()
        << std::setprecision(10) << " score=" << f.score.total << '\n';
  }
  out << "First Family |G_1|: " << m.families.front().family.size() << '\n';
  out << "All Families |U G_i|: " << all.size() << '\n';
  out << "time_ms: " << std::fixed << std::setprecision(1) << elapsed_ms(start) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- query

struct QueryArgs {
  std::string model;
  std::string query;
  std::string batch;
  std::size_t families = 1;
  std::string dump_lp;
};

Itemset parse_query(const std::string& text, const Model& m) {
  std::istringstream in(text);
  std::string tok;
  Itemset q;
  while (in >> tok) {
    std::optional<AttributeId> id;
    for (std::size_t i = 0; i < m.attributes.size(); ++i) {
      if (m.attributes[i] == tok) id = static_cast<AttributeId>(i);
    }
    if (!id) throw QueryError("unknown attribute '" + tok + "'");
    q.insert(*id);
  }
  if (q.empty()) throw QueryError("empty query");
  return q;
}

void print_interval(std::ostream& out, const QueryInterval& i) {
  out << '[' << i.lo << ", " << i.hi << ']';
}

void answer_query(const Model& m, const Itemset& q, std::size_t n, std::ostream& out,
                  std::ostream* lp_dump) {
  out << std::setprecision(10);
  out << "query: " << format_tokens(q, m.attributes) << '\n';
  std::vector<QueryInterval> parts;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = m.families[i];
    const QueryResult r = query_bounds(f.forest, f.family, q);
    parts.push_back(r.interval);
    out << "family " << i + 1 << ": ";
    print_interval(out, r.interval);
    if (r.degraded) out << " degraded";
    out << '\n';
    for (const auto& c : r.components) {
      if (!c.solved) continue;
      out << "  component " << c.plan.component << ": Q={" << format_tokens(c.plan.query, m.attributes)
          << "} root={" << format_tokens(c.plan.root, m.attributes)
          << "} cliques=" << c.plan.augmented.size() << " vars=" << c.plan.variables
          << " alpha=" << c.alpha << " beta=" << c.beta << " status=" << lp::status_name(c.min_status)
          << '/' << lp::status_name(c.max_status) << '\n';
      if (lp_dump) {
        *lp_dump << "# query {" << format_tokens(q, m.attributes) << "} family " << i + 1
                 << " component " << c.plan.component << '\n';
        *lp_dump << lp::to_text(build_component_lp(c.plan, f.family, lp::Sense::kMaximize));
      }
    }
  }
  const QueryInterval joint = intersect_intervals(parts);
  std::vector<double> singles;
  q.for_each([&](AttributeId a) {
    singles.push_back(m.families.front().family.frequency(Itemset::Single(a)));
  });
  const QueryInterval base = singleton_interval(singles);
  const double r = joint.width() <= 0.0 ? 0.0 : joint.width() / base.width();
  out << "intersection (" << n << " families): ";
  print_interval(out, joint);
  out << '\n' << "singleton: ";
  print_interval(out, base);
  out << '\n' << "r(Q;" << n << ") = " << r << '\n';
}

int cmd_query(const QueryArgs& a, std::ostream& out, std::ostream& err) {
  const Model m = load_model(a.model);
  if (m.families.empty()) throw QueryError("model holds no families");
  if (auto problems = validate_model(m); !problems.empty()) {
    for (const auto& p : problems) err << "invalid model: " << p << '\n';
    return kInvariantFailure;
  }
  std::size_t n = a.families == 0 ? m.families.size() : a.families;
  if (n > m.families.size()) {
    log(err, LogLevel::kWarn,
        "model has " + std::to_string(m.families.size()) + " families; using all");
    n = m.families.size();
  }
  std::vector<std::string> queries;
  if (!a.query.empty()) queries.push_back(a.query);
  if (!a.batch.empty()) {
    std::ifstream in(a.batch);
    if (!in) throw IoError("cannot open " + a.batch);
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) queries.push_back(line);
    }
  }
  if (queries.empty()) throw QueryError("no query given");
  std::vector<Itemset> parsed;
  for (const auto& text : queries) parsed.push_back(parse_query(text, m));

  std::ofstream dump;
  if (!a.dump_lp.empty()) {
    dump.open(a.dump_lp);
    if (!dump) throw IoError("cannot write " + a.dump_lp);
  }
  for (const Itemset& q : parsed) {
    const auto start = Clock::now();
    answer_query(m, q, n, out, dump.is_open() ? &dump : nullptr);
    log(err, LogLevel::kInfo, "query took " + std::to_string(elapsed_ms(start)) + " ms");
  }
  return kOk;
}

// ---------------------------------------------------------------- export-dot

int cmd_export_dot(const std::string& model_path, std::size_t index, const std::string& out_path,
                   std::ostream& out) {
  const Model m = load_model(model_path);
  if (index >= m.families.size()) throw ParameterError("family index out of range");
  if (out_path.empty()) {
    write_dot(out, m.families[index].forest, m.attributes);
    return kOk;
  }
  std::ofstream f(out_path);
  if (!f) throw IoError("cannot write " + out_path);
  write_dot(f, m.families[index].forest, m.attributes);
  return kOk;
}

// ---------------------------------------------------------------- gen-path

struct GenArgs {
  std::size_t items = 8;
  std::size_t rows = 1000;
  double flip = 0.3;
  std::uint64_t seed = 1;
  std::string format = "tokens";
  std::string out;
};

int cmd_gen_path(const GenArgs& a, std::ostream& out) {
  const TransactionDataset d = generate_path_dataset(a.items, a.rows, a.flip, a.seed);
  if (a.out.empty()) {
    write_transactions(out, d, parse_format(a.format));
    return kOk;
  }
  std::ofstream f(a.out);
  if (!f) throw IoError("cannot write " + a.out);
  write_transactions(f, d, parse_format(a.format));
  return kOk;
}

// ---------------------------------------------------------------- check

// Attribute i copies a random earlier attribute (flipped with some
// probability) or is an independent coin.
TransactionDataset check_dataset(std::size_t k, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> parent(k, -1);
  std::vector<double> flip(k, 0.5);
  for (std::size_t i = 1; i < k; ++i) {
    if (u(rng) < 0.7) {
      parent[i] = static_cast<int>(std::uniform_int_distribution<std::size_t>(0, i - 1)(rng));
      flip[i] = 0.05 + 0.4 * u(rng);
    } else {
      flip[i] = 0.2 + 0.6 * u(rng);
    }
  }
  std::vector<Itemset> rows;
  for (std::size_t r = 0; r < n; ++r) {
    Itemset row;
    for (std::size_t i = 0; i < k; ++i) {
      bool v = u(rng) < flip[i];
      if (parent[i] >= 0) v = row.contains(static_cast<AttributeId>(parent[i])) != v;
      if (v) row.insert(static_cast<AttributeId>(i));
    }
    rows.push_back(row);
  }
  return TransactionDataset(default_attribute_names(k), std::move(rows));
}

std::string serialize_instance(const TransactionDataset& d, const JunctionForest* t) {
  nlohmann::json j;
  j["attributes"] = d.names();
  std::ostringstream rows;
  write_transactions(rows, d, DataFormat::kDense);
  j["rows_dense"] = rows.str();
  if (t) {
    nlohmann::json cl = nlohmann::json::array();
    for (const Itemset& c : t->cliques()) cl.push_back(format_tokens(c, d.names()));
    j["cliques"] = cl;
    nlohmann::json ed = nlohmann::json::array();
    for (const auto& e : t->edges()) ed.push_back({e.a, e.b});
    j["edges"] = ed;
  }
  return j.dump();
}

constexpr Method kMethods[] = {Method::kNone, Method::kAic, Method::kBic, Method::kMdl};

int check_normalization(std::ostream& err) {
  int failures = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const TransactionDataset d = check_dataset(6 + seed % 3, 150, seed);
    const CandidateFamily f = mine_candidates(d, 0.0);
    for (Method m : kMethods) {
      const JunctionForest t = search_tree(f, d, m);
      const auto table = oracle::enumerate_tree_distribution(t, d);
      double sum = 0.0;
      for (double p : table) sum += p;
      const double h = oracle::table_entropy(table);
      bool ok = std::fabs(sum - 1.0) <= 1e-9 && std::fabs(h - tree_entropy(t, d)) <= 1e-9;
      for (const Itemset& c : t.cliques()) {
        const MarginalTable emp = project(d, c);
        for (const auto& cell : emp.cells()) {
          ok &= std::fabs(oracle::table_marginal(table, c, cell.ones) - emp.probability(cell.ones)) <=
                1e-9;
        }
      }
      if (!ok) {
        ++failures;
        err << "normalization failure (sum " << sum << "): " << serialize_instance(d, &t) << '\n';
      }
    }
  }
  return failures;
}

int check_drops(std::ostream& err) {
  int failures = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const TransactionDataset d = check_dataset(7, 200, 100 + seed);
    const CandidateFamily f = mine_candidates(d, 0.0);
    for (Method m : kMethods) {
      SearchOptions options;
      options.snapshot_joins = true;
      options.observer.on_join = [&](int, const LevelEdge& e, const JunctionForest& before,
                                     const JunctionForest& after) {
        const double drop = tree_entropy(before, d) - tree_entropy(after, d);
        std::string diag;
        const bool rip = check_running_intersection(after, &diag);
        if (std::fabs(drop - e.weight) > 1e-9 || !rip) {
          ++failures;
          err << "entropy drop " << drop << " vs weight " << e.weight << (rip ? "" : " " + diag)
              << ": " << serialize_instance(d, &after) << '\n';
        }
      };
      search_tree(f, d, m, options);
    }
  }
  return failures;
}

int check_query(std::ostream& err) {
  int failures = 0;
  std::mt19937_64 rng(7);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const std::size_t k = 6 + seed % 3;
    const TransactionDataset d = check_dataset(k, 200, 200 + seed);
    const CandidateFamily f = mine_candidates(d, 0.0);
    for (Method m : kMethods) {
      const JunctionForest t = search_tree(f, d, m);
      const CandidateFamily g = closure_family(t.cliques(), f);
      for (int rep = 0; rep < 3; ++rep) {
        std::vector<AttributeId> ids(k);
        for (std::size_t i = 0; i < k; ++i) ids[i] = static_cast<AttributeId>(i);
        std::shuffle(ids.begin(), ids.end(), rng);
        const std::size_t size = 2 + rng() % 3;
        const Itemset q = Itemset::FromMembers(std::span(ids.data(), size));
        const QueryInterval got = query_bounds(t, g, q).interval;
        const oracle::OracleBounds ref = oracle::full_lp_bounds(g, q, k);
        if (!ref.ok() || std::fabs(got.lo - ref.interval.lo) > 1e-6 ||
            std::fabs(got.hi - ref.interval.hi) > 1e-6) {
          ++failures;
          err << "query {" << d.format(q) << "} gave [" << got.lo << ", " << got.hi
              << "], oracle [" << ref.interval.lo << ", " << ref.interval.hi
              << "]: " << serialize_instance(d, &t) << '\n';
        }
      }
    }
  }
  return failures;
}

}  // namespace

int run_checks(const std::string& scope, const std::string& model_path, std::ostream& out,
               std::ostream& err) {
  int failures = 0;
  auto suite = [&](const std::string& name, auto&& fn) {
    if (scope != "all" && scope != name) return;
    const int f = fn();
    out << name << ": " << (f == 0 ? "ok" : std::to_string(f) + " failure(s)") << '\n';
    failures += f;
  };
  suite("normalization", [&] { return check_normalization(err); });
  suite("drops", [&] { return check_drops(err); });
  suite("query", [&] { return check_query(err); });
  if (!model_path.empty() && (scope == "all" || scope == "model")) {
    int f = 0;
    try {
      const Model m = load_model(model_path);
      for (const auto& p : validate_model(m)) {
        err << "model: " << p << '\n';
        ++f;
      }
    } catch (const ParseError& e) {
      err << "model: " << e.what() << '\n';
      ++f;
    }
    out << "model: " << (f == 0 ? "ok" : std::to_string(f) + " failure(s)") << '\n';
    failures += f;
  }
  return failures == 0 ? kOk : kInvariantFailure;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decomposable itemset families and frequency-bound queries", "decomine"};
  app.require_subcommand(1);

  const std::vector<std::string> methods = {"none", "aic", "bic", "mdl"};
  const std::vector<std::string> formats = {"tokens", "dense"};

  MineArgs mine;
  auto* c_mine = app.add_subcommand("mine", "Mine a downward closed candidate family");
  c_mine->add_option("--data", mine.data, "Transaction file")->required();
  c_mine->add_option("--format", mine.format)->check(CLI::IsMember(formats));
  c_mine->add_option("--min-support", mine.min_support, "Frequency threshold");
  c_mine->add_option("--out", mine.out, "Family file to write")->required();

  BuildArgs build;
  auto* c_build = app.add_subcommand("build", "Build junction forests from data");
  c_build->add_option("--data", build.data)->required();
  c_build->add_option("--format", build.format)->check(CLI::IsMember(formats));
  auto* fam_opt = c_build->add_option("--family", build.family, "Candidate family file");
  c_build->add_option("--min-support", build.min_support)->excludes(fam_opt);
  c_build->add_option("--reg", build.reg)->check(CLI::IsMember(methods));
  c_build->add_flag("--sequence", build.sequence, "Build a sequence of families");
  c_build->add_option("--max-families", build.max_families, "0 means no limit");
  c_build->add_option("--out", build.out, "Model JSON to write")->required();
  c_build->add_flag("--verbose", build.verbose, "JSON-lines progress on stderr");

  QueryArgs query;
  auto* c_query = app.add_subcommand("query", "Frequency bounds of an itemset");
  c_query->add_option("--model", query.model)->required();
  c_query->add_option("query", query.query, "Whitespace separated tokens");
  c_query->add_option("--batch", query.batch, "File with one query per line");
  c_query->add_option("--families", query.families, "Number of families to intersect (0 = all)");
  c_query->add_option("--dump-lp", query.dump_lp, "Write the component LPs here");

  std::string dot_model;
  std::string dot_out;
  std::size_t dot_index = 0;
  auto* c_dot = app.add_subcommand("export-dot", "Render a forest as Graphviz DOT");
  c_dot->add_option("--model", dot_model)->required();
  c_dot->add_option("--index", dot_index, "Family index (0-based)");
  c_dot->add_option("--out", dot_out, "Output file (default stdout)");

  GenArgs gen;
  auto* c_gen = app.add_subcommand("gen-path", "Generate a Path dataset");
  c_gen->add_option("--items", gen.items)->check(CLI::PositiveNumber);
  c_gen->add_option("--rows", gen.rows)->check(CLI::PositiveNumber);
  c_gen->add_option("--flip", gen.flip)->check(CLI::Range(0.0, 1.0));
  c_gen->add_option("--seed", gen.seed);
  c_gen->add_option("--format", gen.format)->check(CLI::IsMember(formats));
  c_gen->add_option("--out", gen.out, "Output file (default stdout)");

  std::string scope = "all";
  std::string check_model;
  auto* c_check = app.add_subcommand("check", "Run invariant and oracle suites");
  c_check->add_option("--scope", scope)
      ->check(CLI::IsMember({"all", "normalization", "drops", "query", "model"}));
  c_check->add_option("--model", check_model, "Also validate this model file");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c_mine) return cmd_mine(mine, out, err);
    if (*c_build) return cmd_build(build, out, err);
    if (*c_query) return cmd_query(query, out, err);
    if (*c_dot) return cmd_export_dot(dot_model, dot_index, dot_out, out);
    if (*c_gen) return cmd_gen_path(gen, out);
    if (*c_check) return run_checks(scope, check_model, out, err);
  } catch (const QueryError& e) {
    err << "error: " << e.what() << '\n';
    return kBadQuery;
  } catch (const FamilyError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidFamily;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvariantFailure;
  }
  return kUsage;
}

}  // namespace decomine::cli
