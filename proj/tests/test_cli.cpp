#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "commands.hpp"
#include "decomine/search.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "model_io.hpp"

using namespace decomine;
using fixtures::S;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "decomine");
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("decomine_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string path(const std::string& name) { return (scratch() / name).string(); }

void write_file(const std::string& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string read_file(const std::string& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("mine") {
  write_file(path("tiny.txt"), "a b\nb c\na b c\n");
  Run r = run({"mine", "--data", path("tiny.txt"), "--min-support", "0", "--out", path("f0.txt")});
  CHECK(r.code == 0);
  CHECK(r.out.find("itemsets: 8") != std::string::npos);
  r = run({"mine", "--data", path("tiny.txt"), "--min-support", "1.01", "--out", path("f1.txt")});
  CHECK(r.code == 0);
  CHECK(r.out.find("itemsets: 4") != std::string::npos);
  r = run({"mine", "--data", path("missing.txt"), "--out", path("f2.txt")});
  CHECK(r.code == 2);
  r = run({"mine", "--data", path("tiny.txt")});
  CHECK(r.code == 64);
}

TEST_CASE("build, query and export") {
  Run r = run({"gen-path", "--items", "8", "--rows", "1000", "--flip", "0.3", "--seed", "1",
               "--out", path("path.txt"), "--format", "dense"});
  REQUIRE(r.code == 0);
  r = run({"build", "--data", path("path.txt"), "--format", "dense", "--reg", "bic", "--sequence",
           "--max-families", "3", "--out", path("path.json")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("First Family |G_1|: 16") != std::string::npos);  // {} + 8 + 7

  const cli::Model m = cli::load_model(path("path.json"));
  REQUIRE(m.families.size() == 3);
  std::vector<Itemset> chain;
  for (AttributeId i = 0; i + 1 < 8; ++i) chain.push_back(Itemset{i, i + 1});
  auto got = m.families[0].forest.cliques();
  std::sort(got.begin(), got.end());
  CHECK(got == chain);

  r = run({"query", "--model", path("path.json"), "c d"});
  CHECK(r.code == 0);
  CHECK(r.out.find("r(Q;1) = 0\n") != std::string::npos);

  const auto d = load_transactions(path("path.txt"), DataFormat::kDense);
  r = run({"query", "--model", path("path.json"), "--families", "1", "a c e f h"});
  REQUIRE(r.code == 0);
  const std::regex interval(R"(intersection \(\d+ families\): \[([^,]+), ([^\]]+)\])");
  std::smatch match;
  REQUIRE(std::regex_search(r.out, match, interval));
  const double lo1 = std::stod(match[1]);
  const double hi1 = std::stod(match[2]);
  const double f = frequency(d, S("acefh"));
  CHECK(f >= lo1 - 1e-9);
  CHECK(f <= hi1 + 1e-9);
  r = run({"query", "--model", path("path.json"), "--families", "3", "a c e f h"});
  REQUIRE(std::regex_search(r.out, match, interval));
  CHECK(std::stod(match[1]) >= lo1 - 1e-12);
  CHECK(std::stod(match[2]) <= hi1 + 1e-12);

  r = run({"query", "--model", path("path.json"), "a zz"});
  CHECK(r.code == 4);

  write_file(path("batch.txt"), "a b\n\nc d e\n");
  r = run({"query", "--model", path("path.json"), "--batch", path("batch.txt"), "--dump-lp",
           path("lp.txt")});
  CHECK(r.code == 0);
  CHECK(count(r.out, "query: ") == 2);
  CHECK(read_file(path("lp.txt")).find("max ") != std::string::npos);

  r = run({"export-dot", "--model", path("path.json"), "--out", path("path.dot")});
  CHECK(r.code == 0);
  const std::string dot = read_file(path("path.dot"));
  CHECK(count(dot, " -- ") == 6);
  CHECK(count(dot, "subgraph cluster_") == 1);
}

TEST_CASE("build options and errors") {
  write_file(path("small.txt"), "a b\nb c\na c\na\n");
  Run r = run({"build", "--data", path("small.txt"), "--min-support", "2", "--sequence", "--out",
               path("s.json")});
  CHECK(r.code == 0);
  CHECK(cli::load_model(path("s.json")).families.size() == 1);
  r = run({"build", "--data", path("small.txt"), "--reg", "foo", "--out", path("s.json")});
  CHECK(r.code == 64);
  write_file(path("fam.txt"), "# rows: 4\na : 0.75\nb : 0.5\n");
  r = run({"build", "--data", path("small.txt"), "--family", path("fam.txt"), "--out",
           path("s.json")});
  CHECK(r.code == 3);
  r = run({"build", "--data", path("small.txt"), "--verbose", "--reg", "none", "--out",
           path("s.json")});
  CHECK(r.code == 0);
  CHECK(r.err.find("{\"accepted\":") != std::string::npos);
}

TEST_CASE("model round trip is exact") {
  const auto d = fixtures::RandomData(7, 333, 4);
  const auto seq = search_sequence(mine_candidates(d, 0.0), d, Method::kMdl, 3);
  const cli::Model m = cli::make_model(d, Method::kMdl, 0.0, seq);
  std::stringstream s;
  cli::write_model(s, m);
  const cli::Model back = cli::read_model(s);
  REQUIRE(back.families.size() == m.families.size());
  CHECK(back.dataset_digest == dataset_digest(d));
  for (std::size_t i = 0; i < m.families.size(); ++i) {
    CHECK(back.families[i].forest.cliques() == m.families[i].forest.cliques());
    CHECK(back.families[i].forest.edges() == m.families[i].forest.edges());
    CHECK(back.families[i].family == m.families[i].family);
    CHECK(back.families[i].score.total == m.families[i].score.total);
    CHECK(back.families[i].marginals.size() == m.families[i].marginals.size());
  }
  CHECK(cli::validate_model(back).empty());
}

TEST_CASE("dot export of a chain and of singletons") {
  const auto d = fixtures::RandomData(6, 50, 1);
  std::ostringstream out;
  cli::write_dot(out, fixtures::ChainForest(), d.names());
  const std::string dot = out.str();
  CHECK(count(dot, "[label=\"") == 7);
  CHECK(count(dot, " -- ") == 3);
  CHECK(dot.find("[label=\"b c d\"]") != std::string::npos);
  CHECK(dot.find("[label=\"b c\"]") != std::string::npos);
  CHECK(count(dot, "{") == count(dot, "}"));

  std::ostringstream single;
  cli::write_dot(single, JunctionForest::Singletons(4), d.names());
  CHECK(count(single.str(), " -- ") == 0);
  CHECK(count(single.str(), "subgraph cluster_") == 4);
}

TEST_CASE("check command") {
  Run r = run({"check", "--scope", "query"});
  CHECK(r.code == 0);
  CHECK(r.out == "query: ok\n");

  const auto d = fixtures::RandomData(4, 40, 2);
  const JunctionForest t = search_tree(mine_candidates(d, 0.0), d, Method::kNone);
  cli::Model m = cli::make_model(d, Method::kNone, 0.0,
                                 {{t, closure_family(t.cliques(), mine_candidates(d, 0.0))}});
  // Break running intersection: ab - cd - bd.
  m.families[0].forest = JunctionForest({S("ab"), S("cd"), S("bd")}, {{0, 1}, {1, 2}});
  cli::save_model(path("bad.json"), m);
  r = run({"check", "--scope", "model", "--model", path("bad.json")});
  CHECK(r.code == 1);
  CHECK(r.err.find("running intersection") != std::string::npos);
  r = run({"query", "--model", path("bad.json"), "a b"});
  CHECK(r.code == 1);
}
