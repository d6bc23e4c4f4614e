#include <cmath>
#include <stdexcept>

#include "decomine/forest_graph.hpp"
#include "decomine/jtree.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace decomine;
using fixtures::S;

TEST_CASE("running intersection") {
  CHECK(check_running_intersection(JunctionForest({S("ab"), S("bc")}, {{0, 1}})));
  std::string diag;
  const JunctionForest broken({S("ab"), S("cd"), S("bd")}, {{0, 1}, {1, 2}});
  CHECK_FALSE(check_running_intersection(broken, &diag));
  CHECK(diag.find("attribute 1") != std::string::npos);
  CHECK(check_running_intersection(fixtures::ChainForest()));
  CHECK(check_running_intersection(fixtures::BranchingForest()));
  const JunctionForest cycle({S("ab"), S("bc"), S("ac")}, {{0, 1}, {1, 2}, {2, 0}});
  CHECK_FALSE(check_running_intersection(cycle, &diag));
  CHECK(diag.find("cycle") != std::string::npos);
  // Disconnected holders of the same attribute.
  CHECK_FALSE(check_running_intersection(JunctionForest({S("ab"), S("bc")}, {})));
}

TEST_CASE("constructor rejects malformed forests") {
  CHECK_THROWS_AS(JunctionForest({S("ab"), S("ab")}, {}), std::invalid_argument);
  CHECK_THROWS_AS(JunctionForest({Itemset{}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(JunctionForest({S("ab")}, {{0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(JunctionForest({S("ab"), S("bc")}, {{0, 1}, {1, 0}}), std::invalid_argument);
}

TEST_CASE("n-1 connectivity") {
  const JunctionForest chain({S("ab"), S("bc"), S("cd")}, {{0, 1}, {1, 2}});
  CHECK(is_n1_connected(chain, S("ab"), S("cd"), 2));
  const JunctionForest pair({S("abc"), S("bcd")}, {{0, 1}});
  CHECK_FALSE(is_n1_connected(pair, S("abc"), S("bcd"), 2));
  CHECK(is_n1_connected(pair, S("abc"), S("bcd"), 3));
  const JunctionForest apart({S("a"), S("b")}, {});
  CHECK(is_n1_connected(apart, S("a"), S("b"), 1));
  CHECK_FALSE(is_n1_connected(chain, S("ab"), S("cd"), 1));
  CHECK_THROWS_AS(is_n1_connected(chain, S("ab"), S("ad"), 2), std::invalid_argument);
}

TEST_CASE("canonical form and equality") {
  const JunctionForest a({S("bc"), S("ab")}, {{1, 0}});
  const JunctionForest b({S("ab"), S("bc")}, {{0, 1}});
  CHECK(a == b);
  CHECK(a.canonical().cliques().front() == S("ab"));
  CHECK(fixtures::BranchingForest().num_components() == 1);
  CHECK(JunctionForest::Singletons(4).num_components() == 4);
}

TEST_CASE("tree entropy of a single full clique is the joint entropy") {
  const auto d = fixtures::RandomData(5, 80, 2);
  const JunctionForest full({Itemset::FirstN(5)}, {});
  CHECK(tree_entropy(full, d) == doctest::Approx(entropy(d, Itemset::FirstN(5))).epsilon(1e-14));
}

TEST_CASE("tree entropy equals the entropy of the product-form distribution") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto d = fixtures::RandomData(6, 200, seed);
    const JunctionForest t = fixtures::ChainForest();
    const DecomposableDistribution p(t, d);
    double sum = 0.0;
    double h = 0.0;
    for (std::uint64_t v = 0; v < 64; ++v) {
      const double x = p.probability(Itemset::FromWord(v));
      sum += x;
      if (x > 0.0) h -= x * std::log(x);
    }
    CHECK(std::fabs(sum - 1.0) < 1e-12);
    CHECK(std::fabs(h - tree_entropy(t, d)) < 1e-10);

    double ll = 0.0;
    for (const Itemset& r : d.rows()) ll += std::log(p.probability(r));
    CHECK(std::fabs(ll - tree_log_likelihood(t, d)) < 1e-6);
  }
}

TEST_CASE("purging redundant cliques") {
  const JunctionForest chain({S("a"), S("ab")}, {{0, 1}});
  const JunctionForest purged = purge_redundant(chain);
  CHECK(purged.cliques() == std::vector<Itemset>{S("ab")});
  CHECK(purged.edges().empty());

  // b sits between ab and bc; removing it reattaches its neighbors.
  const JunctionForest star({S("ab"), S("b"), S("bc"), S("bd")}, {{0, 1}, {1, 2}, {1, 3}});
  const JunctionForest s = purge_redundant(star);
  CHECK(s.size() == 3);
  CHECK(s.edges().size() == 2);
  CHECK(check_running_intersection(s));

  const auto d = fixtures::RandomData(4, 100, 5);
  CHECK(tree_entropy(s, d) == doctest::Approx(tree_entropy(star, d)).epsilon(1e-12));
}

TEST_CASE("forest graph paths and tombstones") {
  ForestGraph g(fixtures::BranchingForest());
  const auto p = g.path(0, 5);
  REQUIRE(p.has_value());
  CHECK(*p == std::vector<std::size_t>{0, 1, 3, 4, 5});
  g.remove_node(3);
  CHECK_FALSE(g.path(0, 5).has_value());
  CHECK(g.num_alive() == 5);
  CHECK(g.find(S("fg")) == 4u);
}

TEST_CASE("mdl cost") {
  CHECK(mdl_cost(2.0, 100) == doctest::Approx(1.7302201500693456).epsilon(1e-13));
  CHECK(mdl_cost(1.0, 100) == doctest::Approx(-1.1447298858494002).epsilon(1e-13));
  CHECK(mdl_cost(4.0, 1) == doctest::Approx(-0.5723649429247001).epsilon(1e-13));
}

TEST_CASE("scores") {
  const auto d = fixtures::RandomData(6, 100, 8);
  const JunctionForest t = fixtures::ChainForest();
  // cliques 3 + 7 + 7 + 3, separators b, bc, c: 1 + 3 + 1
  CHECK(parameter_count(t) == 15.0);
  const double h = tree_entropy(t, d);
  const ModelScore none = score(t, d, Method::kNone);
  CHECK(none.penalty == 0.0);
  CHECK(none.total == doctest::Approx(100.0 * h));
  CHECK(score(t, d, Method::kAic).penalty == 15.0);
  CHECK(score(t, d, Method::kBic).penalty == doctest::Approx(0.5 * std::log(100.0) * 15.0));

  const JunctionForest single({S("a")}, {});
  const auto one = fixtures::Dense({"1", "0"}).replicated(50);
  CHECK(score(single, one, Method::kMdl).penalty ==
        doctest::Approx(1.7302201500693456).epsilon(1e-13));
  CHECK(parse_method("mdl") == Method::kMdl);
  CHECK_FALSE(parse_method("xyz").has_value());
  CHECK(method_name(Method::kBic) == "bic");
}
