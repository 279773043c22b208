#include <catch2/catch_amalgamated.hpp>

#include "cluscov/generator.hpp"
#include "cluscov/json_io.hpp"
#include "cluscov/mkpc.hpp"
#include "cluscov/oracle.hpp"
#include "helpers.hpp"

using namespace cluscov;
using cluscov::testing::e1_fixture;

namespace {

// Two clusters whose greedy solutions entangle: items split across both
// clusters in both directions, so no cluster is isolated.
const char* kNoIsolationDoc = R"({
  "kind": "mkpc",
  "items": [
    {"id": 0, "profit": "6"}, {"id": 1, "profit": "8"},
    {"id": 2, "profit": "2"}, {"id": 3, "profit": "3"}],
  "sets": [
    {"id": 0, "cost": "10", "items": [0]},
    {"id": 1, "cost": "8", "items": [1]},
    {"id": 2, "cost": "9", "items": [2]},
    {"id": 3, "cost": "10", "items": [3]}],
  "knapsacks": [
    {"id": 0, "capacity": "15", "cluster": 0},
    {"id": 1, "capacity": "12", "cluster": 0},
    {"id": 2, "capacity": "18", "cluster": 1},
    {"id": 3, "capacity": "14", "cluster": 1}],
  "clusters": [
    {"id": 0, "capacity": "26"}, {"id": 1, "capacity": "31"}]
})";

Instance no_isolation_fixture() {
  return validate_and_normalize(parse_instance(kNoIsolationDoc));
}

}  // namespace

TEST_CASE("greedy reproduces the hand-traced fixture solution") {
  Instance inst = e1_fixture();
  GreedyAnnotation g = greedy_lp(inst);
  // Ratios 2 > 1, so set 0 first: half into knapsack 1 (capacity tie broken
  // toward the larger id, effective budget 1), the rest into knapsack 0;
  // then set 1 takes knapsack 0's remaining budget.
  CHECK(g.x.x_at(0, 1) == Rational(1, 2));
  CHECK(g.x.x_at(0, 0) == Rational(1, 2));
  CHECK(g.x.x_at(1, 0) == Rational(1, 2));
  CHECK(g.x.x_at(1, 1) == 0);
  CHECK(g.objective == 5);
  CHECK(g.split_items == std::set<int>{0, 1});
  CHECK(g.unsplit_items.empty());
  CHECK(g.split_of.at(1) == 0);
  CHECK(g.split_of.at(0) == 1);
  CHECK(g.residual[0] == 0);
  CHECK(g.residual[1] == 0);
}

TEST_CASE("greedy splits the last item at the fractional knapsack bound") {
  Instance inst;
  inst.kind = Kind::MKP;
  inst.items = {{0, Rational(9)}, {1, Rational(3)}};
  inst.sets = {{0, Rational(3), {0}}, {1, Rational(3), {1}}};
  inst.knapsacks = {{0, Rational(5), 0}};
  inst.clusters = {{0, Rational(100), {}, false}};
  inst = validate_and_normalize(inst);
  GreedyAnnotation g = greedy_lp(inst);
  CHECK(g.x.x_at(0, 0) == 1);
  CHECK(g.x.x_at(1, 0) == Rational(2, 3));
  CHECK(g.objective == 11);
  CHECK(g.unsplit_items == std::set<int>{0});
  CHECK(g.split_items == std::set<int>{1});
}

TEST_CASE("greedy leaves everything unsplit when all items fit") {
  Instance inst;
  inst.kind = Kind::MKPC;
  inst.items = {{0, Rational(5)}, {1, Rational(1)}};
  inst.sets = {{0, Rational(1), {0}}, {1, Rational(1), {1}}};
  inst.knapsacks = {{0, Rational(3), 0}, {1, Rational(3), 0}};
  inst.clusters = {{0, Rational(4), {}, false}};
  inst = validate_and_normalize(inst);
  GreedyAnnotation g = greedy_lp(inst);
  CHECK(g.split_items.empty());
  CHECK(g.objective == 6);
  for (const auto& [key, v] : g.x.x) CHECK((v == 0 || v == 1));
}

TEST_CASE("greedy rejects coverage instances") {
  Instance inst = e1_fixture();
  inst.sets[1].items = {0, 1};
  inst = validate_and_normalize(inst);
  REQUIRE(inst.kind == Kind::MCPC);
  CHECK_THROWS_AS(greedy_lp(inst), ValidationError);
}

TEST_CASE("no-pipage decomposition solves the worked fixture") {
  Instance inst = e1_fixture();
  MkpcThirdResult r = solve_mkpc_third(inst);
  CHECK(r.cert.lp_value == 5);
  CHECK(r.cert.x3_value == 4);
  CHECK(r.cert.chosen == "x3");
  CHECK(r.value == 4);
  CHECK(r.assignment[0] == 1);
}

TEST_CASE("no-pipage decomposition meets one third of the optimum") {
  GeneratorParams p;
  p.kind = Kind::MKPC;
  p.num_items = 5;
  p.num_sets = 5;
  p.num_knapsacks = 4;
  p.num_clusters = 2;
  for (std::uint64_t s = 0; s < 200; ++s) {
    p.seed = s;
    Instance inst = generate_instance(p);
    MkpcThirdResult r = solve_mkpc_third(inst);
    REQUIRE(check_feasible(inst, r.assignment).feasible());
    Rational opt = brute_force_opt(inst).opt_value;
    CHECK(3 * r.value >= opt);
    CHECK(r.value <= opt);
  }
}

TEST_CASE("isolated cluster detection") {
  Instance single = e1_fixture();
  GreedyAnnotation g = greedy_lp(single);
  CHECK(find_isolated_cluster(single, g, {0}) == 0);

  GeneratorParams p;
  p.kind = Kind::MKPC;
  p.num_items = 5;
  p.num_sets = 5;
  p.num_knapsacks = 4;
  p.num_clusters = 2;
  p.disentangled = true;
  for (std::uint64_t s = 0; s < 50; ++s) {
    p.seed = s;
    Instance inst = generate_instance(p);
    GreedyAnnotation gg = greedy_lp(inst);
    std::set<int> candidates;
    for (const auto& c : inst.clusters) candidates.insert(c.id);
    CHECK_NOTHROW(find_isolated_cluster(inst, gg, candidates));
  }

  Instance adversarial = no_isolation_fixture();
  GreedyAnnotation ga = greedy_lp(adversarial);
  CHECK_THROWS_AS(find_isolated_cluster(adversarial, ga, {0, 1}),
                  NoIsolatedCluster);
}

TEST_CASE("cluster rounding dominates half the fractional profit") {
  Instance inst = e1_fixture();
  GreedyAnnotation g = greedy_lp(inst);
  RoundedCluster r = round_cluster(inst, g, 0);
  // Both items together cost 4 > U = 3; the best placement takes only the
  // profit-4 item.
  CHECK(r.profit == 4);
  CHECK(r.fractional_profit == 5);
  CHECK(r.assignment.assigned(0));
  CHECK_FALSE(r.assignment.assigned(1));
  CHECK(2 * r.profit >= r.fractional_profit);

  // Unsplit-only cluster: rounding recovers the full fractional profit.
  Instance easy;
  easy.kind = Kind::MKPC;
  easy.items = {{0, Rational(5)}, {1, Rational(1)}};
  easy.sets = {{0, Rational(1), {0}}, {1, Rational(1), {1}}};
  easy.knapsacks = {{0, Rational(3), 0}, {1, Rational(3), 0}};
  easy.clusters = {{0, Rational(4), {}, false}};
  easy = validate_and_normalize(easy);
  GreedyAnnotation ge = greedy_lp(easy);
  RoundedCluster re = round_cluster(easy, ge, 0);
  CHECK(re.profit == re.fractional_profit);

  RoundingConfig tiny;
  tiny.max_pool = 1;
  CHECK_THROWS_AS(round_cluster(inst, g, 0, tiny), LimitExceeded);
}

TEST_CASE("disentanglement detection") {
  Instance ok;
  ok.kind = Kind::MKPC;
  ok.items = {{0, Rational(1)}};
  ok.sets = {{0, Rational(1), {0}}};
  ok.knapsacks = {{0, Rational(4), 0}, {1, Rational(3), 0},
                  {2, Rational(2), 1}, {3, Rational(2), 1}};
  ok.clusters = {{0, Rational(6), {}, false}, {1, Rational(3), {}, false}};
  ok = validate_and_normalize(ok);
  auto order = detect_disentangled(ok);
  REQUIRE(order);
  CHECK(*order == std::vector<int>{0, 1});

  Instance bad = ok;
  bad.knapsacks[1].capacity = 2;
  bad.knapsacks[2].capacity = 3;
  bad = validate_and_normalize(bad);
  CHECK_FALSE(detect_disentangled(bad));

  CHECK(detect_disentangled(e1_fixture()));
}

TEST_CASE("iterative rounding solves the worked fixture in one pass") {
  Instance inst = e1_fixture();
  MkpcIterativeResult r = solve_mkpc_iterative(inst);
  CHECK(r.lp_value == 5);
  CHECK(r.value == 4);
  REQUIRE(r.iterations.size() == 1);
  CHECK(r.iterations[0].cluster == 0);
  CHECK(r.iterations[0].fractional_profit == 5);
  CHECK(r.iterations[0].rounded_profit == 4);
}

TEST_CASE("iterative rounding raises with the failing iteration index") {
  try {
    solve_mkpc_iterative(no_isolation_fixture());
    FAIL("expected NoIsolatedCluster");
  } catch (const NoIsolatedCluster& e) {
    CHECK(e.iteration == 1);
  }
}

TEST_CASE("iterative rounding keeps half the LP value on disentangled runs") {
  GeneratorParams p;
  p.kind = Kind::MKPC;
  p.num_items = 5;
  p.num_sets = 5;
  p.num_knapsacks = 4;
  p.num_clusters = 2;
  p.disentangled = true;
  for (std::uint64_t s = 0; s < 100; ++s) {
    p.seed = s;
    Instance inst = generate_instance(p);
    MkpcIterativeResult r = solve_mkpc_iterative(inst);
    REQUIRE(check_feasible(inst, r.assignment).feasible());
    CHECK(2 * r.value >= r.lp_value);
    Rational opt = brute_force_opt(inst).opt_value;
    CHECK(2 * r.value >= opt);
    CHECK(r.value <= opt);
  }
}
