#include <algorithm>
#include <catch2/catch_amalgamated.hpp>

#include "cluscov/generator.hpp"
#include "cluscov/oracle.hpp"
#include "helpers.hpp"

using namespace cluscov;
using cluscov::testing::e1_fixture;

TEST_CASE("exhaustive search solves the worked fixture") {
  OracleResult r = brute_force_opt(e1_fixture());
  CHECK(r.opt_value == 4);
  CHECK(r.opt_assignment.assigned(0));
  CHECK_FALSE(r.opt_assignment.assigned(1));
}

TEST_CASE("no sets means optimum zero") {
  Instance inst;
  inst.kind = Kind::MKP;
  inst.knapsacks = {{0, Rational(1), 0}};
  inst.clusters = {{0, Rational(5), {}, false}};
  inst = validate_and_normalize(inst);
  CHECK(brute_force_opt(inst).opt_value == 0);
}

TEST_CASE("when everything fits the optimum covers all items") {
  Instance inst;
  inst.kind = Kind::MCPK;
  inst.items = {{0, Rational(3)}, {1, Rational(5)}, {2, Rational(1)}};
  inst.sets = {{0, Rational(1), {0, 1}}, {1, Rational(1), {1, 2}}};
  inst.knapsacks = {{0, Rational(10), 0}};
  inst.clusters = {{0, Rational(100), {}, false}};
  inst = validate_and_normalize(inst);
  CHECK(brute_force_opt(inst).opt_value == 9);
}

TEST_CASE("size caps are enforced, never approximated") {
  GeneratorParams p;
  p.kind = Kind::MCPK;
  p.num_items = 4;
  p.num_sets = 13;
  p.num_knapsacks = 2;
  p.num_clusters = 1;
  p.seed = 1;
  CHECK_THROWS_AS(brute_force_opt(generate_instance(p)), LimitExceeded);
}

TEST_CASE("optimum is invariant under relabeling") {
  GeneratorParams p;
  p.kind = Kind::MCPC;
  p.num_items = 4;
  p.num_sets = 4;
  p.num_knapsacks = 4;
  p.num_clusters = 2;
  std::mt19937_64 rng(3);
  for (std::uint64_t s = 0; s < 25; ++s) {
    p.seed = s;
    Instance inst = generate_instance(p);
    Rational base = brute_force_opt(inst).opt_value;

    // Permute set ids (and item ids through the sets' member lists).
    std::vector<int> perm(inst.num_sets());
    for (int j = 0; j < inst.num_sets(); ++j) perm[j] = j;
    std::shuffle(perm.begin(), perm.end(), rng);
    Instance shuffled = inst;
    for (int j = 0; j < inst.num_sets(); ++j) {
      shuffled.sets[perm[j]] = inst.sets[j];
      shuffled.sets[perm[j]].id = perm[j];
    }
    shuffled.normalized = false;
    CHECK(brute_force_opt(validate_and_normalize(shuffled)).opt_value ==
          base);

    // Reverse knapsack ids.
    Instance flipped = inst;
    int p_count = inst.num_knapsacks();
    for (int k = 0; k < p_count; ++k) {
      flipped.knapsacks[p_count - 1 - k] = inst.knapsacks[k];
      flipped.knapsacks[p_count - 1 - k].id = p_count - 1 - k;
    }
    flipped.normalized = false;
    CHECK(brute_force_opt(validate_and_normalize(flipped)).opt_value == base);
  }
}

TEST_CASE("joint relaxation equals the reduced relaxation on the fixture") {
  CrossCheckReport r = lp_cross_check(e1_fixture());
  CHECK(r.ok());
  CHECK(r.joint_value == 5);
  CHECK(r.lpz_value == 5);
  REQUIRE(r.greedy_value);
  CHECK(*r.greedy_value == 5);
}

TEST_CASE("relaxation cross-checks agree on random instances") {
  GeneratorParams p;
  p.num_knapsacks = 4;
  p.num_clusters = 2;
  for (std::uint64_t s = 0; s < 60; ++s) {
    p.kind = (s % 2 == 0) ? Kind::MCPC : Kind::MKPC;
    p.seed = s;
    CrossCheckReport r = lp_cross_check(generate_instance(p));
    INFO((r.diffs.empty() ? std::string("ok") : r.diffs.front()));
    CHECK(r.ok());
  }
}

TEST_CASE("fixing a rounded cluster equals reducing the instance") {
  GeneratorParams p;
  p.kind = Kind::MKPC;
  p.num_items = 5;
  p.num_sets = 5;
  p.num_knapsacks = 4;
  p.num_clusters = 2;
  p.disentangled = true;
  int checked = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    p.seed = s;
    Instance inst = generate_instance(p);
    auto [direct, via_reduction] = check_iteration_reduction(inst);
    CHECK(direct == via_reduction);
    ++checked;
  }
  CHECK(checked == 40);
}
