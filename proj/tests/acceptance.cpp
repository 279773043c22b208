// Acceptance harness: one PASS/FAIL line per criterion, exit 0 only if all
// pass. Every bound is checked in exact rational arithmetic against the
// exhaustive-search optimum; approximation factors involving 1 - 1/e are
// replaced by strictly smaller rationals (3160/10000 < (1-1/e)/2,
// 2107/10000 < (1-1/e)/3, 6321/10000 < 1-1/e) and by the sandwich
// 271828/100000 < e < 271829/100000.

#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "cluscov/cluscov.hpp"
#include "helpers.hpp"

using namespace cluscov;
using cluscov::testing::e1_fixture;
using cluscov::testing::full_capacities;
using cluscov::testing::sample_fractional;

namespace {

int failures = 0;

void report(int idx, const std::string& name, bool ok,
            const std::string& detail = "") {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << idx << ": " << name;
  if (!detail.empty()) std::cout << " [" << detail << "]";
  std::cout << "\n";
  if (!ok) ++failures;
}

GeneratorParams sweep_params(Kind kind, std::uint64_t seed, bool disentangled) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 1);
  auto pick = [&rng](int lo, int hi) {
    return static_cast<int>(std::uniform_int_distribution<int>(lo, hi)(rng));
  };
  GeneratorParams p;
  p.kind = kind;
  p.seed = seed;
  bool clustered = (kind == Kind::MCPC || kind == Kind::MKPC);
  p.num_clusters = clustered ? pick(1, 2) : 1;
  p.num_knapsacks = pick(clustered ? 2 * p.num_clusters : 1, 4);
  p.num_items = pick(1, 6);
  p.num_sets = pick(1, 6);
  p.disentangled = disentangled;
  return p;
}

struct SweepOutcome {
  bool ok = true;
  Rational min_ratio = 1;
  std::string detail;
};

SweepOutcome sweep(Kind kind, bool disentangled, const Rational& guarantee,
                   int trials,
                   const std::function<Rational(const Instance&)>& alg,
                   const std::function<void(const Instance&)>& extra = {}) {
  SweepOutcome out;
  for (int t = 0; t < trials; ++t) {
    Instance inst = generate_instance(
        sweep_params(kind, static_cast<std::uint64_t>(t), disentangled));
    Rational value = alg(inst);
    Rational opt = brute_force_opt(inst).opt_value;
    if (opt > 0) {
      Rational ratio = value / opt;
      if (ratio < out.min_ratio) out.min_ratio = ratio;
      if (ratio < guarantee || value > opt) {
        out.ok = false;
        out.detail = "trial " + std::to_string(t) + " ratio " +
                     rational_to_string(ratio);
        return out;
      }
    }
    if (extra) extra(inst);
  }
  out.detail = "min ratio " + rational_to_string(out.min_ratio);
  return out;
}

void criterion_1_and_3_and_5() {
  // MCPK sweep doubles as the pipage-structure audit (criterion 3).
  bool structure_ok = true;
  std::string structure_detail;
  auto audit = [&](const Instance& inst, const PipageRun& run) {
    if (!structure_ok) return;
    auto fail = [&](const std::string& why) {
      structure_ok = false;
      structure_detail = why;
    };
    if (!detail::find_cycle(build_support_graph(run.x_acyclic)).empty())
      return fail("cycle survived elimination");
    if (evaluate_L(inst, run.x_acyclic) != evaluate_L(inst, run.x_lp))
      return fail("cycle elimination changed L");
    for (int k = 0; k < inst.num_knapsacks(); ++k) {
      if (run.x_acyclic.knapsack_load(inst, k) !=
          run.x_lp.knapsack_load(inst, k))
        return fail("cycle elimination changed a knapsack load");
    }
    if (evaluate_F(inst, run.x_acyclic) < evaluate_F(inst, run.x_lp))
      return fail("F decreased during cycle elimination");
    if (evaluate_F(inst, run.x_final) < evaluate_F(inst, run.x_acyclic))
      return fail("F decreased during path elimination");
    try {
      SupportGraph g = build_support_graph(run.x_final);
      Matching m = saturating_matching(g);
      std::set<int> matched;
      for (const auto& [j, k] : m.pairs)
        if (!matched.insert(j).second) return fail("matching reuses a set");
      for (const auto& [j, adj] : g.s_adj)
        if (!adj.empty() && !matched.count(j))
          return fail("fractional set left unsaturated");
    } catch (const InvariantViolation& e) {
      return fail(e.what());
    }
  };

  SweepOutcome mcpk = sweep(
      Kind::MCPK, false, Rational(3160, 10000), 500,
      [&](const Instance& inst) {
        McpkResult r = solve_mcpk_alg1(inst);
        if (!check_feasible(inst, r.assignment).feasible())
          throw InvariantViolation("infeasible MCPK output");
        audit(inst, r.run);
        return r.value;
      });
  report(1, "pipage solver >= 3160/10000 * OPT on 500 MCPK instances",
         mcpk.ok, mcpk.detail);

  SweepOutcome mcpc = sweep(Kind::MCPC, false, Rational(2107, 10000), 500,
                            [](const Instance& inst) {
                              McpcResult r = solve_mcpc_alg2(inst);
                              if (!check_feasible(inst, r.assignment)
                                       .feasible())
                                throw InvariantViolation(
                                    "infeasible MCPC output");
                              return r.value;
                            });
  report(1, "cluster solver >= 2107/10000 * OPT on 500 MCPC instances",
         mcpc.ok, mcpc.detail);

  SweepOutcome third = sweep(Kind::MKPC, false, Rational(1, 3), 500,
                             [](const Instance& inst) {
                               return solve_mkpc_third(inst).value;
                             });
  report(1, "greedy decomposition >= 1/3 * OPT on 500 MKPC instances",
         third.ok, third.detail);

  // Criterion 5 rides on the iterative sweep: the rounding inequalities are
  // hard runtime assertions inside the solver, and the certificate exposes
  // the per-iteration and final inequalities for re-checking here.
  bool rounding_ok = true;
  std::string rounding_detail;
  SweepOutcome iter = sweep(
      Kind::MKPC, true, Rational(1, 2), 500, [&](const Instance& inst) {
        MkpcIterativeResult r = solve_mkpc_iterative(inst);
        if (!check_feasible(inst, r.assignment).feasible())
          throw InvariantViolation("infeasible iterative output");
        for (const auto& it : r.iterations)
          if (2 * it.rounded_profit < it.fractional_profit) {
            rounding_ok = false;
            rounding_detail = "cluster " + std::to_string(it.cluster);
          }
        if (2 * r.value < r.lp_value) {
          rounding_ok = false;
          rounding_detail = "final value below half the LP optimum";
        }
        return r.value;
      });
  report(1,
         "iterative rounding >= 1/2 * OPT on 500 disentangled MKPC instances",
         iter.ok, iter.detail);

  report(3, "pipage structure intact on every MCPK run", structure_ok,
         structure_detail);
  report(5, "per-cluster and cumulative rounding inequalities on every "
            "iterative run",
         rounding_ok, rounding_detail);
}

void criterion_2() {
  const Rational floor_bound(6321, 10000);
  const Rational e_lo(271828, 100000);  // 271828/100000 < e < 271829/100000
  bool ok = true;
  std::string detail_msg;
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 1000 && ok; ++t) {
    Kind kind = (t % 2 == 0) ? Kind::MCPC : Kind::MCPK;
    Instance inst = generate_instance(
        sweep_params(kind, static_cast<std::uint64_t>(t), false));
    FractionalSolution f =
        sample_fractional(inst, full_capacities(inst), rng);
    Rational l = evaluate_L(inst, f);
    Rational fv = evaluate_F(inst, f);
    if (fv < floor_bound * l || fv * e_lo < (e_lo - 1) * l) {
      ok = false;
      detail_msg = "sample " + std::to_string(t);
    }
  }
  report(2, "F >= (1 - 1/e) L on 1000 random fractional solutions", ok,
         detail_msg);
}

void criterion_4() {
  bool joint_ok = true;
  std::string joint_detail;
  for (int t = 0; t < 100 && joint_ok; ++t) {
    Kind kind = (t % 2 == 0) ? Kind::MCPC : Kind::MKPC;
    Instance inst = generate_instance(
        sweep_params(kind, static_cast<std::uint64_t>(t) + 10000, false));
    CrossCheckReport r = lp_cross_check(inst);
    if (!r.ok()) {
      joint_ok = false;
      joint_detail = r.diffs.front();
    }
  }
  report(4, "joint (x,z) optimum equals reduced optimum on 100 instances",
         joint_ok, joint_detail);

  bool greedy_ok = true;
  std::string greedy_detail;
  for (int t = 0; t < 500 && greedy_ok; ++t) {
    Instance inst = generate_instance(
        sweep_params(Kind::MKPC, static_cast<std::uint64_t>(t) + 20000,
                     false));
    try {
      // verify_invariants re-solves by simplex and rebuilds the saturating
      // matching; split-host uniqueness is asserted inside.
      greedy_lp(inst, /*verify_invariants=*/true);
    } catch (const std::exception& e) {
      greedy_ok = false;
      greedy_detail = std::string(e.what()) + " at trial " +
                      std::to_string(t);
    }
  }
  report(4,
         "greedy equals simplex with bounded splits on 500 MKPC instances",
         greedy_ok, greedy_detail);
}

void criterion_6() {
  Instance inst = e1_fixture();
  GreedyAnnotation g = greedy_lp(inst);
  McpcResult alg2 = solve_mcpc_alg2(inst);
  OracleResult opt = brute_force_opt(inst);
  bool ok = g.objective == 5 && alg2.value == 4 && opt.opt_value == 4 &&
            alg2.cert.chosen == "x3" && alg2.cert.x3_value == 4 &&
            alg2.assignment[0] == 1 && !alg2.assignment.assigned(1);
  report(6, "worked two-knapsack fixture reproduced bit-exactly", ok,
         "greedy " + rational_to_string(g.objective) + ", alg " +
             rational_to_string(alg2.value) + ", opt " +
             rational_to_string(opt.opt_value));
}

void criterion_7() {
  bool ok = true;
  std::string detail_msg;
  for (int t = 0; t < 100 && ok; ++t) {
    Kind kind = (t % 2 == 0) ? Kind::MCPC : Kind::MKPC;
    GeneratorParams p =
        sweep_params(kind, static_cast<std::uint64_t>(t) + 30000, false);
    Instance inst = generate_instance(p);
    std::string text = serialize_instance(inst);
    if (serialize_instance(validate_and_normalize(parse_instance(text))) !=
        text) {
      ok = false;
      detail_msg = "round-trip mismatch at trial " + std::to_string(t);
      break;
    }
    Instance again = generate_instance(p);
    std::string solved_a =
        assignment_to_json(inst, solve_mcpc_alg2(inst).assignment).dump();
    std::string solved_b =
        assignment_to_json(again, solve_mcpc_alg2(again).assignment).dump();
    if (serialize_instance(again) != text || solved_a != solved_b) {
      ok = false;
      detail_msg = "determinism mismatch at trial " + std::to_string(t);
    }
  }
  report(7, "JSON round-trip and seeded determinism on 100 instances", ok,
         detail_msg);
}

}  // namespace

int main() {
  try {
    criterion_1_and_3_and_5();
    criterion_2();
    criterion_4();
    criterion_6();
    criterion_7();
  } catch (const std::exception& e) {
    std::cout << "FAIL unexpected exception: " << e.what() << "\n";
    return 1;
  }
  std::cout << (failures == 0 ? "ALL CRITERIA PASSED"
                              : std::to_string(failures) + " FAILURES")
            << "\n";
  return failures == 0 ? 0 : 1;
}
