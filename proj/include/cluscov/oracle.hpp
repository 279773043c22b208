#pragma once

#include <chrono>
#include <functional>
#include <vector>

#include "cluscov/lp.hpp"
#include "cluscov/mkpc.hpp"

namespace cluscov {

struct OracleLimits {
  int max_sets = 12;
  int max_knapsacks = 5;
  long long max_nodes = 200000000;
};

struct OracleResult {
  Rational opt_value;
  Assignment opt_assignment{0};
  long long nodes_explored = 0;
  std::chrono::duration<double> time{};
};

/// Exhaustive depth-first search over all assignments, pruning on capacity
/// and on the profit still reachable. Exact by construction; refuses
/// instances beyond the caps rather than approximating.
inline OracleResult brute_force_opt(const Instance& inst,
                                    const OracleLimits& limits = {}) {
  if (!inst.normalized)
    throw ValidationError("instance must be normalized first");
  if (inst.num_sets() > limits.max_sets ||
      inst.num_knapsacks() > limits.max_knapsacks)
    throw LimitExceeded("instance exceeds oracle size caps");
  auto start = std::chrono::steady_clock::now();

  // Sets by non-increasing member-profit bound for stronger pruning.
  std::vector<int> order(inst.sets.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
  auto set_bound = [&](int j) {
    Rational b = 0;
    for (int i : inst.sets[j].items) b += inst.items[i].profit;
    return b;
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    Rational ba = set_bound(a), bb = set_bound(b);
    if (ba != bb) return ba > bb;
    return a < b;
  });

  // Upper bound on what sets order[t..] can still cover: distinct items.
  std::vector<Rational> suffix(order.size() + 1, Rational(0));
  {
    std::vector<bool> seen(inst.items.size(), false);
    for (int t = static_cast<int>(order.size()) - 1; t >= 0; --t) {
      suffix[t] = suffix[t + 1];
      for (int i : inst.sets[order[t]].items)
        if (!seen[i]) {
          seen[i] = true;
          suffix[t] += inst.items[i].profit;
        }
    }
  }

  OracleResult out;
  out.opt_assignment = Assignment(inst.num_sets());
  out.opt_value = 0;
  Assignment current(inst.num_sets());
  std::vector<Rational> load(inst.knapsacks.size(), Rational(0));
  std::vector<Rational> cluster_load(inst.clusters.size(), Rational(0));
  std::vector<int> cover_count(inst.items.size(), 0);
  Rational value = 0;

  std::function<void(std::size_t)> dfs = [&](std::size_t idx) {
    if (++out.nodes_explored > limits.max_nodes)
      throw LimitExceeded("oracle node limit exceeded");
    if (idx == order.size()) {
      if (value > out.opt_value) {
        out.opt_value = value;
        out.opt_assignment = current;
      }
      return;
    }
    if (value + suffix[idx] <= out.opt_value) return;
    int j = order[idx];
    const Rational& cost = inst.sets[j].cost;
    for (int k = 0; k < inst.num_knapsacks(); ++k) {
      const Cluster& cl = inst.clusters[inst.knapsacks[k].cluster];
      if (load[k] + cost > inst.knapsacks[k].capacity) continue;
      if (!cl.redundant && cluster_load[cl.id] + cost > cl.capacity) continue;
      current.assign(j, k);
      load[k] += cost;
      cluster_load[cl.id] += cost;
      Rational gained = 0;
      for (int i : inst.sets[j].items)
        if (cover_count[i]++ == 0) gained += inst.items[i].profit;
      value += gained;
      dfs(idx + 1);
      value -= gained;
      for (int i : inst.sets[j].items) --cover_count[i];
      cluster_load[cl.id] -= cost;
      load[k] -= cost;
      current.assign(j, kUnassigned);
    }
    dfs(idx + 1);
  };
  dfs(0);

  out.time = std::chrono::steady_clock::now() - start;
  FeasibilityReport feas = check_feasible(inst, out.opt_assignment);
  if (!feas.feasible() ||
      out.opt_value != evaluate_assignment(inst, out.opt_assignment))
    throw InvariantViolation("oracle produced an inconsistent optimum");
  return out;
}

struct CrossCheckReport {
  Rational joint_value, lpz_value;
  std::optional<Rational> greedy_value, simplex_value;  // MKPC/MKP only
  std::vector<std::string> diffs;
  bool ok() const { return diffs.empty(); }
};

/// Verifies that the closed-form z* loses nothing: the joint (x, z)
/// relaxation optimum equals the LP(z*) optimum. On MKPC instances it also
/// re-derives the greedy-equals-simplex equality without relying on the
/// greedy solver's own internal check.
inline CrossCheckReport lp_cross_check(const Instance& inst) {
  if (!inst.normalized)
    throw ValidationError("instance must be normalized first");
  CrossCheckReport report;

  LpSolution joint = solve_lp(build_joint_lp(inst).lp);
  if (joint.status != LpStatus::Optimal)
    throw InvariantViolation("joint relaxation must have an optimum");
  report.joint_value = joint.objective_value;

  std::vector<ClusterAnalysis> analyses = compute_z_star(inst);
  LpSolution lpz =
      solve_lp(build_mcpk_lp(inst, effective_capacities(inst, analyses)).lp);
  if (lpz.status != LpStatus::Optimal)
    throw InvariantViolation("LP(z*) must have an optimum");
  report.lpz_value = lpz.objective_value;
  if (report.joint_value != report.lpz_value)
    report.diffs.push_back(
        "joint relaxation optimum " + rational_to_string(report.joint_value) +
        " != LP(z*) optimum " + rational_to_string(report.lpz_value));

  if (inst.kind == Kind::MKPC || inst.kind == Kind::MKP) {
    GreedyAnnotation g = greedy_lp(inst, /*verify_invariants=*/false);
    report.greedy_value = g.objective;
    report.simplex_value = lpz.objective_value;
    if (g.objective != lpz.objective_value)
      report.diffs.push_back("greedy objective " +
                             rational_to_string(g.objective) +
                             " != simplex objective " +
                             rational_to_string(lpz.objective_value));
  }
  return report;
}

/// One iteration of the iterative rounding scheme, checked both ways: the
/// joint LP with the rounded cluster's variables pinned must match the
/// fixed profit plus the reduced instance's greedy optimum exactly.
/// Returns the two values (direct, via-reduction).
inline std::pair<Rational, Rational> check_iteration_reduction(
    const Instance& inst) {
  detail::require_mkpc(inst);
  GreedyAnnotation g = greedy_lp(inst);
  std::set<int> candidates;
  for (const auto& c : inst.clusters) candidates.insert(c.id);
  int iota = find_isolated_cluster(inst, g, candidates);
  RoundedCluster rounded = round_cluster(inst, g, iota);

  std::set<int> fixed_sets;
  for (int j = 0; j < inst.num_sets(); ++j)
    if (rounded.assignment.assigned(j)) fixed_sets.insert(j);

  // Direct route: pin x_jk over the rounded cluster's knapsacks.
  JointLp joint = build_joint_lp(inst);
  for (int k : inst.clusters[iota].knapsacks) {
    for (int j = 0; j < inst.num_sets(); ++j) {
      auto it = joint.x_index.find({j, k});
      if (it == joint.x_index.end()) continue;
      if (rounded.assignment.assigned(j) && rounded.assignment[j] == k)
        joint.lp.add_row({{it->second, Rational(-1)}}, Rational(-1));  // x >= 1
      else
        joint.lp.add_row({{it->second, Rational(1)}}, Rational(0));  // x <= 0
    }
  }
  LpSolution direct = solve_lp(joint.lp);
  if (direct.status != LpStatus::Optimal)
    throw InvariantViolation("pinned joint relaxation must stay feasible");

  // Reduction route.
  ReducedInstance red = reduce_after_rounding(inst, iota, fixed_sets);
  Rational via_reduction =
      rounded.profit + greedy_lp(red.instance).objective;
  return {direct.objective_value, via_reduction};
}

}  // namespace cluscov
