#pragma once

#include <map>
#include <set>
#include <vector>

#include "cluscov/pipage.hpp"

namespace cluscov {

/// Closed-form optimal cluster split: full capacity for every knapsack
/// before the critical one, the remainder at the critical knapsack, zero
/// after it.
struct ClusterAnalysis {
  int cluster_id = 0;
  // Critical knapsack id, or kUnassigned for redundant clusters.
  int critical_index = kUnassigned;
  std::map<int, Rational> z_star;              // knapsack -> z*_{kl}
  std::map<int, Rational> effective_capacity;  // min{B_k, U_l z*_{kl}}
};

/// The unique knapsack r in the cluster's canonical order with
/// sum_{k<r} B_k <= U_l < sum_{k<=r} B_k.
inline int critical_knapsack(const Instance& inst, const Cluster& cluster) {
  if (cluster.redundant)
    throw ValidationError("cluster " + std::to_string(cluster.id) +
                          " is redundant and has no critical knapsack");
  Rational prefix = 0;
  for (int k : cluster.knapsacks) {
    if (prefix <= cluster.capacity &&
        cluster.capacity < prefix + inst.knapsacks[k].capacity)
      return k;
    prefix += inst.knapsacks[k].capacity;
  }
  throw InvariantViolation("no critical knapsack in a non-redundant cluster");
}

inline std::vector<ClusterAnalysis> compute_z_star(const Instance& inst) {
  if (!inst.normalized)
    throw ValidationError("instance must be normalized first");
  std::vector<ClusterAnalysis> out;
  for (const auto& c : inst.clusters) {
    ClusterAnalysis a;
    a.cluster_id = c.id;
    if (c.redundant) {
      for (int k : c.knapsacks)
        a.effective_capacity[k] = inst.knapsacks[k].capacity;
      out.push_back(std::move(a));
      continue;
    }
    a.critical_index = critical_knapsack(inst, c);
    Rational assigned = 0;
    bool past_critical = false;
    for (int k : c.knapsacks) {
      if (past_critical) {
        a.z_star[k] = 0;
      } else if (k == a.critical_index) {
        a.z_star[k] = Rational(1) - assigned;
        past_critical = true;
      } else {
        a.z_star[k] = inst.knapsacks[k].capacity / c.capacity;
        assigned += a.z_star[k];
      }
      Rational reduced = c.capacity * a.z_star[k];
      a.effective_capacity[k] = std::min(inst.knapsacks[k].capacity, reduced);
    }
    // Lemma 5 feasibility of the closed form.
    Rational total = 0;
    for (const auto& [k, z] : a.z_star) {
      if (z < 0 || z > 1) throw InvariantViolation("z* outside [0, 1]");
      total += z;
    }
    if (total != 1) throw InvariantViolation("z* does not sum to one");
    out.push_back(std::move(a));
  }
  return out;
}

inline std::vector<Rational> effective_capacities(
    const Instance& inst, const std::vector<ClusterAnalysis>& analyses) {
  std::vector<Rational> cap(inst.knapsacks.size(), Rational(0));
  for (const auto& a : analyses)
    for (const auto& [k, v] : a.effective_capacity) cap[k] = v;
  return cap;
}

inline std::set<int> critical_set(const std::vector<ClusterAnalysis>& a) {
  std::set<int> crit;
  for (const auto& c : a)
    if (c.critical_index != kUnassigned) crit.insert(c.critical_index);
  return crit;
}

struct McpcCertificate {
  Rational lp_value;
  Rational x1_value, x2_value, x3_value;
  std::string chosen;
};

struct McpcResult {
  Assignment assignment{0};
  Rational value;
  McpcCertificate cert;
  PipageRun run;
};

/// Fixes z*, runs pipage on LP(z*), and splits the matched fractional part
/// into non-critical (x^2) and critical (x^3) knapsacks; the critical part
/// stays cluster-feasible because it assigns at most one set per cluster.
inline McpcResult solve_mcpc_alg2(const Instance& inst) {
  if (!inst.normalized)
    throw ValidationError("instance must be normalized first");
  std::vector<ClusterAnalysis> analyses = compute_z_star(inst);
  std::set<int> crit = critical_set(analyses);

  McpcResult out;
  out.run = run_pipage(inst, effective_capacities(inst, analyses));
  Assignment x1 = integral_part(inst, out.run.x_final);
  Assignment x2 = matched_part(inst, out.run.x_final, out.run.matching,
                               [&](int k) { return !crit.count(k); });
  Assignment x3 = matched_part(inst, out.run.x_final, out.run.matching,
                               [&](int k) { return crit.count(k) > 0; });
  for (const Assignment* a : {&x1, &x2, &x3}) {
    FeasibilityReport r = check_feasible(inst, *a);
    if (!r.feasible())
      throw InvariantViolation("candidate solution infeasible: " +
                               r.violations.front());
  }
  out.cert.lp_value = out.run.lp_value;
  out.cert.x1_value = evaluate_assignment(inst, x1);
  out.cert.x2_value = evaluate_assignment(inst, x2);
  out.cert.x3_value = evaluate_assignment(inst, x3);
  out.assignment = x1;
  out.value = out.cert.x1_value;
  out.cert.chosen = "x1";
  if (out.cert.x2_value > out.value) {
    out.assignment = x2;
    out.value = out.cert.x2_value;
    out.cert.chosen = "x2";
  }
  if (out.cert.x3_value > out.value) {
    out.assignment = x3;
    out.value = out.cert.x3_value;
    out.cert.chosen = "x3";
  }
  return out;
}

}  // namespace cluscov
