#pragma once

#include <optional>
#include <set>
#include <vector>

#include "cluscov/mcpc.hpp"
#include "cluscov/pipage.hpp"

namespace cluscov {

struct NoIsolatedCluster : std::runtime_error {
  explicit NoIsolatedCluster(int iteration_idx = -1)
      : std::runtime_error(
            iteration_idx < 0
                ? std::string("no isolated cluster exists")
                : "no isolated cluster exists at iteration " +
                      std::to_string(iteration_idx)),
        iteration(iteration_idx) {}
  int iteration;
};

/// Output of the greedy LP solver for MKPC: the fractional solution plus
/// the split/unsplit bookkeeping the iterative rounding needs.
struct GreedyAnnotation {
  FractionalSolution x;
  std::vector<ClusterAnalysis> analyses;
  std::vector<Rational> residual;           // per knapsack, w.r.t. z*
  std::set<int> split_items, unsplit_items;
  std::map<int, int> split_of;              // knapsack -> its split item
  std::map<int, std::vector<int>> us_of;    // knapsack -> unsplit items
  Rational objective;

  /// US(l) union SS(l): the items assigned to cluster l.
  std::set<int> assigned_items(const Cluster& cluster) const {
    std::set<int> pool;
    for (int k : cluster.knapsacks) {
      auto us = us_of.find(k);
      if (us != us_of.end()) pool.insert(us->second.begin(), us->second.end());
      auto sp = split_of.find(k);
      if (sp != split_of.end()) pool.insert(sp->second);
    }
    return pool;
  }
};

namespace detail {

inline void require_mkpc(const Instance& inst) {
  if (!inst.normalized)
    throw ValidationError("instance must be normalized first");
  if (inst.kind != Kind::MKPC && inst.kind != Kind::MKP)
    throw ValidationError("greedy LP requires singleton sets (MKPC/MKP)");
}

// Smaller capacity first, ties resolved toward the knapsack that comes
// later in the canonical order (larger id).
inline bool smaller_capacity(const Instance& inst, int a, int b) {
  if (inst.knapsacks[a].capacity != inst.knapsacks[b].capacity)
    return inst.knapsacks[a].capacity < inst.knapsacks[b].capacity;
  return a > b;
}

}  // namespace detail

/// GREEDY: fixes z*, then assigns items by non-increasing efficiency ratio,
/// each to the smallest-capacity knapsack that can hold it and still has
/// residual budget, splitting across knapsacks as needed. The result is an
/// optimal solution of the MKPC relaxation with the bounded split property;
/// both facts are checked, not assumed.
inline GreedyAnnotation greedy_lp(const Instance& inst,
                                  bool verify_invariants = true) {
  detail::require_mkpc(inst);
  GreedyAnnotation g;
  g.analyses = compute_z_star(inst);
  std::vector<Rational> effective = effective_capacities(inst, g.analyses);
  g.residual = effective;

  std::vector<int> order(inst.sets.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    Rational ra = inst.items[a].profit / inst.sets[a].cost;
    Rational rb = inst.items[b].profit / inst.sets[b].cost;
    if (ra != rb) return ra > rb;
    return a < b;
  });

  for (int j : order) {
    const Rational& cost = inst.sets[j].cost;
    Rational remaining = 1;
    while (remaining > 0) {
      int pick = -1;
      for (int k = 0; k < inst.num_knapsacks(); ++k) {
        if (inst.knapsacks[k].capacity < cost || g.residual[k] <= 0) continue;
        if (pick < 0 || detail::smaller_capacity(inst, k, pick)) pick = k;
      }
      if (pick < 0) break;
      Rational frac = std::min(remaining, Rational(g.residual[pick] / cost));
      g.x.x[{j, pick}] = frac;
      g.residual[pick] -= frac * cost;
      remaining -= frac;
    }
  }

  for (const auto& a : g.analyses)
    for (const auto& [k, z] : a.z_star) g.x.z[{k, a.cluster_id}] = z;

  for (int j = 0; j < inst.num_sets(); ++j) {
    std::vector<int> hosts;
    for (int k = 0; k < inst.num_knapsacks(); ++k)
      if (g.x.x_at(j, k) > 0) hosts.push_back(k);
    if (hosts.empty()) continue;
    if (hosts.size() == 1 && g.x.x_at(j, hosts[0]) == 1) {
      g.unsplit_items.insert(j);
      g.us_of[hosts[0]].push_back(j);
      continue;
    }
    g.split_items.insert(j);
    int smallest = hosts[0];
    for (int k : hosts)
      if (detail::smaller_capacity(inst, k, smallest)) smallest = k;
    if (!g.split_of.emplace(smallest, j).second)
      throw InvariantViolation("knapsack " + std::to_string(smallest) +
                               " is the smallest host of two split items");
  }

  g.objective = evaluate_L(inst, g.x);

  if (verify_invariants) {
    // Lemma-level checks: greedy matches the simplex optimum of the same
    // program exactly, and the support graph admits a saturating matching.
    LpSolution ref = solve_lp(build_mcpk_lp(inst, effective).lp);
    if (ref.status != LpStatus::Optimal || ref.objective_value != g.objective)
      throw InvariantViolation("greedy objective differs from LP optimum");
    saturating_matching(build_support_graph(g.x));
  }
  return g;
}

struct MkpcThirdResult {
  Assignment assignment{0};
  Rational value;
  McpcCertificate cert;
  GreedyAnnotation greedy;
  Matching matching;
};

/// Algorithm 2 specialized to MKPC: the greedy solution already has the
/// bounded split property, so no pipage transformations (and no 1-1/e loss).
inline MkpcThirdResult solve_mkpc_third(const Instance& inst) {
  MkpcThirdResult out;
  out.greedy = greedy_lp(inst);
  out.matching = saturating_matching(build_support_graph(out.greedy.x));
  std::set<int> crit = critical_set(out.greedy.analyses);

  Assignment x1 = integral_part(inst, out.greedy.x);
  Assignment x2 = matched_part(inst, out.greedy.x, out.matching,
                               [&](int k) { return !crit.count(k); });
  Assignment x3 = matched_part(inst, out.greedy.x, out.matching,
                               [&](int k) { return crit.count(k) > 0; });
  for (const Assignment* a : {&x1, &x2, &x3}) {
    FeasibilityReport r = check_feasible(inst, *a);
    if (!r.feasible())
      throw InvariantViolation("candidate solution infeasible: " +
                               r.violations.front());
  }
  out.cert.lp_value = out.greedy.objective;
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

/// Lowest-id candidate cluster none of whose knapsacks carry any fraction
/// of an item assigned in a different cluster.
inline int find_isolated_cluster(const Instance& inst,
                                 const GreedyAnnotation& g,
                                 const std::set<int>& candidates) {
  for (int iota : candidates) {
    const Cluster& target = inst.clusters[iota];
    std::set<int> knaps(target.knapsacks.begin(), target.knapsacks.end());
    bool isolated = true;
    for (const auto& other : inst.clusters) {
      if (other.id == iota) continue;
      for (int j : g.assigned_items(other)) {
        for (int k : knaps) {
          if (g.x.x_at(j, k) > 0) {
            isolated = false;
            break;
          }
        }
        if (!isolated) break;
      }
      if (!isolated) break;
    }
    if (isolated) return iota;
  }
  throw NoIsolatedCluster();
}

struct RoundingConfig {
  int max_pool = 20;
};

struct RoundedCluster {
  Assignment assignment{0};  // partial, over the instance's set ids
  Rational profit;
  Rational fractional_profit;  // sum_{j in S} sum_{k in K(iota)} p_j x*_jk
};

/// Exact search for the most profitable feasible placement of the cluster's
/// assigned items into its knapsacks; dominates the assignment whose
/// existence the Rounding Lemma guarantees, so both Eq. (11) inequalities
/// must hold and are asserted.
inline RoundedCluster round_cluster(const Instance& inst,
                                    const GreedyAnnotation& g, int iota,
                                    const RoundingConfig& config = {}) {
  const Cluster& cluster = inst.clusters[iota];
  std::set<int> pool_set = g.assigned_items(cluster);
  std::vector<int> pool(pool_set.begin(), pool_set.end());
  if (static_cast<int>(pool.size()) > config.max_pool)
    throw LimitExceeded("cluster pool of " + std::to_string(pool.size()) +
                        " items exceeds the rounding search cap");
  // Profit-descending order improves the bound pruning.
  std::sort(pool.begin(), pool.end(), [&](int a, int b) {
    if (inst.items[a].profit != inst.items[b].profit)
      return inst.items[a].profit > inst.items[b].profit;
    return a < b;
  });

  std::vector<Rational> suffix_profit(pool.size() + 1, Rational(0));
  for (int t = static_cast<int>(pool.size()) - 1; t >= 0; --t)
    suffix_profit[t] = suffix_profit[t + 1] + inst.items[pool[t]].profit;

  RoundedCluster out;
  out.assignment = Assignment(inst.num_sets());
  out.profit = 0;
  std::vector<int> current(pool.size(), kUnassigned), best = current;
  Rational best_profit = 0;
  std::vector<Rational> load(inst.knapsacks.size(), Rational(0));
  Rational cluster_load = 0;

  std::function<void(std::size_t, Rational)> search =
      [&](std::size_t idx, Rational profit) {
        if (idx == pool.size()) {
          if (profit > best_profit) {
            best_profit = profit;
            best = current;
          }
          return;
        }
        if (profit + suffix_profit[idx] <= best_profit) return;
        int j = pool[idx];
        const Rational& cost = inst.sets[j].cost;
        for (int k : cluster.knapsacks) {
          if (load[k] + cost > inst.knapsacks[k].capacity) continue;
          if (!cluster.redundant && cluster_load + cost > cluster.capacity)
            continue;
          current[idx] = k;
          load[k] += cost;
          cluster_load += cost;
          search(idx + 1, profit + inst.items[j].profit);
          cluster_load -= cost;
          load[k] -= cost;
          current[idx] = kUnassigned;
        }
        search(idx + 1, profit);
      };
  search(0, Rational(0));

  for (std::size_t t = 0; t < pool.size(); ++t)
    if (best[t] != kUnassigned) out.assignment.assign(pool[t], best[t]);
  out.profit = best_profit;

  out.fractional_profit = 0;
  Rational assigned_mass_profit = 0;
  for (const auto& [key, v] : g.x.x) {
    if (!std::count(cluster.knapsacks.begin(), cluster.knapsacks.end(),
                    key.second))
      continue;
    out.fractional_profit += inst.items[key.first].profit * v;
    if (out.assignment.assigned(key.first))
      assigned_mass_profit += inst.items[key.first].profit * v;
  }
  if (out.profit < assigned_mass_profit ||
      2 * out.profit < out.fractional_profit)
    throw InvariantViolation("Rounding Lemma inequality violated on cluster " +
                             std::to_string(iota));
  return out;
}

/// Cluster order witnessing disentanglement (every knapsack of an earlier
/// cluster at least as large as every knapsack of a later one), or nullopt.
inline std::optional<std::vector<int>> detect_disentangled(
    const Instance& inst) {
  if (!inst.normalized)
    throw ValidationError("instance must be normalized first");
  std::vector<int> nonempty, empty;
  for (const auto& c : inst.clusters)
    (c.knapsacks.empty() ? empty : nonempty).push_back(c.id);
  auto max_cap = [&](int l) {
    return inst.knapsacks[inst.clusters[l].knapsacks.front()].capacity;
  };
  auto min_cap = [&](int l) {
    return inst.knapsacks[inst.clusters[l].knapsacks.back()].capacity;
  };
  std::sort(nonempty.begin(), nonempty.end(), [&](int a, int b) {
    if (max_cap(a) != max_cap(b)) return max_cap(a) > max_cap(b);
    return a < b;
  });
  for (std::size_t t = 0; t + 1 < nonempty.size(); ++t)
    if (min_cap(nonempty[t]) < max_cap(nonempty[t + 1])) return std::nullopt;
  nonempty.insert(nonempty.end(), empty.begin(), empty.end());
  return nonempty;
}

/// The instance left after fixing a rounded cluster: the cluster, its
/// knapsacks and the assigned items are removed and ids are re-densified.
/// The maps translate new ids back to the input instance's ids.
struct ReducedInstance {
  Instance instance;
  std::vector<int> set_map, knap_map, cluster_map;
};

inline ReducedInstance reduce_after_rounding(const Instance& work, int iota,
                                             const std::set<int>& fixed_sets) {
  ReducedInstance red;
  Instance& next = red.instance;
  next.normalized = true;  // removal preserves all normalization invariants
  next.kind = work.kind;
  const Cluster& cluster = work.clusters[iota];
  std::set<int> cluster_knaps(cluster.knapsacks.begin(),
                              cluster.knapsacks.end());
  std::vector<int> knap_rename(work.num_knapsacks(), -1),
      cluster_rename(work.num_clusters(), -1);
  for (int j = 0; j < work.num_sets(); ++j) {
    if (fixed_sets.count(j)) continue;
    int id = next.num_sets();
    next.items.push_back({id, work.items[j].profit});
    next.sets.push_back({id, work.sets[j].cost, {id}});
    red.set_map.push_back(j);
  }
  for (int l = 0; l < work.num_clusters(); ++l) {
    if (l == iota) continue;
    cluster_rename[l] = next.num_clusters();
    Cluster c = work.clusters[l];
    c.id = cluster_rename[l];
    c.knapsacks.clear();
    next.clusters.push_back(c);
    red.cluster_map.push_back(l);
  }
  for (int k = 0; k < work.num_knapsacks(); ++k) {
    if (cluster_knaps.count(k)) continue;
    knap_rename[k] = next.num_knapsacks();
    next.knapsacks.push_back({knap_rename[k], work.knapsacks[k].capacity,
                              cluster_rename[work.knapsacks[k].cluster]});
    red.knap_map.push_back(k);
  }
  for (const auto& c : work.clusters) {
    if (c.id == iota) continue;
    for (int k : c.knapsacks)
      next.clusters[cluster_rename[c.id]].knapsacks.push_back(knap_rename[k]);
  }
  return red;
}

struct IterationCertificate {
  int cluster;  // original cluster id
  Rational fractional_profit;
  Rational rounded_profit;
};

struct MkpcIterativeResult {
  Assignment assignment{0};
  Rational value;
  Rational lp_value;  // original greedy LP optimum
  std::vector<IterationCertificate> iterations;
};

/// Algorithm 3: repeatedly round an isolated cluster with the Rounding
/// Lemma, fix its assignment, and re-run GREEDY on the reduced instance.
/// The variable fixings are realized by removing the rounded cluster's
/// knapsacks and the assigned items from the instance.
inline MkpcIterativeResult solve_mkpc_iterative(
    const Instance& inst, const RoundingConfig& config = {}) {
  detail::require_mkpc(inst);

  MkpcIterativeResult out;
  out.assignment = Assignment(inst.num_sets());

  GreedyAnnotation original = greedy_lp(inst);
  out.lp_value = original.objective;
  std::map<int, Rational> original_cluster_profit;
  for (const auto& c : inst.clusters) {
    Rational fp = 0;
    for (int k : c.knapsacks)
      for (int j = 0; j < inst.num_sets(); ++j)
        fp += inst.items[j].profit * original.x.x_at(j, k);
    original_cluster_profit[c.id] = fp;
  }

  Instance work = inst;
  // Maps from work-instance ids back to original ids.
  std::vector<int> set_map(inst.num_sets()), knap_map(inst.num_knapsacks()),
      cluster_map(inst.num_clusters());
  for (int j = 0; j < inst.num_sets(); ++j) set_map[j] = j;
  for (int k = 0; k < inst.num_knapsacks(); ++k) knap_map[k] = k;
  for (int l = 0; l < inst.num_clusters(); ++l) cluster_map[l] = l;

  Rational fixed_profit = 0, rounded_original_mass = 0;
  int iteration = 0;
  while (work.num_clusters() > 0) {
    ++iteration;
    GreedyAnnotation g = (iteration == 1) ? original : greedy_lp(work);
    int iota;
    try {
      std::set<int> candidates;
      for (const auto& c : work.clusters) candidates.insert(c.id);
      iota = find_isolated_cluster(work, g, candidates);
    } catch (NoIsolatedCluster&) {
      throw NoIsolatedCluster(iteration);
    }
    RoundedCluster rounded = round_cluster(work, g, iota, config);

    const Cluster& cluster = work.clusters[iota];
    std::set<int> cluster_knaps(cluster.knapsacks.begin(),
                                cluster.knapsacks.end());
    std::set<int> pool = g.assigned_items(cluster);
    for (const auto& [key, v] : g.x.x)
      if (v > 0 && cluster_knaps.count(key.second) && !pool.count(key.first))
        throw InvariantViolation(
            "item outside the pool touches the isolated cluster");

    std::set<int> fixed_sets;
    for (int j = 0; j < work.num_sets(); ++j) {
      if (!rounded.assignment.assigned(j)) continue;
      out.assignment.assign(set_map[j], knap_map[rounded.assignment[j]]);
      fixed_sets.insert(j);
    }
    fixed_profit += rounded.profit;
    rounded_original_mass += original_cluster_profit[cluster_map[iota]];
    // Lemma 8: the profit fixed so far covers half of the rounded clusters'
    // fractional profit in the original LP solution.
    if (2 * fixed_profit < rounded_original_mass)
      throw InvariantViolation("iterative rounding fell below half of the "
                               "rounded clusters' fractional profit");
    out.iterations.push_back({cluster_map[iota], rounded.fractional_profit,
                              rounded.profit});

    // Reduce: drop the rounded cluster, its knapsacks and the fixed items.
    ReducedInstance red = reduce_after_rounding(work, iota, fixed_sets);
    std::vector<int> new_set_map, new_knap_map, new_cluster_map;
    for (int j : red.set_map) new_set_map.push_back(set_map[j]);
    for (int k : red.knap_map) new_knap_map.push_back(knap_map[k]);
    for (int l : red.cluster_map) new_cluster_map.push_back(cluster_map[l]);
    work = std::move(red.instance);
    set_map = std::move(new_set_map);
    knap_map = std::move(new_knap_map);
    cluster_map = std::move(new_cluster_map);
  }

  FeasibilityReport feas = check_feasible(inst, out.assignment);
  if (!feas.feasible())
    throw InvariantViolation("iterative assignment infeasible: " +
                             feas.violations.front());
  out.value = evaluate_assignment(inst, out.assignment);
  if (2 * out.value < out.lp_value)
    throw InvariantViolation(
        "iterative value fell below half of the LP optimum");
  return out;
}

}  // namespace cluscov
