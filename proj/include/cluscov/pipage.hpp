#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "cluscov/lp.hpp"
#include "cluscov/model.hpp"

namespace cluscov {

/// L(x) = sum_i p_i * min{1, sum_{j in S(i)} sum_k x_jk}: the LP coverage
/// objective with the y-variables set optimally.
inline Rational evaluate_L(const Instance& inst, const FractionalSolution& f) {
  Rational total = 0;
  for (int i = 0; i < inst.num_items(); ++i)
    total += inst.items[i].profit * f.implied_y(inst, i);
  return total;
}

/// F(x) = sum_i p_i (1 - prod_{j in S(i)} (1 - sum_k x_jk)), the product-form
/// surrogate; equals L on integral x and never falls below (1-1/e) L.
inline Rational evaluate_F(const Instance& inst, const FractionalSolution& f) {
  Rational total = 0;
  for (int i = 0; i < inst.num_items(); ++i) {
    Rational prod = 1;
    for (int j : FractionalSolution::sets_containing(inst, i))
      prod *= Rational(1) - f.set_total(j);
    total += inst.items[i].profit * (Rational(1) - prod);
  }
  return total;
}

/// Bipartite graph on sets and knapsacks whose edges are the strictly
/// fractional x-entries.
struct SupportGraph {
  std::vector<std::pair<int, int>> edges;          // (set, knapsack)
  std::map<int, std::vector<int>> s_adj, k_adj;    // sorted neighbor lists

  bool has_edge(int j, int k) const {
    auto it = s_adj.find(j);
    return it != s_adj.end() &&
           std::binary_search(it->second.begin(), it->second.end(), k);
  }
};

inline SupportGraph build_support_graph(const FractionalSolution& f) {
  SupportGraph g;
  for (const auto& [key, v] : f.x) {
    if (v <= 0 || v >= 1) continue;
    g.edges.push_back(key);
    g.s_adj[key.first].push_back(key.second);
    g.k_adj[key.second].push_back(key.first);
  }
  for (auto& [j, adj] : g.s_adj) std::sort(adj.begin(), adj.end());
  for (auto& [k, adj] : g.k_adj) std::sort(adj.begin(), adj.end());
  return g;
}

struct Matching {
  std::vector<std::pair<int, int>> pairs;  // (set, knapsack)

  std::optional<int> matched_knapsack(int j) const {
    for (const auto& [s, k] : pairs)
      if (s == j) return k;
    return std::nullopt;
  }
};

namespace detail {

// Node in the bipartite support graph: side 0 = set, 1 = knapsack.
using Node = std::pair<int, int>;

inline std::vector<int> neighbors(const SupportGraph& g, const Node& u) {
  const auto& adj = u.first == 0 ? g.s_adj : g.k_adj;
  auto it = adj.find(u.second);
  return it == adj.end() ? std::vector<int>{} : it->second;
}

inline int degree(const SupportGraph& g, const Node& u) {
  return static_cast<int>(neighbors(g, u).size());
}

inline std::vector<Node> all_nodes(const SupportGraph& g) {
  std::vector<Node> nodes;
  for (const auto& [j, adj] : g.s_adj) nodes.push_back({0, j});
  for (const auto& [k, adj] : g.k_adj) nodes.push_back({1, k});
  return nodes;
}

// First cycle in DFS order from the lowest node, or empty. Returned as a
// node sequence u1, ..., ut (closing edge {ut, u1} implied).
inline std::vector<Node> find_cycle(const SupportGraph& g) {
  // Peel leaves; whatever remains is either empty or the 2-core.
  std::set<Node> removed;
  std::vector<Node> nodes = all_nodes(g);
  auto live_degree = [&](const Node& u) {
    int d = 0;
    for (int v : neighbors(g, u))
      if (!removed.count({1 - u.first, v})) ++d;
    return d;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Node& u : nodes) {
      if (removed.count(u) || live_degree(u) > 1) continue;
      removed.insert(u);
      changed = true;
    }
  }
  Node start{-1, -1};
  for (const Node& u : nodes)
    if (!removed.count(u)) {
      start = u;
      break;
    }
  if (start.first < 0) return {};
  // Walk the 2-core, always taking the lowest-id live neighbor that is not
  // the node we came from, until a node repeats.
  std::vector<Node> walk{start};
  std::map<Node, int> seen{{start, 0}};
  Node prev{-1, -1}, cur = start;
  for (;;) {
    Node next{-1, -1};
    for (int v : neighbors(g, cur)) {
      Node w{1 - cur.first, v};
      if (!removed.count(w) && w != prev) {
        next = w;
        break;
      }
    }
    if (next.first < 0) {
      // Degenerate multi-edge-free bipartite 2-core always yields a step.
      throw InvariantViolation("cycle walk got stuck");
    }
    auto it = seen.find(next);
    if (it != seen.end())
      return std::vector<Node>(walk.begin() + it->second, walk.end());
    seen[next] = static_cast<int>(walk.size());
    walk.push_back(next);
    prev = cur;
    cur = next;
  }
}

inline std::pair<int, int> edge_of(const Node& a, const Node& b) {
  return a.first == 0 ? std::pair<int, int>{a.second, b.second}
                      : std::pair<int, int>{b.second, a.second};
}

// Splits a closed or open node sequence into the two alternating matchings.
inline void alternate_matchings(const std::vector<Node>& seq, bool closed,
                                std::vector<std::pair<int, int>>& m1,
                                std::vector<std::pair<int, int>>& m2) {
  std::size_t edges = closed ? seq.size() : seq.size() - 1;
  for (std::size_t e = 0; e < edges; ++e) {
    auto edge = edge_of(seq[e], seq[(e + 1) % seq.size()]);
    (e % 2 == 0 ? m1 : m2).push_back(edge);
  }
}

// x += delta/c_j on m1 and -= delta/c_j on m2 (Eq. (8) move).
inline void apply_shift(const Instance& inst, FractionalSolution& f,
                        const std::vector<std::pair<int, int>>& m1,
                        const std::vector<std::pair<int, int>>& m2,
                        const Rational& delta) {
  for (const auto& e : m1) f.x[e] += delta / inst.sets[e.first].cost;
  for (const auto& e : m2) f.x[e] -= delta / inst.sets[e.first].cost;
}

inline Rational min_shift_up(const Instance& inst, const FractionalSolution& f,
                             const std::vector<std::pair<int, int>>& up,
                             const std::vector<std::pair<int, int>>& down) {
  // Largest delta >= 0 with x+delta/c <= 1 on `up` and x-delta/c >= 0 on
  // `down`.
  std::optional<Rational> eps;
  auto consider = [&](const Rational& v) {
    if (!eps || v < *eps) eps = v;
  };
  for (const auto& e : up)
    consider(inst.sets[e.first].cost * (Rational(1) - f.x.at(e)));
  for (const auto& e : down) consider(inst.sets[e.first].cost * f.x.at(e));
  return *eps;
}

}  // namespace detail

/// Cancels support-graph cycles by moving cost mass along the cycle until an
/// edge turns integral. Preserves L and every per-knapsack load exactly.
inline FractionalSolution eliminate_cycles(const Instance& inst,
                                           const FractionalSolution& input) {
  FractionalSolution f = input;
  for (;;) {
    SupportGraph g = build_support_graph(f);
    std::vector<detail::Node> cycle = detail::find_cycle(g);
    if (cycle.empty()) return f;
    std::vector<std::pair<int, int>> m1, m2;
    detail::alternate_matchings(cycle, /*closed=*/true, m1, m2);
    // eps = min{min_{M1} c_j x_jk, min_{M2} c_j (1 - x_jk)}: the largest
    // move lowering M1 and raising M2 that stays in [0, 1]; at least one
    // critical edge turns integral.
    Rational eps = detail::min_shift_up(inst, f, m2, m1);
    detail::apply_shift(inst, f, m2, m1, eps);
  }
}

/// Removes S-S-paths by shifting to whichever interval endpoint does not
/// decrease F (convexity of F along the move). Per-knapsack loads are
/// untouched; only the two endpoint sets change their totals.
inline FractionalSolution eliminate_ss_paths(const Instance& inst,
                                             const FractionalSolution& input) {
  FractionalSolution f = input;
  for (;;) {
    SupportGraph g = build_support_graph(f);
    // Components by lowest node; within one, the two lowest S-leaves.
    std::set<detail::Node> visited;
    std::vector<detail::Node> path_ends;
    for (const detail::Node& root : detail::all_nodes(g)) {
      if (visited.count(root)) continue;
      std::vector<detail::Node> stack{root}, s_leaves;
      visited.insert(root);
      while (!stack.empty()) {
        detail::Node u = stack.back();
        stack.pop_back();
        if (u.first == 0 && detail::degree(g, u) == 1) s_leaves.push_back(u);
        for (int v : detail::neighbors(g, u)) {
          detail::Node w{1 - u.first, v};
          if (visited.insert(w).second) stack.push_back(w);
        }
      }
      std::sort(s_leaves.begin(), s_leaves.end());
      if (s_leaves.size() >= 2) {
        path_ends = {s_leaves[0], s_leaves[1]};
        break;
      }
    }
    if (path_ends.empty()) return f;

    // Path between the two S-leaves via BFS parents.
    std::map<detail::Node, detail::Node> parent;
    std::vector<detail::Node> queue{path_ends[0]};
    parent[path_ends[0]] = path_ends[0];
    for (std::size_t h = 0; h < queue.size(); ++h) {
      detail::Node u = queue[h];
      for (int v : detail::neighbors(g, u)) {
        detail::Node w{1 - u.first, v};
        if (!parent.count(w)) {
          parent[w] = u;
          queue.push_back(w);
        }
      }
    }
    std::vector<detail::Node> path;
    for (detail::Node u = path_ends[1]; ; u = parent[u]) {
      path.push_back(u);
      if (u == path_ends[0]) break;
    }
    std::reverse(path.begin(), path.end());

    std::vector<std::pair<int, int>> m1, m2;
    detail::alternate_matchings(path, /*closed=*/false, m1, m2);
    Rational eps1 = detail::min_shift_up(inst, f, m2, m1);
    Rational eps2 = detail::min_shift_up(inst, f, m1, m2);
    FractionalSolution down = f, up = f;
    detail::apply_shift(inst, down, m2, m1, eps1);  // x(-eps1)
    detail::apply_shift(inst, up, m1, m2, eps2);    // x(+eps2)
    f = evaluate_F(inst, up) >= evaluate_F(inst, down) ? std::move(up)
                                                       : std::move(down);
  }
}

/// Per-tree matching of the Theorem 1 construction; saturates every
/// non-isolated S-node. Requires an acyclic support graph with no S-S-path.
inline Matching saturating_matching(const SupportGraph& g) {
  Matching m;
  std::set<detail::Node> visited;
  for (const detail::Node& seed : detail::all_nodes(g)) {
    if (visited.count(seed) || detail::degree(g, seed) == 0) continue;
    // Collect the component.
    std::vector<detail::Node> comp, stack{seed};
    visited.insert(seed);
    while (!stack.empty()) {
      detail::Node u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (int v : detail::neighbors(g, u)) {
        detail::Node w{1 - u.first, v};
        if (visited.insert(w).second) stack.push_back(w);
      }
    }
    std::sort(comp.begin(), comp.end());
    if (static_cast<int>(comp.size()) - 1 !=
        [&] {
          int e = 0;
          for (const auto& u : comp)
            if (u.first == 0) e += detail::degree(g, u);
          return e;
        }())
      throw InvariantViolation("support graph component is not a tree");

    std::vector<detail::Node> s_leaves;
    detail::Node root{-1, -1};
    for (const auto& u : comp) {
      if (u.first == 0 && detail::degree(g, u) == 1) s_leaves.push_back(u);
      if (u.first == 1 && root.first < 0) root = u;  // lowest-id K-node
    }
    if (s_leaves.size() > 1)
      throw InvariantViolation("support graph contains an S-S-path");
    if (root.first < 0)
      throw InvariantViolation("tree with edges but no knapsack node");

    std::map<detail::Node, detail::Node> parent;
    std::vector<detail::Node> order{root};
    parent[root] = root;
    for (std::size_t h = 0; h < order.size(); ++h) {
      detail::Node u = order[h];
      for (int v : detail::neighbors(g, u)) {
        detail::Node w{1 - u.first, v};
        if (!parent.count(w)) {
          parent[w] = u;
          order.push_back(w);
        }
      }
    }

    std::set<detail::Node> on_path, matched_k;
    if (!s_leaves.empty()) {
      for (detail::Node u = s_leaves[0]; u != root; u = parent[u])
        on_path.insert(u);
      on_path.insert(root);
      // Match each S-node on the leaf-to-root path to its parent.
      for (detail::Node u = s_leaves[0]; u != root; u = parent[u]) {
        if (u.first != 0) continue;
        m.pairs.emplace_back(u.second, parent[u].second);
        matched_k.insert(parent[u]);
      }
    }
    // Every other S-node takes its lowest-id unmatched child.
    for (const auto& u : comp) {
      if (u.first != 0 || on_path.count(u)) continue;
      std::optional<int> child;
      for (int v : detail::neighbors(g, u)) {
        detail::Node w{1, v};
        if (w != parent[u] && !matched_k.count(w)) {
          child = v;
          break;
        }
      }
      if (!child)
        throw InvariantViolation("unmatched S-node has no free child");
      m.pairs.emplace_back(u.second, *child);
      matched_k.insert({1, *child});
    }
  }
  std::sort(m.pairs.begin(), m.pairs.end());
  return m;
}

/// The full pipage pipeline on the MCPK relaxation with given effective
/// capacities: LP optimum, cycle elimination, S-S-path elimination, and the
/// witnessing S-saturating matching.
struct PipageRun {
  Rational lp_value;
  FractionalSolution x_lp, x_acyclic, x_final;
  Matching matching;
};

inline PipageRun run_pipage(const Instance& inst,
                            const std::vector<Rational>& effective_capacity) {
  McpkLp prog = build_mcpk_lp(inst, effective_capacity);
  LpSolution sol = solve_lp(prog.lp);
  if (sol.status != LpStatus::Optimal)
    throw InvariantViolation("MCPK relaxation must have an optimum");
  PipageRun run;
  run.lp_value = sol.objective_value;
  run.x_lp = prog.extract(sol);
  run.x_acyclic = eliminate_cycles(inst, run.x_lp);
  run.x_final = eliminate_ss_paths(inst, run.x_acyclic);
  run.matching = saturating_matching(build_support_graph(run.x_final));
  return run;
}

/// x^1: the integral entries of x as an assignment.
inline Assignment integral_part(const Instance& inst,
                                const FractionalSolution& f) {
  Assignment a(inst.num_sets());
  for (const auto& [key, v] : f.x)
    if (v == 1) a.assign(key.first, key.second);
  return a;
}

/// Matched strictly-fractional entries whose knapsack satisfies `keep`.
inline Assignment matched_part(const Instance& inst,
                               const FractionalSolution& f, const Matching& m,
                               const std::function<bool(int)>& keep) {
  Assignment a(inst.num_sets());
  for (const auto& [j, k] : m.pairs) {
    Rational v = f.x_at(j, k);
    if (v > 0 && v < 1 && keep(k)) a.assign(j, k);
  }
  return a;
}

struct McpkCertificate {
  Rational lp_value;
  Rational x1_value, x2_value;
  std::string chosen;
};

struct McpkResult {
  Assignment assignment{0};
  Rational value;
  McpkCertificate cert;
  PipageRun run;
};

/// Algorithm: pipage on the LP optimum, then the better of the integral part
/// and the matched fractional part.
inline McpkResult solve_mcpk_alg1(
    const Instance& inst,
    std::optional<std::vector<Rational>> effective_capacity = std::nullopt) {
  if (!inst.normalized)
    throw ValidationError("instance must be normalized first");
  if (!effective_capacity) {
    for (const auto& c : inst.clusters)
      if (!c.redundant)
        throw ValidationError(
            "MCPK solver needs redundant clusters or explicit capacities");
    effective_capacity.emplace();
    for (const auto& k : inst.knapsacks)
      effective_capacity->push_back(k.capacity);
  }
  McpkResult out;
  out.run = run_pipage(inst, *effective_capacity);
  Assignment x1 = integral_part(inst, out.run.x_final);
  Assignment x2 = matched_part(inst, out.run.x_final, out.run.matching,
                               [](int) { return true; });
  out.cert.lp_value = out.run.lp_value;
  out.cert.x1_value = evaluate_assignment(inst, x1);
  out.cert.x2_value = evaluate_assignment(inst, x2);
  if (out.cert.x1_value >= out.cert.x2_value) {
    out.assignment = x1;
    out.value = out.cert.x1_value;
    out.cert.chosen = "x1";
  } else {
    out.assignment = x2;
    out.value = out.cert.x2_value;
    out.cert.chosen = "x2";
  }
  return out;
}

}  // namespace cluscov
