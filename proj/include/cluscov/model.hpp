#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cluscov/rational.hpp"

namespace cluscov {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a runtime-checked structural guarantee fails. These checks
/// back theorems of the algorithms; a violation is a bug, not bad input.
struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct LimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Kind { MCPC, MCPK, MKPC, MKP };

inline std::string kind_to_string(Kind k) {
  switch (k) {
    case Kind::MCPC: return "mcpc";
    case Kind::MCPK: return "mcpk";
    case Kind::MKPC: return "mkpc";
    case Kind::MKP: return "mkp";
  }
  return "mcpc";
}

inline Kind kind_from_string(const std::string& s) {
  if (s == "mcpc") return Kind::MCPC;
  if (s == "mcpk") return Kind::MCPK;
  if (s == "mkpc") return Kind::MKPC;
  if (s == "mkp") return Kind::MKP;
  throw ValidationError("unknown kind '" + s + "'");
}

struct Item {
  int id = 0;
  Rational profit;
};

struct CoverSet {
  int id = 0;
  Rational cost;
  std::vector<int> items;  // member item ids, sorted ascending
};

struct Knapsack {
  int id = 0;
  Rational capacity;
  int cluster = 0;
};

struct Cluster {
  int id = 0;
  Rational capacity;
  // Knapsack ids ordered by non-increasing capacity, ties by ascending id.
  std::vector<int> knapsacks;
  // True when sum of member capacities <= capacity: the cluster constraint
  // is implied by the knapsack constraints and is dropped.
  bool redundant = false;
};

struct Instance {
  Kind kind = Kind::MCPC;
  std::vector<Item> items;
  std::vector<CoverSet> sets;
  std::vector<Knapsack> knapsacks;
  std::vector<Cluster> clusters;
  bool normalized = false;

  int num_items() const { return static_cast<int>(items.size()); }
  int num_sets() const { return static_cast<int>(sets.size()); }
  int num_knapsacks() const { return static_cast<int>(knapsacks.size()); }
  int num_clusters() const { return static_cast<int>(clusters.size()); }
};

constexpr int kUnassigned = -1;

/// sigma: set id -> knapsack id, kUnassigned meaning not assigned.
struct Assignment {
  std::vector<int> target;

  explicit Assignment(int num_sets = 0) : target(num_sets, kUnassigned) {}

  int operator[](int set_id) const { return target.at(set_id); }
  void assign(int set_id, int knapsack_id) { target.at(set_id) = knapsack_id; }
  bool assigned(int set_id) const { return target.at(set_id) != kUnassigned; }
};

namespace detail {

inline void check_dense_ids(const std::string& what, std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] != static_cast<int>(i)) {
      if (i > 0 && ids[i] == ids[i - 1])
        throw ValidationError("duplicate " + what + " id " +
                              std::to_string(ids[i]));
      throw ValidationError(what + " ids must be dense and zero-based, got " +
                            std::to_string(ids[i]));
    }
  }
}

inline bool canonical_knapsack_less(const Knapsack& a, const Knapsack& b) {
  if (a.capacity != b.capacity) return a.capacity > b.capacity;
  return a.id < b.id;
}

}  // namespace detail

/// Checks ids and positivity, clamps knapsack capacities to their cluster
/// capacity, flags redundant clusters, orders each cluster's knapsack list
/// canonically and re-detects the problem kind. Idempotent.
inline Instance validate_and_normalize(const Instance& raw) {
  Instance inst = raw;

  if (inst.knapsacks.empty()) throw ValidationError("empty knapsack list");

  std::vector<int> ids;
  for (const auto& it : inst.items) ids.push_back(it.id);
  detail::check_dense_ids("item", ids);
  ids.clear();
  for (const auto& s : inst.sets) ids.push_back(s.id);
  detail::check_dense_ids("set", ids);
  ids.clear();
  for (const auto& k : inst.knapsacks) ids.push_back(k.id);
  detail::check_dense_ids("knapsack", ids);
  ids.clear();
  for (const auto& c : inst.clusters) ids.push_back(c.id);
  detail::check_dense_ids("cluster", ids);

  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  std::sort(inst.items.begin(), inst.items.end(), by_id);
  std::sort(inst.sets.begin(), inst.sets.end(), by_id);
  std::sort(inst.knapsacks.begin(), inst.knapsacks.end(), by_id);
  std::sort(inst.clusters.begin(), inst.clusters.end(), by_id);

  for (const auto& it : inst.items) {
    if (it.profit <= 0)
      throw ValidationError("item " + std::to_string(it.id) +
                            " has non-positive profit");
  }
  for (auto& s : inst.sets) {
    if (s.cost <= 0)
      throw ValidationError("set " + std::to_string(s.id) +
                            " has non-positive cost");
    std::sort(s.items.begin(), s.items.end());
    s.items.erase(std::unique(s.items.begin(), s.items.end()), s.items.end());
    for (int i : s.items) {
      if (i < 0 || i >= inst.num_items())
        throw ValidationError("set " + std::to_string(s.id) +
                              " references unknown item " + std::to_string(i));
    }
  }
  for (const auto& k : inst.knapsacks) {
    if (k.capacity <= 0)
      throw ValidationError("knapsack " + std::to_string(k.id) +
                            " has non-positive capacity");
    if (k.cluster < 0 || k.cluster >= inst.num_clusters())
      throw ValidationError("knapsack " + std::to_string(k.id) +
                            " references unknown cluster " +
                            std::to_string(k.cluster));
  }
  for (const auto& c : inst.clusters) {
    if (c.capacity <= 0)
      throw ValidationError("cluster " + std::to_string(c.id) +
                            " has non-positive capacity");
  }

  // Assumption (i): B_k <= U_l, clamping where violated.
  for (auto& k : inst.knapsacks) {
    const Rational& u = inst.clusters[k.cluster].capacity;
    if (k.capacity > u) k.capacity = u;
  }

  for (auto& c : inst.clusters) c.knapsacks.clear();
  for (const auto& k : inst.knapsacks)
    inst.clusters[k.cluster].knapsacks.push_back(k.id);
  for (auto& c : inst.clusters) {
    std::sort(c.knapsacks.begin(), c.knapsacks.end(), [&](int a, int b) {
      return detail::canonical_knapsack_less(inst.knapsacks[a],
                                             inst.knapsacks[b]);
    });
    // Assumption (ii): sum B_k > U_l, otherwise the constraint is dropped.
    Rational total = 0;
    for (int k : c.knapsacks) total += inst.knapsacks[k].capacity;
    c.redundant = (total <= c.capacity);
  }

  bool all_redundant = true;
  for (const auto& c : inst.clusters) all_redundant &= c.redundant;
  bool singletons = inst.num_sets() == inst.num_items();
  if (singletons) {
    for (const auto& s : inst.sets)
      singletons &= (s.items.size() == 1 && s.items[0] == s.id);
  }
  inst.kind = singletons ? (all_redundant ? Kind::MKP : Kind::MKPC)
                         : (all_redundant ? Kind::MCPK : Kind::MCPC);
  inst.normalized = true;
  return inst;
}

/// Total profit of distinct covered items; ignores feasibility.
inline Rational evaluate_assignment(const Instance& inst, const Assignment& a) {
  if (static_cast<int>(a.target.size()) != inst.num_sets())
    throw ValidationError("assignment size does not match instance");
  std::vector<bool> covered(inst.items.size(), false);
  for (int j = 0; j < inst.num_sets(); ++j) {
    int k = a[j];
    if (k == kUnassigned) continue;
    if (k < 0 || k >= inst.num_knapsacks())
      throw ValidationError("assignment targets unknown knapsack " +
                            std::to_string(k));
    for (int i : inst.sets[j].items) covered[i] = true;
  }
  Rational value = 0;
  for (int i = 0; i < inst.num_items(); ++i)
    if (covered[i]) value += inst.items[i].profit;
  return value;
}

struct FeasibilityReport {
  std::vector<std::string> violations;
  bool feasible() const { return violations.empty(); }
};

inline FeasibilityReport check_feasible(const Instance& inst,
                                        const Assignment& a) {
  FeasibilityReport report;
  if (static_cast<int>(a.target.size()) != inst.num_sets())
    throw ValidationError("assignment size does not match instance");
  std::vector<Rational> load(inst.knapsacks.size(), Rational(0));
  for (int j = 0; j < inst.num_sets(); ++j) {
    int k = a[j];
    if (k == kUnassigned) continue;
    if (k < 0 || k >= inst.num_knapsacks())
      throw ValidationError("assignment targets unknown knapsack " +
                            std::to_string(k));
    load[k] += inst.sets[j].cost;
    if (inst.sets[j].cost > inst.knapsacks[k].capacity)
      report.violations.push_back("set " + std::to_string(j) + " of cost " +
                                  rational_to_string(inst.sets[j].cost) +
                                  " does not fit knapsack " +
                                  std::to_string(k));
  }
  for (int k = 0; k < inst.num_knapsacks(); ++k) {
    if (load[k] > inst.knapsacks[k].capacity)
      report.violations.push_back(
          "knapsack " + std::to_string(k) + " overloaded: " +
          rational_to_string(load[k]) + " > " +
          rational_to_string(inst.knapsacks[k].capacity));
  }
  for (const auto& c : inst.clusters) {
    if (c.redundant) continue;
    Rational total = 0;
    for (int k : c.knapsacks) total += load[k];
    if (total > c.capacity)
      report.violations.push_back("cluster " + std::to_string(c.id) +
                                  " overloaded: " + rational_to_string(total) +
                                  " > " + rational_to_string(c.capacity));
  }
  return report;
}

/// Fractional (x, z) solution of a relaxation. x keys exist only for pairs
/// with c_j <= B_k; y is always implied as min{1, sum_j sum_k x_jk}.
struct FractionalSolution {
  std::map<std::pair<int, int>, Rational> x;  // (set, knapsack) -> value
  std::map<std::pair<int, int>, Rational> z;  // (knapsack, cluster) -> value

  Rational x_at(int j, int k) const {
    auto it = x.find({j, k});
    return it == x.end() ? Rational(0) : it->second;
  }

  /// sum_k x_jk
  Rational set_total(int j) const {
    Rational t = 0;
    for (auto it = x.lower_bound({j, 0});
         it != x.end() && it->first.first == j; ++it)
      t += it->second;
    return t;
  }

  /// sum_j c_j x_jk
  Rational knapsack_load(const Instance& inst, int k) const {
    Rational t = 0;
    for (const auto& [key, v] : x)
      if (key.second == k) t += inst.sets[key.first].cost * v;
    return t;
  }

  Rational implied_y(const Instance& inst, int item) const {
    Rational t = 0;
    for (int j : sets_containing(inst, item)) t += set_total(j);
    return t > 1 ? Rational(1) : t;
  }

  static std::vector<int> sets_containing(const Instance& inst, int item) {
    std::vector<int> out;
    for (const auto& s : inst.sets)
      if (std::binary_search(s.items.begin(), s.items.end(), item))
        out.push_back(s.id);
    return out;
  }
};

}  // namespace cluscov
