#pragma once

// Shared test-only utilities: the worked two-knapsack fixture and a sampler
// for random feasible fractional solutions.

#include <random>

#include "cluscov/mcpc.hpp"
#include "cluscov/model.hpp"

namespace cluscov::testing {

/// One cluster U=3 over knapsacks B=[2,2]; singleton sets of cost 2 with
/// profits 4 and 2. Small enough to trace by hand, rich enough to exercise
/// splitting, the critical knapsack, and the matched decomposition.
inline Instance e1_fixture() {
  Instance inst;
  inst.kind = Kind::MKPC;
  inst.items = {{0, Rational(4)}, {1, Rational(2)}};
  inst.sets = {{0, Rational(2), {0}}, {1, Rational(2), {1}}};
  inst.knapsacks = {{0, Rational(2), 0}, {1, Rational(2), 0}};
  inst.clusters = {{0, Rational(3), {}, false}};
  return validate_and_normalize(inst);
}

/// Random x with exact rational entries satisfying sum_k x_jk <= 1 per set
/// and sum_j c_j x_jk <= capacity[k] per knapsack (columns scaled down when
/// overloaded, which preserves the per-set bound).
inline FractionalSolution sample_fractional(
    const Instance& inst, const std::vector<Rational>& capacity,
    std::mt19937_64& rng) {
  FractionalSolution f;
  std::uniform_int_distribution<int> numer(0, 16);
  for (int j = 0; j < inst.num_sets(); ++j) {
    Rational total = 0;
    for (int k = 0; k < inst.num_knapsacks(); ++k) {
      if (inst.sets[j].cost > inst.knapsacks[k].capacity) continue;
      Rational v(numer(rng), 16);
      if (v == 0) continue;
      f.x[{j, k}] = v;
      total += v;
    }
    if (total > 1)
      for (auto& [key, v] : f.x)
        if (key.first == j) v /= total;
  }
  for (int k = 0; k < inst.num_knapsacks(); ++k) {
    Rational load = f.knapsack_load(inst, k);
    if (load <= capacity[k]) continue;
    Rational scale = capacity[k] / load;
    for (auto& [key, v] : f.x)
      if (key.second == k) v *= scale;
  }
  return f;
}

inline std::vector<Rational> full_capacities(const Instance& inst) {
  std::vector<Rational> caps;
  for (const auto& k : inst.knapsacks) caps.push_back(k.capacity);
  return caps;
}

}  // namespace cluscov::testing
