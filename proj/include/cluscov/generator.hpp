#pragma once

#include <cstdint>
#include <random>

#include "cluscov/model.hpp"

namespace cluscov {

struct GeneratorParams {
  Kind kind = Kind::MCPC;
  int num_items = 4;
  int num_sets = 4;
  int num_knapsacks = 2;
  int num_clusters = 1;
  std::uint64_t seed = 0;
  int cost_min = 1, cost_max = 10;
  int profit_min = 1, profit_max = 10;
  // Scales cluster capacities toward the tight end (max B_k) as it
  // approaches 0; 1 leaves the full (max B_k, sum B_k) band.
  double tightness = 1.0;
  bool disentangled = false;
};

/// Deterministic random instance; the result is already normalized.
/// Generated instances satisfy the model assumptions non-trivially: every
/// knapsack can hold at least one set, and non-redundant clusters have
/// max_k B_k <= U_l < sum_k B_k.
inline Instance generate_instance(const GeneratorParams& p) {
  if (p.num_items <= 0 || p.num_sets <= 0 || p.num_knapsacks <= 0 ||
      p.num_clusters <= 0)
    throw ValidationError("generator dimensions must be positive");
  if (p.num_clusters > p.num_knapsacks)
    throw ValidationError("more clusters than knapsacks");
  if (p.cost_min <= 0 || p.cost_min > p.cost_max || p.profit_min <= 0 ||
      p.profit_min > p.profit_max)
    throw ValidationError("bad cost/profit range");
  if (p.tightness <= 0.0 || p.tightness > 1.0)
    throw ValidationError("tightness must be in (0, 1]");

  bool singleton = (p.kind == Kind::MKP || p.kind == Kind::MKPC);
  bool clustered = (p.kind == Kind::MCPC || p.kind == Kind::MKPC);
  int n = p.num_items;
  int m = singleton ? p.num_items : p.num_sets;
  if (clustered && p.num_knapsacks < 2 * p.num_clusters)
    throw ValidationError(
        "non-redundant clusters need at least two knapsacks each");

  std::mt19937_64 rng(p.seed);
  auto uniform = [&rng](long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(rng);
  };

  Instance inst;
  inst.kind = p.kind;
  for (int i = 0; i < n; ++i)
    inst.items.push_back({i, Rational(uniform(p.profit_min, p.profit_max))});
  long long min_cost = p.cost_max;
  for (int j = 0; j < m; ++j) {
    CoverSet s;
    s.id = j;
    long long c = uniform(p.cost_min, p.cost_max);
    min_cost = std::min(min_cost, c);
    s.cost = Rational(c);
    if (singleton) {
      s.items = {j};
    } else {
      int size = static_cast<int>(uniform(1, std::min(n, 3)));
      std::vector<int> pool(n);
      for (int i = 0; i < n; ++i) pool[i] = i;
      for (int t = 0; t < size; ++t) {
        int pick = static_cast<int>(uniform(t, n - 1));
        std::swap(pool[t], pool[pick]);
        s.items.push_back(pool[t]);
      }
    }
    inst.sets.push_back(s);
  }

  std::vector<long long> caps;
  for (int k = 0; k < p.num_knapsacks; ++k)
    caps.push_back(uniform(min_cost, 2LL * p.cost_max));
  if (p.disentangled)
    std::sort(caps.begin(), caps.end(), std::greater<long long>());

  // Cluster sizes: each gets its minimum share, the rest spread randomly.
  int base = clustered ? 2 : 1;
  std::vector<int> size(p.num_clusters, base);
  for (int extra = p.num_knapsacks - base * p.num_clusters; extra > 0;
       --extra)
    ++size[uniform(0, p.num_clusters - 1)];

  int next = 0;
  for (int l = 0; l < p.num_clusters; ++l) {
    long long sum = 0, maxc = 0;
    std::vector<int> members;
    for (int t = 0; t < size[l]; ++t, ++next) {
      inst.knapsacks.push_back({next, Rational(caps[next]), l});
      sum += caps[next];
      maxc = std::max(maxc, caps[next]);
      members.push_back(next);
    }
    Cluster c;
    c.id = l;
    if (clustered && sum - 1 >= maxc) {
      long long band = sum - 1 - maxc;
      long long u = maxc + static_cast<long long>(p.tightness * band);
      c.capacity = Rational(std::min(std::max(u, maxc), sum - 1));
    } else {
      c.capacity = Rational(sum + 1);  // redundant
    }
    inst.clusters.push_back(c);
  }
  return validate_and_normalize(inst);
}

}  // namespace cluscov
