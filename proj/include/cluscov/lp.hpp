#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cluscov/model.hpp"

namespace cluscov {

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Maximization LP over variables with lower bound 0; all constraints are
/// sparse <= rows. Optional upper bounds become explicit rows at solve time.
struct LinearProgram {
  struct Row {
    std::vector<std::pair<int, Rational>> coeffs;
    Rational rhs;
  };

  std::vector<std::string> var_names;
  std::vector<std::optional<Rational>> upper;
  std::vector<Rational> objective;
  std::vector<Row> rows;

  int add_variable(const std::string& name,
                   std::optional<Rational> upper_bound = std::nullopt) {
    var_names.push_back(name);
    upper.push_back(std::move(upper_bound));
    objective.push_back(Rational(0));
    return static_cast<int>(var_names.size()) - 1;
  }

  void add_row(std::vector<std::pair<int, Rational>> coeffs, Rational rhs) {
    for (const auto& [v, c] : coeffs) {
      if (v < 0 || v >= static_cast<int>(var_names.size()))
        throw ValidationError("constraint references undeclared variable");
      (void)c;
    }
    rows.push_back({std::move(coeffs), std::move(rhs)});
  }

  int num_vars() const { return static_cast<int>(var_names.size()); }
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Rational> values;
  Rational objective_value;
};

namespace detail {

// Dense tableau simplex with Bland's pivot rule over exact rationals.
class SimplexTableau {
 public:
  SimplexTableau(int num_rows, int num_cols)
      : a_(num_rows, std::vector<Rational>(num_cols, Rational(0))),
        b_(num_rows, Rational(0)),
        basis_(num_rows, -1),
        num_cols_(num_cols) {}

  std::vector<std::vector<Rational>> a_;
  std::vector<Rational> b_;
  std::vector<int> basis_;
  int num_cols_;

  int rows() const { return static_cast<int>(a_.size()); }
  int cols() const { return num_cols_; }

  void pivot(int pr, int pc) {
    Rational piv = a_[pr][pc];
    for (auto& v : a_[pr]) v /= piv;
    b_[pr] /= piv;
    for (int i = 0; i < rows(); ++i) {
      if (i == pr || a_[i][pc] == 0) continue;
      Rational f = a_[i][pc];
      for (int c = 0; c < cols(); ++c) a_[i][c] -= f * a_[pr][c];
      b_[i] -= f * b_[pr];
    }
    basis_[pr] = pc;
  }

  // Maximizes reduced-cost row `red` (already priced out over the current
  // basis); `allowed[c]` gates entering columns. Returns false on
  // unboundedness. `value` accumulates the objective shift.
  bool run(std::vector<Rational>& red, Rational& value,
           const std::vector<bool>& allowed) {
    for (;;) {
      int enter = -1;
      for (int c = 0; c < cols(); ++c) {
        if (allowed[c] && red[c] > 0) {
          enter = c;
          break;  // Bland: lowest index
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (int i = 0; i < rows(); ++i) {
        if (a_[i][enter] <= 0) continue;
        Rational ratio = b_[i] / a_[i][enter];
        if (leave < 0 || ratio < best ||
            (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      Rational f = red[enter];
      pivot(leave, enter);
      for (int c = 0; c < cols(); ++c) red[c] -= f * a_[leave][c];
      value += f * b_[leave];
    }
  }
};

}  // namespace detail

/// Two-phase primal simplex with Bland's rule; exact rational arithmetic,
/// deterministic, returns a basic optimal solution.
inline LpSolution solve_lp(const LinearProgram& lp) {
  // Materialize upper bounds as rows.
  std::vector<LinearProgram::Row> rows = lp.rows;
  for (int v = 0; v < lp.num_vars(); ++v)
    if (lp.upper[v]) rows.push_back({{{v, Rational(1)}}, *lp.upper[v]});

  int m = static_cast<int>(rows.size());
  int n = lp.num_vars();
  int num_art = 0;
  for (const auto& r : rows)
    if (r.rhs < 0) ++num_art;

  detail::SimplexTableau t(m, n + m + num_art);
  int art = n + m;
  std::vector<int> art_cols;
  for (int i = 0; i < m; ++i) {
    for (const auto& [v, c] : rows[i].coeffs) t.a_[i][v] += c;
    t.a_[i][n + i] = 1;  // slack
    t.b_[i] = rows[i].rhs;
    if (t.b_[i] < 0) {
      for (auto& v : t.a_[i]) v = -v;
      t.b_[i] = -t.b_[i];
      t.a_[i][art] = 1;
      t.basis_[i] = art;
      art_cols.push_back(art);
      ++art;
    } else {
      t.basis_[i] = n + i;
    }
  }

  std::vector<bool> allowed(t.cols(), true);
  LpSolution out;

  if (num_art > 0) {
    // Phase 1: maximize -(sum of artificials).
    std::vector<Rational> red(t.cols(), Rational(0));
    Rational value = 0;
    for (int c : art_cols) red[c] = -1;
    for (int i = 0; i < m; ++i) {
      if (red[t.basis_[i]] == 0) continue;
      Rational f = red[t.basis_[i]];
      for (int c = 0; c < t.cols(); ++c) red[c] -= f * t.a_[i][c];
      value += f * t.b_[i];
    }
    if (!t.run(red, value, allowed))
      throw InvariantViolation("phase-1 objective is bounded by zero");
    if (value < 0) {
      out.status = LpStatus::Infeasible;
      return out;
    }
    // Pivot zero-valued artificials out of the basis.
    for (int i = 0; i < m; ++i) {
      if (t.basis_[i] < n + m) continue;
      int pc = -1;
      for (int c = 0; c < n + m; ++c)
        if (t.a_[i][c] != 0) {
          pc = c;
          break;
        }
      if (pc >= 0) t.pivot(i, pc);
      // else: redundant row, the artificial stays basic at value 0 and its
      // column is banned below, so it can never become positive.
    }
    for (int c : art_cols) allowed[c] = false;
  }

  // Phase 2.
  std::vector<Rational> red(t.cols(), Rational(0));
  Rational value = 0;
  for (int v = 0; v < n; ++v) red[v] = lp.objective[v];
  for (int i = 0; i < m; ++i) {
    if (red[t.basis_[i]] == 0) continue;
    Rational f = red[t.basis_[i]];
    for (int c = 0; c < t.cols(); ++c) red[c] -= f * t.a_[i][c];
    value += f * t.b_[i];
  }
  if (!t.run(red, value, allowed)) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  out.status = LpStatus::Optimal;
  out.values.assign(n, Rational(0));
  for (int i = 0; i < m; ++i)
    if (t.basis_[i] < n) out.values[t.basis_[i]] = t.b_[i];
  out.objective_value = 0;
  for (int v = 0; v < n; ++v)
    out.objective_value += lp.objective[v] * out.values[v];
  if (out.objective_value != value)
    throw InvariantViolation("simplex objective accounting mismatch");
  for (const auto& r : rows) {
    Rational lhs = 0;
    for (const auto& [v, c] : r.coeffs) lhs += c * out.values[v];
    if (lhs > r.rhs)
      throw InvariantViolation("simplex returned an infeasible point");
  }
  return out;
}

/// CPLEX-style text dump for external cross-checking.
inline std::string dump_lp(const LinearProgram& lp) {
  std::ostringstream os;
  os << "Maximize\n obj:";
  for (int v = 0; v < lp.num_vars(); ++v)
    if (lp.objective[v] != 0)
      os << " + " << rational_to_string(lp.objective[v]) << " "
         << lp.var_names[v];
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    os << " c" << i << ":";
    for (const auto& [v, c] : lp.rows[i].coeffs)
      os << " + " << rational_to_string(c) << " " << lp.var_names[v];
    os << " <= " << rational_to_string(lp.rows[i].rhs) << "\n";
  }
  os << "Bounds\n";
  for (int v = 0; v < lp.num_vars(); ++v) {
    os << " 0 <= " << lp.var_names[v];
    if (lp.upper[v]) os << " <= " << rational_to_string(*lp.upper[v]);
    os << "\n";
  }
  os << "End\n";
  return os.str();
}

/// The MCPK relaxation with per-knapsack effective capacities. Variables
/// x_jk exist only where c_j <= B_k, judged against the instance capacity,
/// not the effective one: a set barred from a knapsack outright is different
/// from a knapsack with reduced budget.
struct McpkLp {
  LinearProgram lp;
  std::map<std::pair<int, int>, int> x_index;  // (set, knapsack) -> var
  std::vector<int> y_index;                    // item -> var

  FractionalSolution extract(const LpSolution& sol) const {
    FractionalSolution f;
    for (const auto& [key, v] : x_index) f.x[key] = sol.values[v];
    return f;
  }
};

inline McpkLp build_mcpk_lp(const Instance& inst,
                            const std::vector<Rational>& effective_capacity) {
  McpkLp out;
  for (int j = 0; j < inst.num_sets(); ++j)
    for (int k = 0; k < inst.num_knapsacks(); ++k)
      if (inst.sets[j].cost <= inst.knapsacks[k].capacity)
        out.x_index[{j, k}] = out.lp.add_variable(
            "x_" + std::to_string(j) + "_" + std::to_string(k));
  for (int i = 0; i < inst.num_items(); ++i)
    out.y_index.push_back(
        out.lp.add_variable("y_" + std::to_string(i), Rational(1)));

  for (int k = 0; k < inst.num_knapsacks(); ++k) {
    std::vector<std::pair<int, Rational>> row;
    for (int j = 0; j < inst.num_sets(); ++j) {
      auto it = out.x_index.find({j, k});
      if (it != out.x_index.end()) row.emplace_back(it->second, inst.sets[j].cost);
    }
    out.lp.add_row(std::move(row), effective_capacity.at(k));
  }
  for (int j = 0; j < inst.num_sets(); ++j) {
    std::vector<std::pair<int, Rational>> row;
    for (int k = 0; k < inst.num_knapsacks(); ++k) {
      auto it = out.x_index.find({j, k});
      if (it != out.x_index.end()) row.emplace_back(it->second, Rational(1));
    }
    out.lp.add_row(std::move(row), Rational(1));
  }
  for (int i = 0; i < inst.num_items(); ++i) {
    // y_i - sum_{j in S(i)} sum_k x_jk <= 0
    std::vector<std::pair<int, Rational>> row;
    row.emplace_back(out.y_index[i], Rational(1));
    for (int j : FractionalSolution::sets_containing(inst, i))
      for (int k = 0; k < inst.num_knapsacks(); ++k) {
        auto it = out.x_index.find({j, k});
        if (it != out.x_index.end()) row.emplace_back(it->second, Rational(-1));
      }
    out.lp.add_row(std::move(row), Rational(0));
    out.lp.objective[out.y_index[i]] = inst.items[i].profit;
  }
  return out;
}

/// The full joint (x, z) relaxation with cluster fraction variables; used
/// for cross-checking the closed-form z*. Redundant clusters carry no
/// cluster rows.
struct JointLp {
  LinearProgram lp;
  std::map<std::pair<int, int>, int> x_index;  // (set, knapsack)
  std::vector<int> y_index;
  std::map<int, int> z_index;  // knapsack -> var (cluster is implied)
};

inline JointLp build_joint_lp(const Instance& inst) {
  std::vector<Rational> caps;
  for (const auto& k : inst.knapsacks) caps.push_back(k.capacity);
  McpkLp base = build_mcpk_lp(inst, caps);
  JointLp out;
  out.lp = std::move(base.lp);
  out.x_index = std::move(base.x_index);
  out.y_index = std::move(base.y_index);
  for (const auto& c : inst.clusters) {
    if (c.redundant) continue;
    std::vector<std::pair<int, Rational>> sum_row;
    for (int k : c.knapsacks) {
      int zv = out.lp.add_variable("z_" + std::to_string(k) + "_" +
                                   std::to_string(c.id));
      out.z_index[k] = zv;
      // sum_j c_j x_jk - U_l z_kl <= 0
      std::vector<std::pair<int, Rational>> row;
      for (int j = 0; j < inst.num_sets(); ++j) {
        auto it = out.x_index.find({j, k});
        if (it != out.x_index.end())
          row.emplace_back(it->second, inst.sets[j].cost);
      }
      row.emplace_back(zv, -c.capacity);
      out.lp.add_row(std::move(row), Rational(0));
      sum_row.emplace_back(zv, Rational(1));
    }
    out.lp.add_row(std::move(sum_row), Rational(1));
  }
  return out;
}

}  // namespace cluscov
