// Copyright 2026 The boxopt Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BOXOPT_MIP_SOLVER_HPP_
#define BOXOPT_MIP_SOLVER_HPP_

// MIP backends with a common interface.
//
// builtin: depth-first branch and bound over the carton variables z. The
//   cardinality constraint is propagated, and every node is bounded by an
//   optimistic completion: boxes producible by any still-free carton count as
//   available, and each carton cut takes the most negative free
//   coefficients the remaining budget allows. A complete z fixes every other
//   variable: y from the carton/box coupling, x as each unit's cheapest
//   available box, theta as the largest cut right-hand side.
// external: writes MPS, runs a solver command and reads its solution file.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "boxopt/error.hpp"
#include "boxopt/mip.hpp"

namespace boxopt {

enum class MipStatus { kOptimal, kInfeasible, kLimit };

inline const char* to_string(MipStatus s) {
  switch (s) {
    case MipStatus::kOptimal:
      return "OPTIMAL";
    case MipStatus::kInfeasible:
      return "INFEASIBLE";
    case MipStatus::kLimit:
      return "LIMIT";
  }
  return "?";
}

struct MipSolution {
  MipStatus status = MipStatus::kInfeasible;
  Volume objective = 0;
  std::vector<double> values;
  std::int64_t nodes = 0;
  std::string log;
};

struct SolverOptions {
  std::string backend = "builtin";
  // builtin: refuse models with more than this many carton subsets.
  std::uint64_t enumeration_cap = 1'000'000;
  // external: {mps} and {sol} are replaced by file paths.
  std::string external_command = "python3 tools/mps_milp.py {mps} {sol}";
};

// C(n, k), saturating at `cap + 1`.
inline std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k,
                                     std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  __extension__ typedef unsigned __int128 Wide;
  Wide c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(c);
}

namespace mip_solver_internal {

class StructuredSearch {
 public:
  StructuredSearch(const MipModel& m, std::uint64_t cap) : model_(m) {
    extract();
    const std::uint64_t subsets = binomial_capped(
        static_cast<std::uint64_t>(num_cartons_),
        static_cast<std::uint64_t>(std::max(budget_, 0)), cap);
    if (subsets > cap) {
      throw SizeError("builtin backend: more than " + std::to_string(cap) +
                      " carton subsets; use the external backend");
    }
  }

  MipSolution solve() {
    MipSolution sol;
    if (budget_ < 0 || budget_ > num_cartons_) {
      sol.status = MipStatus::kInfeasible;
      return sol;
    }
    std::vector<char> selected(num_cartons_, 0);
    dfs(0, 0, selected);
    sol.nodes = nodes_;
    if (!best_) {
      sol.status = MipStatus::kInfeasible;
      return sol;
    }
    sol.status = MipStatus::kOptimal;
    sol.values = materialize(*best_);
    sol.objective = model_.objective_value(sol.values);
    const auto bad = model_.violations(sol.values);
    if (!bad.empty()) {
      throw BackendError("builtin backend produced an infeasible point: " +
                         bad.front());
    }
    return sol;
  }

 private:
  struct CutRow {
    Volume s;
    std::vector<std::pair<int, Volume>> carton_terms;  // (k, w)
    std::vector<std::pair<int, Volume>> box_terms;     // (b, w)
  };
  struct Shipping {
    std::vector<std::pair<int, Volume>> options;  // (box, cost)
    std::vector<int> vars;
  };

  void extract() {
    const auto& vars = model_.variables();
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const Variable& v = vars[i];
      switch (v.role) {
        case VarRole::kCarton:
          num_cartons_ = std::max(num_cartons_, v.a + 1);
          break;
        case VarRole::kBox:
          num_boxes_ = std::max(num_boxes_, v.a + 1);
          break;
        case VarRole::kTheta:
          theta_var_ = static_cast<int>(i);
          break;
        case VarRole::kPacking:
          num_boxes_ = std::max(num_boxes_, v.b + 1);
          break;
      }
    }
    carton_var_.assign(num_cartons_, -1);
    box_var_.assign(num_boxes_, -1);
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i].role == VarRole::kCarton) carton_var_[vars[i].a] = static_cast<int>(i);
      if (vars[i].role == VarRole::kBox) box_var_[vars[i].a] = static_cast<int>(i);
    }
    producers_.assign(num_boxes_, {});
    implied_by_.assign(num_boxes_, {});
    auto role = [&](int var) { return vars[var].role; };
    for (const Constraint& c : model_.constraints()) {
      switch (c.kind) {
        case ConstraintKind::kLimitedCartons:
          budget_ = static_cast<int>(c.rhs);
          break;
        case ConstraintKind::kCartonImpliesBox: {
          int k = -1, b = -1;
          for (const Term& t : c.terms) {
            if (role(t.var) == VarRole::kCarton) k = vars[t.var].a;
            if (role(t.var) == VarRole::kBox) b = vars[t.var].a;
          }
          implied_by_.at(b).push_back(k);
          break;
        }
        case ConstraintKind::kBoxRequiresCarton: {
          int b = -1;
          std::vector<int> ks;
          for (const Term& t : c.terms) {
            if (role(t.var) == VarRole::kCarton) ks.push_back(vars[t.var].a);
            if (role(t.var) == VarRole::kBox) b = vars[t.var].a;
          }
          producers_.at(b) = std::move(ks);
          has_requires_.push_back(b);
          break;
        }
        case ConstraintKind::kFixedBox:
          fixed_boxes_.push_back(vars[c.terms.at(0).var].a);
          break;
        case ConstraintKind::kFixedBoxCoverage: {
          std::vector<int> ks;
          for (const Term& t : c.terms) ks.push_back(vars[t.var].a);
          coverage_.push_back(std::move(ks));
          break;
        }
        case ConstraintKind::kOptimalityCut: {
          CutRow row{c.rhs, {}, {}};
          for (const Term& t : c.terms) {
            if (t.var == theta_var_) continue;
            if (role(t.var) == VarRole::kCarton) {
              row.carton_terms.emplace_back(vars[t.var].a, -t.coef);
            } else {
              row.box_terms.emplace_back(vars[t.var].a, -t.coef);
            }
          }
          cuts_.push_back(std::move(row));
          break;
        }
        case ConstraintKind::kShippable: {
          Shipping s;
          for (const Term& t : c.terms) {
            s.options.emplace_back(vars[t.var].b, vars[t.var].objective);
            s.vars.push_back(t.var);
          }
          shipping_.push_back(std::move(s));
          break;
        }
        case ConstraintKind::kBoxAvailable:
          break;  // x_pb <= y_b: enforced by choosing x among available boxes
      }
    }
    // A box without a "requires carton" row is unconstrained from above.
    unconstrained_.assign(num_boxes_, 1);
    for (int b : has_requires_) unconstrained_[b] = 0;
  }

  // Lower bound over completions with `selected` fixed on [0, k) and cartons
  // [k, K) free; nullopt when no feasible completion exists. With k == K the
  // bound is the exact objective of that z.
  std::optional<Volume> evaluate(const std::vector<char>& selected, int k,
                                 int remaining) const {
    // y_lo: boxes forced by selected cartons; y_hi: producible at all.
    std::vector<char> y_lo, y_hi;
    if (num_boxes_ > 0) {
      y_lo.assign(num_boxes_, 0);
      y_hi.assign(num_boxes_, 0);
      for (int b = 0; b < num_boxes_; ++b) {
        for (int c : implied_by_[b]) {
          if (selected[c]) y_lo[b] = 1;
        }
        if (unconstrained_[b]) {
          y_hi[b] = 1;
          continue;
        }
        for (int c : producers_[b]) {
          if (selected[c] || (c >= k && remaining > 0)) {
            y_hi[b] = 1;
            break;
          }
        }
      }
      for (int b : fixed_boxes_) {
        if (!y_hi[b]) return std::nullopt;
      }
    }
    for (const auto& cover : coverage_) {
      bool ok = false;
      for (int c : cover) {
        if (selected[c] || (c >= k && remaining > 0)) ok = true;
      }
      if (!ok) return std::nullopt;
    }
    Volume objective = 0;
    if (theta_var_ >= 0) {
      Volume theta = static_cast<Volume>(model_.variables()[theta_var_].lower);
      std::vector<Volume> free_w;
      for (const CutRow& cut : cuts_) {
        Volume v = cut.s;
        free_w.clear();
        for (const auto& [c, w] : cut.carton_terms) {
          if (c < k) {
            if (selected[c]) v += w;
          } else {
            free_w.push_back(w);
          }
        }
        if (remaining > 0) {
          // Unlisted free cartons have coefficient 0.
          const std::size_t free_count = static_cast<std::size_t>(num_cartons_ - k);
          free_w.resize(free_count, 0);
          std::partial_sort(free_w.begin(), free_w.begin() + remaining,
                            free_w.end());
          for (int i = 0; i < remaining; ++i) v += free_w[i];
        }
        for (const auto& [b, w] : cut.box_terms) {
          v += std::min(w * y_lo[b], w * y_hi[b]);
        }
        theta = std::max(theta, v);
      }
      objective += theta;
    }
    for (const Shipping& s : shipping_) {
      Volume best = std::numeric_limits<Volume>::max();
      for (const auto& [b, cost] : s.options) {
        if (y_hi[b]) best = std::min(best, cost);
      }
      if (best == std::numeric_limits<Volume>::max()) return std::nullopt;
      objective += best;
    }
    return objective;
  }

  void dfs(int k, int chosen, std::vector<char>& selected) {
    ++nodes_;
    const int remaining = budget_ - chosen;
    if (remaining < 0 || remaining > num_cartons_ - k) return;
    if (remaining == 0) {
      // Every other carton is excluded.
      const auto value = evaluate(selected, num_cartons_, 0);
      if (value && (!best_value_ || *value < *best_value_)) {
        best_value_ = value;
        best_ = selected;
      }
      return;
    }
    const auto bound = evaluate(selected, k, remaining);
    if (!bound || (best_value_ && *bound >= *best_value_)) return;
    selected[k] = 1;
    dfs(k + 1, chosen + 1, selected);
    selected[k] = 0;
    dfs(k + 1, chosen, selected);
  }

  std::vector<double> materialize(const std::vector<char>& selected) const {
    const auto& vars = model_.variables();
    std::vector<double> values(vars.size(), 0.0);
    std::vector<char> y(num_boxes_, 0);
    for (int b = 0; b < num_boxes_; ++b) {
      if (unconstrained_[b]) y[b] = 1;
      for (int c : producers_[b]) {
        if (selected[c]) y[b] = 1;
      }
    }
    for (int k = 0; k < num_cartons_; ++k) {
      if (carton_var_[k] >= 0) values[carton_var_[k]] = selected[k];
    }
    for (int b = 0; b < num_boxes_; ++b) {
      if (box_var_[b] >= 0) values[box_var_[b]] = y[b];
    }
    for (const Shipping& s : shipping_) {
      int pick = -1;
      Volume best = std::numeric_limits<Volume>::max();
      for (std::size_t i = 0; i < s.options.size(); ++i) {
        const auto& [b, cost] = s.options[i];
        if (y[b] && cost < best) {
          best = cost;
          pick = s.vars[i];
        }
      }
      if (pick >= 0) values[pick] = 1.0;
    }
    if (theta_var_ >= 0) {
      Volume theta = static_cast<Volume>(vars[theta_var_].lower);
      for (const CutRow& cut : cuts_) {
        Volume v = cut.s;
        for (const auto& [c, w] : cut.carton_terms) v += selected[c] ? w : 0;
        for (const auto& [b, w] : cut.box_terms) v += y[b] ? w : 0;
        theta = std::max(theta, v);
      }
      values[theta_var_] = static_cast<double>(theta);
    }
    return values;
  }

  const MipModel& model_;
  int num_cartons_ = 0;
  int num_boxes_ = 0;
  int theta_var_ = -1;
  int budget_ = 0;
  std::vector<int> carton_var_, box_var_;
  std::vector<std::vector<int>> producers_, implied_by_, coverage_;
  std::vector<int> has_requires_, fixed_boxes_;
  std::vector<char> unconstrained_;
  std::vector<CutRow> cuts_;
  std::vector<Shipping> shipping_;
  std::int64_t nodes_ = 0;
  std::optional<Volume> best_value_;
  std::optional<std::vector<char>> best_;
};

inline std::string replace_all(std::string s, const std::string& from,
                               const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

inline std::string quote(const std::string& path) {
  return "'" + replace_all(path, "'", "'\\''") + "'";
}

// Solution file: "status <OPTIMAL|INFEASIBLE|LIMIT>", "objective <v>", then
// "<column> <value>" lines.
inline MipSolution read_solution(std::istream& in, const MipModel& m) {
  MipSolution sol;
  sol.values.assign(m.variables().size(), 0.0);
  std::string key;
  bool have_status = false;
  while (in >> key) {
    if (key == "status") {
      std::string s;
      in >> s;
      have_status = true;
      if (s == "OPTIMAL") {
        sol.status = MipStatus::kOptimal;
      } else if (s == "INFEASIBLE") {
        sol.status = MipStatus::kInfeasible;
      } else {
        sol.status = MipStatus::kLimit;
      }
    } else if (key == "objective") {
      double v;
      in >> v;
    } else if (key.size() == 8 && key[0] == 'C') {
      double v;
      in >> v;
      const std::size_t j = std::stoul(key.substr(1));
      if (j >= sol.values.size()) {
        throw BackendError("solution references unknown column " + key);
      }
      sol.values[j] = v;
    } else {
      throw BackendError("unexpected token in solution file: " + key);
    }
  }
  if (!have_status) throw BackendError("solution file has no status line");
  if (sol.status == MipStatus::kOptimal) {
    for (std::size_t j = 0; j < sol.values.size(); ++j) {
      if (m.variables()[j].type == VarType::kBinary) {
        sol.values[j] = std::round(sol.values[j]);
      }
    }
    sol.objective = m.objective_value(sol.values);
  }
  return sol;
}

inline MipSolution solve_external(const MipModel& m,
                                  const SolverOptions& opts) {
  namespace fs = std::filesystem;
  std::random_device rd;
  const fs::path dir = fs::temp_directory_path() /
                       ("boxopt-" + std::to_string(rd()) + "-" +
                        std::to_string(rd()));
  fs::create_directories(dir);
  const fs::path mps = dir / "model.mps";
  const fs::path sol = dir / "model.sol";
  const fs::path log = dir / "solver.log";
  {
    std::ofstream out(mps);
    write_mps(m, out);
  }
  std::string cmd = replace_all(opts.external_command, "{mps}", quote(mps.string()));
  cmd = replace_all(cmd, "{sol}", quote(sol.string()));
  cmd += " > " + quote(log.string()) + " 2>&1";
  const int rc = std::system(cmd.c_str());
  std::string captured;
  {
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    captured = ss.str();
  }
  if (rc != 0) {
    fs::remove_all(dir);
    throw BackendError("external solver failed (exit status " +
                       std::to_string(rc) + "): " + captured);
  }
  std::ifstream in(sol);
  if (!in) {
    fs::remove_all(dir);
    throw BackendError("external solver wrote no solution file: " + captured);
  }
  MipSolution result = read_solution(in, m);
  result.log = captured;
  fs::remove_all(dir);
  return result;
}

}  // namespace mip_solver_internal

inline MipSolution solve_mip(const MipModel& m, const SolverOptions& opts = {}) {
  if (opts.backend == "builtin") {
    return mip_solver_internal::StructuredSearch(m, opts.enumeration_cap).solve();
  }
  if (opts.backend == "external") {
    return mip_solver_internal::solve_external(m, opts);
  }
  throw ConfigError("unknown MIP backend '" + opts.backend + "'");
}

}  // namespace boxopt

#endif  // BOXOPT_MIP_SOLVER_HPP_
