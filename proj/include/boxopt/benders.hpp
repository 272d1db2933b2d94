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

#ifndef BOXOPT_BENDERS_HPP_
#define BOXOPT_BENDERS_HPP_

// Benders iteration: the master proposes cartons z, y(z) is validated by the
// analytic sub-problem, and its duals come back as an optimality cut.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boxopt/bit_matrix.hpp"
#include "boxopt/error.hpp"
#include "boxopt/geometry.hpp"
#include "boxopt/master.hpp"
#include "boxopt/mip_solver.hpp"
#include "boxopt/subproblem.hpp"

namespace boxopt {

enum class BendersMode { kXY, kX };

inline const char* to_string(BendersMode m) {
  return m == BendersMode::kXY ? "benders-xy" : "benders-x";
}

struct BendersInstance {
  const BitMatrix& fit;
  std::span<const Volume> box_volumes;
  std::span<const Volume> unit_volumes;
  const RelTable& rel;
  std::span<const Volume> carton_volumes;
};

struct BendersConfig {
  ProblemConfig problem;
  double tol = 1e-6;
  int max_iter = 100;
  double time_limit = std::numeric_limits<double>::infinity();  // seconds
  SolverOptions solver;
  std::size_t threads = 1;
};

struct IterationRecord {
  int iteration = 0;
  Volume theta = 0;      // master bound proposed at this iteration
  Volume f = 0;          // sub-problem value of the proposal
  Volume incumbent = 0;  // best f so far
  double elapsed = 0.0;  // seconds since start
};

struct BendersResult {
  CartonSelection best_z;
  Availability best_y;
  Volume incumbent = 0;
  Volume theta = 0;  // best lower bound
  double gap = 0.0;
  std::vector<IterationRecord> iterations;
  std::string termination;
  CutPool pool;
};

inline double relative_gap(Volume incumbent, Volume theta) {
  if (incumbent <= 0) return 0.0;
  return std::max(0.0, static_cast<double>(incumbent - theta) /
                           static_cast<double>(incumbent));
}

// Feasible starting selection: cover the fixed boxes greedily (most
// uncovered boxes first, then larger carton), then fill up to M with the
// largest remaining cartons. nullopt when the cover needs more than M.
inline std::optional<CartonSelection> greedy_seed(
    const RelTable& rel, std::span<const Volume> carton_volumes,
    const std::vector<int>& fixed, int budget) {
  const int cartons = rel.num_cartons();
  CartonSelection z(cartons);
  std::vector<char> covered(rel.num_boxes(), 0);
  int chosen = 0;
  auto better = [&](int a, int b) {
    if (carton_volumes[a] != carton_volumes[b]) {
      return carton_volumes[a] > carton_volumes[b];
    }
    return a < b;
  };
  for (;;) {
    int pick = -1;
    int pick_gain = 0;
    for (int k = 0; k < cartons; ++k) {
      if (z.get(k)) continue;
      int gain = 0;
      for (int b : fixed) {
        if (covered[b]) continue;
        const auto& ks = rel.cartons_of(b);
        gain += std::find(ks.begin(), ks.end(), k) != ks.end();
      }
      if (gain > pick_gain || (gain == pick_gain && gain > 0 && better(k, pick))) {
        pick = k;
        pick_gain = gain;
      }
    }
    if (pick < 0) break;
    z.set(pick);
    ++chosen;
    for (int b : rel.boxes_of(pick)) covered[b] = 1;
  }
  for (int b : fixed) {
    if (!covered[b]) return std::nullopt;
  }
  if (chosen > budget) return std::nullopt;
  std::vector<int> order(cartons);
  for (int k = 0; k < cartons; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), better);
  for (int k : order) {
    if (chosen >= budget) break;
    if (!z.get(k)) {
      z.set(k);
      ++chosen;
    }
  }
  if (chosen != budget) return std::nullopt;
  return z;
}

inline BendersResult benders_loop(const BendersInstance& inst, BendersMode mode,
                                  const BendersConfig& cfg) {
  cfg.problem.validate();
  if (cfg.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (inst.carton_volumes.size() != static_cast<std::size_t>(inst.rel.num_cartons())) {
    throw DomainError("carton volumes do not match REL");
  }
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };
  const std::vector<int> fixed = fixed_box_set(cfg.problem, inst.rel.num_boxes());

  BendersResult result;
  bool have_incumbent = false;

  // Sub-problem at z; adds the cut and updates the incumbent. Returns f.
  auto validate = [&](const CartonSelection& z, int iteration) {
    const Availability y = expand_cartons_to_boxes(z, inst.rel);
    DualSolution d;
    try {
      d = fast_dual(inst.fit, inst.box_volumes, inst.unit_volumes, y, cfg.threads);
    } catch (const InfeasibleError& e) {
      throw Error(std::string("sub-problem infeasible for a master proposal "
                              "(every unit must fit a fixed box): ") +
                  e.what());
    }
    result.pool.add(mode == BendersMode::kXY
                        ? transform_cut(d, z, inst.rel, iteration)
                        : make_box_cut(d, y, iteration));
    if (!have_incumbent || d.f < result.incumbent) {
      result.incumbent = d.f;
      result.best_z = z;
      result.best_y = y;
      have_incumbent = true;
    }
    return d.f;
  };

  if (const auto seed = greedy_seed(inst.rel, inst.carton_volumes, fixed,
                                    cfg.problem.cartons)) {
    const Volume f = validate(*seed, 0);
    result.iterations.push_back({0, 0, f, result.incumbent, elapsed()});
  }

  result.termination = "max_iterations";
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const MipModel master = mode == BendersMode::kXY
                                ? build_master_xy(result.pool, inst.rel, cfg.problem)
                                : build_master_x(result.pool, inst.rel, cfg.problem);
    const MipSolution sol = solve_mip(master, cfg.solver);
    if (sol.status == MipStatus::kInfeasible) {
      throw InfeasibleError("master problem infeasible: no " +
                            std::to_string(cfg.problem.cartons) +
                            " cartons cover the fixed boxes");
    }
    if (sol.status == MipStatus::kLimit) {
      result.termination = "solver_limit";
      break;
    }
    CartonSelection z(inst.rel.num_cartons());
    const auto& vars = master.variables();
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (vars[j].role == VarRole::kCarton && sol.values[j] > 0.5) z.set(vars[j].a);
    }
    result.theta = std::max(result.theta, sol.objective);
    const Volume f = validate(z, it);
    result.iterations.push_back({it, sol.objective, f, result.incumbent, elapsed()});
    result.gap = relative_gap(result.incumbent, result.theta);
    if (result.gap <= cfg.tol) {
      result.termination = "converged";
      break;
    }
    if (elapsed() >= cfg.time_limit) {
      result.termination = "time_limit";
      break;
    }
  }
  result.gap = relative_gap(result.incumbent, result.theta);
  return result;
}

}  // namespace boxopt

#endif  // BOXOPT_BENDERS_HPP_
