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

#ifndef BOXOPT_MASTER_HPP_
#define BOXOPT_MASTER_HPP_

// The three formulations of carton selection:
//
//   direct      min sum C_pb x_pb over x, y, z with every coupling constraint
//   benders-x   min theta over y, z; x moved into the sub-problem
//   benders-xy  min theta over z; x and y moved into the sub-problem

#include <algorithm>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "boxopt/bit_matrix.hpp"
#include "boxopt/error.hpp"
#include "boxopt/geometry.hpp"
#include "boxopt/mip.hpp"
#include "boxopt/subproblem.hpp"

namespace boxopt {

struct ProblemConfig {
  int cartons = 8;                // M
  std::vector<int> fixed_boxes;   // F; the largest box is always added
  std::size_t direct_cap = 100'000;  // max P * B for the direct model

  void validate() const {
    if (cartons < 1) throw ConfigError("carton budget M must be >= 1");
  }
};

// Sorted, deduplicated fixed boxes including the largest box (id B - 1).
inline std::vector<int> fixed_box_set(const ProblemConfig& cfg, int num_boxes) {
  if (num_boxes < 1) throw ConfigError("no boxes");
  std::vector<int> f = cfg.fixed_boxes;
  f.push_back(num_boxes - 1);
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  for (int b : f) {
    if (b < 0 || b >= num_boxes) {
      throw ConfigError("fixed box " + std::to_string(b) + " out of range");
    }
  }
  return f;
}

namespace master_internal {

inline Variable theta_variable() {
  Variable v;
  v.name = "theta";
  v.type = VarType::kContinuous;
  v.role = VarRole::kTheta;
  v.lower = 0.0;
  v.upper = std::numeric_limits<double>::infinity();
  v.objective = 1;
  return v;
}

inline Variable carton_variable(int k) {
  Variable v;
  v.name = "z[" + std::to_string(k) + "]";
  v.role = VarRole::kCarton;
  v.a = k;
  return v;
}

inline Variable box_variable(int b) {
  Variable v;
  v.name = "y[" + std::to_string(b) + "]";
  v.role = VarRole::kBox;
  v.a = b;
  return v;
}

inline void add_limited(MipModel& m, const std::vector<int>& z, int cartons) {
  Constraint c{"limited_cartons", ConstraintKind::kLimitedCartons, {},
               Sense::kEqual, cartons};
  for (int var : z) c.terms.push_back({var, 1});
  m.add_constraint(std::move(c));
}

// z_k <= y_b per REL pair, sum z_k >= y_b per box, y_b = 1 for fixed boxes.
inline void add_coupling(MipModel& m, const RelTable& rel,
                         const std::vector<int>& y, const std::vector<int>& z,
                         const std::vector<int>& fixed) {
  for (const auto& [k, b] : rel.pairs()) {
    m.add_constraint({"carton_implies_box[" + std::to_string(k) + "," +
                          std::to_string(b) + "]",
                      ConstraintKind::kCartonImpliesBox,
                      {{z[k], 1}, {y[b], -1}},
                      Sense::kLessEqual,
                      0});
  }
  for (int b = 0; b < rel.num_boxes(); ++b) {
    Constraint c{"box_requires_carton[" + std::to_string(b) + "]",
                 ConstraintKind::kBoxRequiresCarton, {}, Sense::kGreaterEqual, 0};
    for (int k : rel.cartons_of(b)) c.terms.push_back({z[k], 1});
    c.terms.push_back({y[b], -1});
    m.add_constraint(std::move(c));
  }
  for (int b : fixed) {
    if (rel.cartons_of(b).empty()) {
      throw ConfigError("fixed box " + std::to_string(b) +
                        " is produced by no carton");
    }
    m.add_constraint({"fixed_box[" + std::to_string(b) + "]",
                      ConstraintKind::kFixedBox, {{y[b], 1}}, Sense::kEqual, 1});
  }
}

}  // namespace master_internal

inline MipModel build_direct(const BitMatrix& fit,
                             std::span<const Volume> box_volumes,
                             std::span<const Volume> unit_volumes,
                             const RelTable& rel, const ProblemConfig& cfg) {
  using namespace master_internal;
  cfg.validate();
  const std::size_t units = fit.rows();
  const std::size_t boxes = fit.cols();
  if (boxes != box_volumes.size() || units != unit_volumes.size() ||
      boxes != static_cast<std::size_t>(rel.num_boxes())) {
    throw DomainError("direct model inputs disagree in size");
  }
  if (units * boxes > cfg.direct_cap) {
    throw SizeError("direct model needs " + std::to_string(units * boxes) +
                    " packing pairs, cap is " + std::to_string(cfg.direct_cap) +
                    "; use --mode benders-xy or benders-x");
  }
  const std::vector<int> fixed = fixed_box_set(cfg, static_cast<int>(boxes));
  MipModel m(ModelKind::kDirect);
  std::vector<std::vector<int>> x(units);
  for (std::size_t p = 0; p < units; ++p) {
    for_each_set_bit(fit.row(p), [&](std::size_t b) {
      Variable v;
      v.name = "x[" + std::to_string(p) + "," + std::to_string(b) + "]";
      v.role = VarRole::kPacking;
      v.a = static_cast<int>(p);
      v.b = static_cast<int>(b);
      v.objective = box_volumes[b] - unit_volumes[p];
      x[p].push_back(m.add_variable(std::move(v)));
    });
  }
  std::vector<int> y(boxes), z(rel.num_cartons());
  for (std::size_t b = 0; b < boxes; ++b) {
    y[b] = m.add_variable(box_variable(static_cast<int>(b)));
  }
  for (int k = 0; k < rel.num_cartons(); ++k) {
    z[k] = m.add_variable(carton_variable(k));
  }
  for (std::size_t p = 0; p < units; ++p) {
    Constraint c{"shippable[" + std::to_string(p) + "]",
                 ConstraintKind::kShippable, {}, Sense::kEqual, 1};
    for (int var : x[p]) c.terms.push_back({var, 1});
    m.add_constraint(std::move(c));
  }
  for (std::size_t p = 0; p < units; ++p) {
    for (int var : x[p]) {
      const int b = m.variables()[var].b;
      m.add_constraint({"box_available[" + std::to_string(p) + "," +
                            std::to_string(b) + "]",
                        ConstraintKind::kBoxAvailable,
                        {{var, 1}, {y[b], -1}},
                        Sense::kLessEqual,
                        0});
    }
  }
  add_coupling(m, rel, y, z, fixed);
  add_limited(m, z, cfg.cartons);
  return m;
}

// Cuts are over cartons (see transform_cut).
inline MipModel build_master_xy(const CutPool& pool, const RelTable& rel,
                                const ProblemConfig& cfg) {
  using namespace master_internal;
  cfg.validate();
  const std::vector<int> fixed = fixed_box_set(cfg, rel.num_boxes());
  MipModel m(ModelKind::kMasterXY);
  std::vector<int> z(rel.num_cartons());
  for (int k = 0; k < rel.num_cartons(); ++k) {
    z[k] = m.add_variable(carton_variable(k));
  }
  const int theta = m.add_variable(theta_variable());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Cut& cut = pool.cuts()[i];
    if (cut.w.size() != z.size()) {
      throw DomainError("carton cut has wrong dimension");
    }
    Constraint c{"cut[" + std::to_string(i) + "]",
                 ConstraintKind::kOptimalityCut, {{theta, 1}},
                 Sense::kGreaterEqual, cut.s};
    for (std::size_t k = 0; k < z.size(); ++k) {
      if (cut.w[k] != 0) c.terms.push_back({z[k], -cut.w[k]});
    }
    m.add_constraint(std::move(c));
  }
  add_limited(m, z, cfg.cartons);
  for (int b : fixed) {
    if (rel.cartons_of(b).empty()) {
      throw ConfigError("fixed box " + std::to_string(b) +
                        " is produced by no carton");
    }
    Constraint c{"fixed_box_coverage[" + std::to_string(b) + "]",
                 ConstraintKind::kFixedBoxCoverage, {}, Sense::kGreaterEqual, 1};
    for (int k : rel.cartons_of(b)) c.terms.push_back({z[k], 1});
    m.add_constraint(std::move(c));
  }
  return m;
}

// Cuts are over boxes (see make_box_cut).
inline MipModel build_master_x(const CutPool& pool, const RelTable& rel,
                               const ProblemConfig& cfg) {
  using namespace master_internal;
  cfg.validate();
  const std::vector<int> fixed = fixed_box_set(cfg, rel.num_boxes());
  MipModel m(ModelKind::kMasterX);
  std::vector<int> y(rel.num_boxes()), z(rel.num_cartons());
  for (int b = 0; b < rel.num_boxes(); ++b) y[b] = m.add_variable(box_variable(b));
  for (int k = 0; k < rel.num_cartons(); ++k) {
    z[k] = m.add_variable(carton_variable(k));
  }
  const int theta = m.add_variable(theta_variable());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Cut& cut = pool.cuts()[i];
    if (cut.w.size() != y.size()) throw DomainError("box cut has wrong dimension");
    Constraint c{"cut[" + std::to_string(i) + "]",
                 ConstraintKind::kOptimalityCut, {{theta, 1}},
                 Sense::kGreaterEqual, cut.s};
    for (std::size_t b = 0; b < y.size(); ++b) {
      if (cut.w[b] != 0) c.terms.push_back({y[b], -cut.w[b]});
    }
    m.add_constraint(std::move(c));
  }
  add_coupling(m, rel, y, z, fixed);
  add_limited(m, z, cfg.cartons);
  return m;
}

}  // namespace boxopt

#endif  // BOXOPT_MASTER_HPP_
