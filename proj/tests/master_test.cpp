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

#include <algorithm>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "boxopt/master.hpp"
#include "boxopt/mip_solver.hpp"
#include "test_instances.hpp"

namespace boxopt {
namespace {

using testing::draw;
using testing::TinyInstance;

bool have_scipy() {
  static const bool ok =
      std::system("python3 -c 'import scipy.optimize' > /dev/null 2>&1") == 0;
  return ok;
}

SolverOptions external() {
  SolverOptions o;
  o.backend = "external";
  o.external_command =
      "python3 '" BOXOPT_SOURCE_DIR "/tools/mps_milp.py' {mps} {sol}";
  return o;
}

BitVector selection(const MipModel& m, const MipSolution& s, int size) {
  BitVector z(size);
  for (std::size_t j = 0; j < m.variables().size(); ++j) {
    if (m.variables()[j].role == VarRole::kCarton && s.values[j] > 0.5) {
      z.set(m.variables()[j].a);
    }
  }
  return z;
}

// Enumerates every z with |z| = M that covers the fixed boxes.
Volume brute_force_xy(const CutPool& pool, const RelTable& rel,
                      const ProblemConfig& cfg, bool* feasible) {
  const int K = rel.num_cartons();
  const auto fixed = fixed_box_set(cfg, rel.num_boxes());
  Volume best = 0;
  *feasible = false;
  for (unsigned mask = 0; mask < (1u << K); ++mask) {
    if (std::popcount(mask) != cfg.cartons) continue;
    BitVector z(K);
    for (int k = 0; k < K; ++k) z.set(k, (mask >> k) & 1);
    const BitVector y = expand_cartons_to_boxes(z, rel);
    bool ok = true;
    for (int b : fixed) ok = ok && y.get(b);
    if (!ok) continue;
    const Volume v = pool.bound(z, 0);
    if (!*feasible || v < best) best = v;
    *feasible = true;
  }
  return best;
}

TEST(MasterXYTest, TwoCutExample) {
  const RelTable rel(2, 1, {{0, 0}, {1, 0}});
  CutPool pool;
  pool.add({10, {-4, 0}, 1});
  pool.add({10, {0, -4}, 2});
  ProblemConfig cfg;
  cfg.cartons = 1;
  const MipModel m = build_master_xy(pool, rel, cfg);
  const MipSolution s = solve_mip(m);
  ASSERT_EQ(s.status, MipStatus::kOptimal);
  // Either single carton leaves the other cut at 10.
  EXPECT_EQ(s.objective, 10);
  EXPECT_EQ(selection(m, s, 2).count(), 1u);
  EXPECT_TRUE(m.violations(s.values).empty());
  cfg.cartons = 2;
  const MipSolution both = solve_mip(build_master_xy(pool, rel, cfg));
  EXPECT_EQ(both.objective, 6);
}

TEST(MasterXYTest, EmptyPoolWithAllCartonsSelectsEverything) {
  const RelTable rel(3, 2, {{0, 0}, {1, 1}, {2, 1}});
  ProblemConfig cfg;
  cfg.cartons = 3;
  const MipModel m = build_master_xy(CutPool{}, rel, cfg);
  const MipSolution s = solve_mip(m);
  ASSERT_EQ(s.status, MipStatus::kOptimal);
  EXPECT_EQ(selection(m, s, 3).count(), 3u);
  EXPECT_EQ(s.objective, 0);
}

TEST(MasterXYTest, ConstantCutBoundsTheta) {
  const RelTable rel(1, 1, {{0, 0}});
  CutPool pool;
  pool.add({42, {0}, 1});
  ProblemConfig cfg;
  cfg.cartons = 1;
  EXPECT_EQ(solve_mip(build_master_xy(pool, rel, cfg)).objective, 42);
  CutPool box_pool;
  box_pool.add({42, {0}, 1});
  EXPECT_EQ(solve_mip(build_master_x(box_pool, rel, cfg)).objective, 42);
}

TEST(MasterXYTest, ModelSizes) {
  const RelTable rel(4, 5, {{0, 0}, {0, 1}, {1, 2}, {2, 3}, {3, 4}, {3, 1}});
  CutPool pool;
  pool.add({10, {-1, 0, 0, 0}, 1});
  pool.add({11, {0, -1, 0, 0}, 2});
  pool.add({12, {0, 0, -2, 0}, 3});
  ProblemConfig cfg;
  cfg.cartons = 2;
  cfg.fixed_boxes = {1, 2};
  const MipModel m = build_master_xy(pool, rel, cfg);
  EXPECT_EQ(m.variables().size(), 4u + 1u);
  // cuts + limited + |fixed| where fixed = {1, 2, 4}.
  EXPECT_EQ(m.constraints().size(), 3u + 1u + 3u);
  EXPECT_EQ(m.count(ConstraintKind::kFixedBoxCoverage), 3u);
  EXPECT_EQ(m.count(VarRole::kTheta), 1u);
}

TEST(MasterXTest, ModelSizesIncludeCoupling) {
  const RelTable rel(4, 5, {{0, 0}, {0, 1}, {1, 2}, {2, 3}, {3, 4}, {3, 1}});
  CutPool pool;
  pool.add({10, {-1, 0, 0, 0, 0}, 1});
  ProblemConfig cfg;
  cfg.cartons = 2;
  const MipModel m = build_master_x(pool, rel, cfg);
  EXPECT_EQ(m.variables().size(), 4u + 5u + 1u);
  EXPECT_EQ(m.count(ConstraintKind::kCartonImpliesBox), 6u);
  EXPECT_EQ(m.count(ConstraintKind::kBoxRequiresCarton), 5u);
  EXPECT_EQ(m.count(ConstraintKind::kFixedBox), 1u);
  EXPECT_EQ(m.count(ConstraintKind::kLimitedCartons), 1u);
  EXPECT_EQ(m.count(ConstraintKind::kOptimalityCut), 1u);
}

TEST(MasterTest, FixedBoxWithoutProducerIsConfigError) {
  const RelTable rel(1, 2, {{0, 1}});
  ProblemConfig cfg;
  cfg.cartons = 1;
  cfg.fixed_boxes = {0};
  EXPECT_THROW(build_master_xy(CutPool{}, rel, cfg), ConfigError);
  EXPECT_THROW(build_master_x(CutPool{}, rel, cfg), ConfigError);
  cfg.fixed_boxes = {7};
  EXPECT_THROW(build_master_xy(CutPool{}, rel, cfg), ConfigError);
}

TEST(MasterTest, IncompatibleFixedBoxesAreInfeasible) {
  // Boxes 0 and 1 come from different cartons; M = 1 cannot cover both.
  const RelTable rel(2, 2, {{0, 0}, {1, 1}});
  ProblemConfig cfg;
  cfg.cartons = 1;
  cfg.fixed_boxes = {0};
  EXPECT_EQ(solve_mip(build_master_xy(CutPool{}, rel, cfg)).status,
            MipStatus::kInfeasible);
  EXPECT_EQ(solve_mip(build_master_x(CutPool{}, rel, cfg)).status,
            MipStatus::kInfeasible);
  BitMatrix fit(1, 2);
  fit.set(0, 0);
  fit.set(0, 1);
  const std::vector<Volume> bv{10, 20}, uv{5};
  EXPECT_EQ(solve_mip(build_direct(fit, bv, uv, rel, cfg)).status,
            MipStatus::kInfeasible);
}

TEST(DirectTest, SinglePairOptimum) {
  BitMatrix fit(1, 1);
  fit.set(0, 0);
  const RelTable rel(1, 1, {{0, 0}});
  ProblemConfig cfg;
  cfg.cartons = 1;
  const std::vector<Volume> bv{1000}, uv{300};
  const MipModel m = build_direct(fit, bv, uv, rel, cfg);
  const MipSolution s = solve_mip(m);
  ASSERT_EQ(s.status, MipStatus::kOptimal);
  EXPECT_EQ(s.objective, 700);
  EXPECT_EQ(m.count(VarRole::kPacking), 1u);
}

TEST(DirectTest, CapIsSizeError) {
  BitMatrix fit(10, 10);
  const RelTable rel(1, 10, {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4},
                             {0, 5}, {0, 6}, {0, 7}, {0, 8}, {0, 9}});
  ProblemConfig cfg;
  cfg.cartons = 1;
  cfg.direct_cap = 99;
  const std::vector<Volume> bv(10, 1), uv(10, 1);
  EXPECT_THROW(build_direct(fit, bv, uv, rel, cfg), SizeError);
}

TEST(DirectTest, EqualsExhaustiveSubsetOptimum) {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 60; ++trial) {
    const TinyInstance t = testing::random_tiny_instance(rng);
    ProblemConfig cfg;
    cfg.cartons = t.cartons;
    cfg.fixed_boxes = t.fixed;
    const auto oracle = testing::exhaustive_subsets(t);
    const MipModel m = build_direct(t.sub.fit, t.sub.box_volumes,
                                    t.sub.unit_volumes, t.rel, cfg);
    const MipSolution s = solve_mip(m);
    if (!oracle.feasible) {
      ASSERT_EQ(s.status, MipStatus::kInfeasible);
      continue;
    }
    ASSERT_EQ(s.status, MipStatus::kOptimal);
    ASSERT_EQ(s.objective, oracle.value) << "trial " << trial;
    ASSERT_TRUE(m.violations(s.values).empty());
  }
}

// Random masters from cuts generated at random selections.
struct RandomMaster {
  RelTable rel;
  ProblemConfig cfg;
  CutPool xy;
  CutPool x;
};

RandomMaster random_master(std::mt19937_64& rng) {
  const TinyInstance t = testing::random_tiny_instance(rng, 20, 10, 10, 3);
  RandomMaster r{t.rel, {}, {}, {}};
  r.cfg.cartons = t.cartons;
  r.cfg.fixed_boxes = t.fixed;
  const int K = t.rel.num_cartons(), B = t.rel.num_boxes();
  const int cuts = static_cast<int>(draw(rng, 0, 6));
  for (int i = 0; i < cuts; ++i) {
    BitVector z(K);
    const auto& producers = t.rel.cartons_of(B - 1);
    z.set(producers[draw(rng, 0, producers.size() - 1)]);
    for (int j = 0; j < 2; ++j) z.set(draw(rng, 0, K - 1));
    const BitVector y = expand_cartons_to_boxes(z, t.rel);
    const DualSolution d =
        fast_dual(t.sub.fit, t.sub.box_volumes, t.sub.unit_volumes, y);
    r.xy.add(transform_cut(d, z, t.rel, i));
    r.x.add(make_box_cut(d, y, i));
  }
  return r;
}

TEST(BuiltinSolverTest, MatchesBruteForceOnRandomMasters) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    const RandomMaster r = random_master(rng);
    bool feasible = false;
    const Volume expected = brute_force_xy(r.xy, r.rel, r.cfg, &feasible);
    const MipModel m = build_master_xy(r.xy, r.rel, r.cfg);
    const MipSolution s = solve_mip(m);
    if (!feasible) {
      ASSERT_EQ(s.status, MipStatus::kInfeasible);
      continue;
    }
    ASSERT_EQ(s.status, MipStatus::kOptimal);
    ASSERT_EQ(s.objective, expected) << "trial " << trial;
    ASSERT_TRUE(m.violations(s.values).empty());
    const MipModel mx = build_master_x(r.x, r.rel, r.cfg);
    const MipSolution sx = solve_mip(mx);
    ASSERT_EQ(sx.status, MipStatus::kOptimal);
    ASSERT_TRUE(mx.violations(sx.values).empty());
  }
}

TEST(BuiltinSolverTest, EnumerationCapIsSizeError) {
  std::vector<std::pair<int, int>> pairs;
  for (int k = 0; k < 60; ++k) pairs.emplace_back(k, 0);
  const RelTable rel(60, 1, pairs);
  ProblemConfig cfg;
  cfg.cartons = 10;
  SolverOptions opts;
  opts.enumeration_cap = 1000;
  EXPECT_THROW(solve_mip(build_master_xy(CutPool{}, rel, cfg), opts), SizeError);
  opts.backend = "cplex";
  EXPECT_THROW(solve_mip(build_master_xy(CutPool{}, rel, cfg), opts), ConfigError);
}

TEST(BinomialTest, Saturates) {
  EXPECT_EQ(binomial_capped(10, 3, 1000), 120u);
  EXPECT_EQ(binomial_capped(3, 5, 1000), 0u);
  EXPECT_EQ(binomial_capped(100, 50, 1000), 1001u);
}

TEST(MpsTest, FixedFormatStructure) {
  const RelTable rel(2, 1, {{0, 0}, {1, 0}});
  CutPool pool;
  pool.add({10, {-4, 0}, 1});
  ProblemConfig cfg;
  cfg.cartons = 1;
  std::ostringstream out;
  write_mps(build_master_xy(pool, rel, cfg), out);
  const std::string mps = out.str();
  EXPECT_NE(mps.find("* C0000000 z[0]"), std::string::npos);
  EXPECT_NE(mps.find("* R0000000 cut[0]"), std::string::npos);
  EXPECT_NE(mps.find("'INTORG'"), std::string::npos);
  EXPECT_NE(mps.find("'INTEND'"), std::string::npos);
  EXPECT_NE(mps.find(" UP BND       C0000000  1"), std::string::npos);
  EXPECT_NE(mps.find(" G  R0000000"), std::string::npos);
  EXPECT_NE(mps.find(" E  R0000001"), std::string::npos);
  EXPECT_NE(mps.find("    RHS       R0000000  10"), std::string::npos);
  EXPECT_EQ(mps.substr(mps.size() - 7), "ENDATA\n");
  EXPECT_EQ(mps_column_name(12), "C0000012");
}

TEST(ExternalSolverTest, MissingSolverIsBackendError) {
  SolverOptions o;
  o.backend = "external";
  o.external_command = "sh -c 'echo boom; exit 3' {mps} {sol}";
  const RelTable rel(1, 1, {{0, 0}});
  ProblemConfig cfg;
  cfg.cartons = 1;
  try {
    solve_mip(build_master_xy(CutPool{}, rel, cfg), o);
    FAIL() << "no error";
  } catch (const BackendError& e) {
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
  }
}

TEST(ExternalSolverTest, ReadsSolutionFile) {
  const RelTable rel(2, 1, {{0, 0}, {1, 0}});
  ProblemConfig cfg;
  cfg.cartons = 1;
  const MipModel m = build_master_xy(CutPool{}, rel, cfg);
  std::istringstream in("status OPTIMAL\nobjective 0\nC0000000 1\nC0000001 0\nC0000002 0\n");
  const MipSolution s = mip_solver_internal::read_solution(in, m);
  EXPECT_EQ(s.status, MipStatus::kOptimal);
  EXPECT_EQ(s.values[0], 1.0);
  std::istringstream bad("objective 3\n");
  EXPECT_THROW(mip_solver_internal::read_solution(bad, m), BackendError);
}

TEST(ExternalSolverTest, AgreesWithBuiltinOnRandomMasters) {
  if (!have_scipy()) GTEST_SKIP() << "python3 with scipy not available";
  std::mt19937_64 rng(56);
  for (int trial = 0; trial < 50; ++trial) {
    const RandomMaster r = random_master(rng);
    for (bool xy : {true, false}) {
      const MipModel m = xy ? build_master_xy(r.xy, r.rel, r.cfg)
                            : build_master_x(r.x, r.rel, r.cfg);
      const MipSolution a = solve_mip(m);
      const MipSolution b = solve_mip(m, external());
      ASSERT_EQ(a.status, b.status) << "trial " << trial;
      if (a.status == MipStatus::kOptimal) {
        ASSERT_EQ(a.objective, b.objective) << "trial " << trial;
        ASSERT_TRUE(m.violations(b.values, 1e-5).empty());
      }
    }
  }
}

TEST(ExternalSolverTest, DirectModelAgrees) {
  if (!have_scipy()) GTEST_SKIP() << "python3 with scipy not available";
  std::mt19937_64 rng(57);
  for (int trial = 0; trial < 10; ++trial) {
    const TinyInstance t = testing::random_tiny_instance(rng, 15, 8, 8, 2);
    ProblemConfig cfg;
    cfg.cartons = t.cartons;
    cfg.fixed_boxes = t.fixed;
    const MipModel m = build_direct(t.sub.fit, t.sub.box_volumes,
                                    t.sub.unit_volumes, t.rel, cfg);
    const MipSolution a = solve_mip(m);
    const MipSolution b = solve_mip(m, external());
    ASSERT_EQ(a.status, b.status);
    if (a.status == MipStatus::kOptimal) {
      ASSERT_EQ(a.objective, b.objective);
    }
  }
}

}  // namespace
}  // namespace boxopt
