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

#ifndef BOXOPT_BENCH_HPP_
#define BOXOPT_BENCH_HPP_

// Benchmark suites. Every metric is the median over the repetitions.
//   dual     sizes are P; fast_dual vs naive_dual on a random F
//   fit      sizes are n; KD-tree vs exhaustive calls on an n^3 grid
//   end2end  sizes are unit counts; full pipeline on a small grid

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "boxopt/benders.hpp"
#include "boxopt/bit_matrix.hpp"
#include "boxopt/error.hpp"
#include "boxopt/fit_matrix.hpp"
#include "boxopt/kdtree.hpp"
#include "boxopt/model.hpp"
#include "boxopt/subproblem.hpp"
#include "nlohmann/json.hpp"

namespace boxopt {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct BenchRow {
  std::string suite;
  std::int64_t size = 0;
  std::string metric;
  double median = 0.0;
  int samples = 0;
};

struct BenchOptions {
  int repetitions = 3;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::int64_t dual_boxes = 16'384;
  double dual_density = 0.1;
  int dual_available = 32;  // boxes with y = 1 besides the largest
};

inline double median(std::vector<double> v) {
  if (v.empty()) throw DomainError("median of no samples");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Resident set size of this process, Linux only.
inline std::optional<std::int64_t> resident_bytes() {
  std::ifstream statm("/proc/self/statm");
  std::int64_t size = 0, resident = 0;
  if (!(statm >> size >> resident)) return std::nullopt;
  return resident * static_cast<std::int64_t>(::sysconf(_SC_PAGESIZE));
}

// Random sub-problem: every row fits the largest box, other bits at
// `density`; volumes nondecreasing in box id; every unit smaller than box 0.
struct DualInstance {
  BitMatrix fit;
  std::vector<Volume> box_volumes;
  std::vector<Volume> unit_volumes;
  Availability y;
};

inline DualInstance make_dual_instance(std::size_t units, std::size_t boxes,
                                       double density, int available,
                                       std::uint64_t seed) {
  if (boxes < 1 || units < 1) throw DomainError("empty dual instance");
  std::mt19937_64 rng(seed);
  DualInstance inst{BitMatrix(units, boxes), std::vector<Volume>(boxes),
                    std::vector<Volume>(units), Availability(boxes)};
  Volume v = 1'000'000;
  for (auto& bv : inst.box_volumes) {
    bv = v;
    v += static_cast<Volume>(model_internal::uniform(rng, 0, 1000));
  }
  for (auto& uv : inst.unit_volumes) {
    uv = model_internal::uniform(rng, 1, inst.box_volumes[0]);
  }
  for (std::size_t p = 0; p < units; ++p) {
    auto row = inst.fit.mutable_row(p);
    for (std::size_t b = 0; b + 1 < boxes; ++b) {
      if (model_internal::unit_real(rng) < density) {
        row[b / kWordBits] |= Word{1} << (b % kWordBits);
      }
    }
    inst.fit.set(p, boxes - 1);
  }
  inst.y.set(boxes - 1);
  for (int i = 0; i < available; ++i) {
    inst.y.set(static_cast<std::size_t>(
        model_internal::uniform(rng, 0, static_cast<Mm>(boxes) - 1)));
  }
  return inst;
}

// Monotone predicate on an n^3 grid whose boundary surface passes through
// the grid centre: fits iff (x+1)(y+1)(z+1) >= ((n+1)/2)^3.
struct CenteredOracle {
  std::int64_t n;
  FitVerdict operator()(const Dim3& p) const {
    const double c = (n + 1) / 2.0;
    const double lhs = static_cast<double>((p.l + 1) * (p.w + 1) * (p.h + 1));
    return {lhs >= c * c * c, false, 1};
  }
};

namespace bench_internal {

template <typename Fn>
double seconds(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

inline void add(std::vector<BenchRow>& rows, const std::string& suite,
                std::int64_t size, const std::string& metric,
                const std::vector<double>& samples) {
  rows.push_back({suite, size, metric, median(samples),
                  static_cast<int>(samples.size())});
}

inline void dual_suite(std::int64_t units, const BenchOptions& opt,
                       std::vector<BenchRow>& rows) {
  const DualInstance inst =
      make_dual_instance(units, opt.dual_boxes, opt.dual_density,
                         opt.dual_available, opt.seed);
  std::vector<double> fast, naive;
  for (int r = 0; r < opt.repetitions; ++r) {
    DualSolution a, b;
    fast.push_back(seconds([&] {
      a = fast_dual(inst.fit, inst.box_volumes, inst.unit_volumes, inst.y,
                    opt.threads);
    }));
    naive.push_back(seconds([&] {
      b = naive_dual(inst.fit, inst.box_volumes, inst.unit_volumes, inst.y);
    }));
    if (a.f != b.f || a.w_boxes != b.w_boxes) {
      throw Error("fast_dual and naive_dual disagree");
    }
  }
  add(rows, "dual", units, "fast_seconds", fast);
  add(rows, "dual", units, "naive_seconds", naive);
  add(rows, "dual", units, "naive_over_fast", {median(naive) / median(fast)});
  add(rows, "dual", units, "fit_bytes",
      {static_cast<double>(inst.fit.memory_bytes())});
}

inline void fit_suite(std::int64_t n, const BenchOptions& opt,
                      std::vector<BenchRow>& rows) {
  const Dim3 shape{n, n, n};
  const CenteredOracle oracle{n};
  std::vector<double> kd_time, grid_time;
  GridEval kd, grid;
  for (int r = 0; r < opt.repetitions; ++r) {
    kd_time.push_back(seconds([&] { kd = evaluate_grid(shape, oracle); }));
    grid_time.push_back(
        seconds([&] { grid = evaluate_grid_exhaustive(shape, oracle); }));
    if (!(kd.bits == grid.bits)) throw Error("KD-tree and grid disagree");
  }
  const auto kd_calls = static_cast<double>(kd.stats.oracle_calls);
  const auto grid_calls = static_cast<double>(grid.stats.oracle_calls);
  add(rows, "fit", n, "kd_calls", {kd_calls});
  add(rows, "fit", n, "grid_calls", {grid_calls});
  add(rows, "fit", n, "kd_call_fraction", {kd_calls / grid_calls});
  add(rows, "fit", n, "kd_seconds", kd_time);
  add(rows, "fit", n, "grid_seconds", grid_time);
}

inline void end2end_suite(std::int64_t units, const BenchOptions& opt,
                          std::vector<BenchRow>& rows) {
  const BoxGrid grid{{100, 100, 100}, {400, 300, 200}, 50};
  SyntheticSpec spec;
  spec.mean_items = 3;
  spec.max_items = 6;
  spec.item_min = {20, 20, 10};
  spec.item_max = {150, 120, 80};
  spec.largest_box = grid.max;
  std::vector<double> t_boxes, t_units, t_fit, t_opt;
  for (int r = 0; r < opt.repetitions; ++r) {
    std::vector<Box> boxes;
    CartonSet cartons;
    std::vector<PackingUnit> us;
    FitResult fit;
    t_boxes.push_back(seconds([&] {
      boxes = generate_box_grid(grid);
      cartons = derive_cartons(boxes, grid);
    }));
    t_units.push_back(seconds([&] {
      us = generate_synthetic_units(opt.seed, static_cast<int>(units), spec);
    }));
    t_fit.push_back(seconds([&] {
      fit = evaluate_all(us, boxes, grid, BinpackOracle{}, {}, opt.threads);
    }));
    std::vector<Volume> bv, uv, cv;
    for (const Box& b : boxes) bv.push_back(b.volume);
    for (const PackingUnit& u : us) uv.push_back(u.volume);
    for (const Carton& c : cartons.cartons) cv.push_back(c.dims.volume());
    BendersConfig cfg;
    cfg.problem.cartons = 3;
    cfg.max_iter = 50;
    cfg.threads = opt.threads;
    t_opt.push_back(seconds([&] {
      benders_loop({fit.matrix, bv, uv, cartons.rel, cv}, BendersMode::kXY, cfg);
    }));
  }
  add(rows, "end2end", units, "boxes_seconds", t_boxes);
  add(rows, "end2end", units, "units_seconds", t_units);
  add(rows, "end2end", units, "fit_seconds", t_fit);
  add(rows, "end2end", units, "optimize_seconds", t_opt);
}

}  // namespace bench_internal

inline std::vector<std::int64_t> default_bench_sizes(const std::string& suite) {
  if (suite == "dual") return {10'000};
  if (suite == "fit") return {8, 16, 32};
  if (suite == "end2end") return {20};
  throw UsageError("unknown bench suite '" + suite + "'");
}

inline std::vector<BenchRow> bench(const std::string& suite,
                                   std::vector<std::int64_t> sizes,
                                   const BenchOptions& opt = {}) {
  const auto defaults = default_bench_sizes(suite);
  if (sizes.empty()) sizes = defaults;
  if (opt.repetitions < 1) throw UsageError("repetitions must be >= 1");
  std::vector<BenchRow> rows;
  for (std::int64_t s : sizes) {
    if (s < 1) throw UsageError("bench sizes must be positive");
    if (suite == "dual") bench_internal::dual_suite(s, opt, rows);
    if (suite == "fit") bench_internal::fit_suite(s, opt, rows);
    if (suite == "end2end") bench_internal::end2end_suite(s, opt, rows);
  }
  return rows;
}

inline void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "suite,size,metric,median,samples\n";
  for (const BenchRow& r : rows) {
    out << r.suite << ',' << r.size << ',' << r.metric << ',' << r.median << ','
        << r.samples << '\n';
  }
}

inline nlohmann::json bench_json(const std::vector<BenchRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const BenchRow& r : rows) {
    out.push_back({{"suite", r.suite},
                   {"size", r.size},
                   {"metric", r.metric},
                   {"median", r.median},
                   {"samples", r.samples}});
  }
  return out;
}

}  // namespace boxopt

#endif  // BOXOPT_BENCH_HPP_
