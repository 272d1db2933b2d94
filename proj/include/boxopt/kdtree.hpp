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

#ifndef BOXOPT_KDTREE_HPP_
#define BOXOPT_KDTREE_HPP_

// Adaptive KD-tree evaluation of a monotone predicate over a 3D grid.
//
// Monotone: if the predicate holds at a point, it holds at every
// componentwise larger point. For packing this reads "fits in a box, fits in
// every larger box". A region is resolved outright when its lower corner
// fits or its upper corner does not. Otherwise the smallest fitting point s
// on the region's diagonal is found by binary search; [s, hi] fits,
// [lo, s - 1] does not, and the six mixed octants are evaluated recursively.
// Small regions are evaluated point by point.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "boxopt/bit_matrix.hpp"
#include "boxopt/error.hpp"
#include "boxopt/fit_matrix.hpp"
#include "boxopt/geometry.hpp"
#include "boxopt/model.hpp"
#include "boxopt/parallel.hpp"

namespace boxopt {

// Inclusive box of grid coordinates. Coordinates are grid-step units and may
// be zero.
struct Region {
  Dim3 lo;
  Dim3 hi;

  bool empty() const { return hi.l < lo.l || hi.w < lo.w || hi.h < lo.h; }
  std::int64_t count() const {
    if (empty()) return 0;
    return (hi.l - lo.l + 1) * (hi.w - lo.w + 1) * (hi.h - lo.h + 1);
  }
  bool contains(const Dim3& p) const {
    return p.dominates(lo) && hi.dominates(p);
  }
  friend bool operator==(const Region&, const Region&) = default;
};

class NonMonotoneError : public Error {
 public:
  using Error::Error;
};

enum class RegionMark { kFits, kUnfit, kLeaf };

struct KdConfig {
  std::int64_t leaf_threshold = 30;
  // Observes every resolved region; used by tests to check the partition.
  std::function<void(const Region&, RegionMark)> trace;

  void validate() const {
    if (leaf_threshold < 1) throw ConfigError("leaf_threshold must be >= 1");
  }
};

// Diagonal steps of a region: max extent over the three axes.
inline std::int64_t diag_length(const Region& r) {
  return std::max({r.hi.l - r.lo.l, r.hi.w - r.lo.w, r.hi.h - r.lo.h});
}

// Point t of n = diag_length(r) along the diagonal from lo (t = 0) to hi
// (t = n); component d is lo_d + floor(t * (hi_d - lo_d) / n).
inline Dim3 diag_point(const Region& r, std::int64_t t) {
  const std::int64_t n = diag_length(r);
  if (t < 0 || t > n) {
    throw IndexError("diagonal index " + std::to_string(t) +
                     " outside [0, " + std::to_string(n) + "]");
  }
  if (n == 0) return r.lo;
  return {r.lo.l + t * (r.hi.l - r.lo.l) / n, r.lo.w + t * (r.hi.w - r.lo.w) / n,
          r.lo.h + t * (r.hi.h - r.lo.h) / n};
}

struct GridEval {
  Dim3 shape;       // points per axis
  BitVector bits;   // flat index (i * shape.w + j) * shape.h + k
  EvalStats stats;

  std::size_t index(const Dim3& p) const {
    return static_cast<std::size_t>((p.l * shape.w + p.w) * shape.h + p.h);
  }
  bool at(const Dim3& p) const { return bits.get(index(p)); }
};

namespace kdtree_internal {

template <typename PointOracle>
class Evaluator {
 public:
  Evaluator(const Dim3& shape, const PointOracle& oracle, const KdConfig& cfg)
      : shape_(shape),
        oracle_(oracle),
        cfg_(cfg),
        state_(static_cast<std::size_t>(shape.l * shape.w * shape.h), kUnknown) {}

  GridEval run() {
    solve({{0, 0, 0}, {shape_.l - 1, shape_.w - 1, shape_.h - 1}});
    GridEval out{shape_, BitVector(state_.size()), stats_};
    for (std::size_t i = 0; i < state_.size(); ++i) {
      if (state_[i] == kFit) out.bits.set(i);
    }
    return out;
  }

 private:
  static constexpr std::int8_t kUnknown = -1;
  static constexpr std::int8_t kUnfitState = 0;
  static constexpr std::int8_t kFit = 1;

  std::size_t index(const Dim3& p) const {
    return static_cast<std::size_t>((p.l * shape_.w + p.w) * shape_.h + p.h);
  }

  bool query(const Dim3& p) {
    std::int8_t& s = state_[index(p)];
    if (s == kUnknown) {
      const FitVerdict v = oracle_(p);
      ++stats_.oracle_calls;
      if (v.exhausted) ++stats_.exhausted_calls;
      s = v.fits ? kFit : kUnfitState;
    }
    return s == kFit;
  }

  void fill(const Region& r, std::int8_t value, RegionMark mark) {
    if (r.empty()) return;
    if (cfg_.trace) cfg_.trace(r, mark);
    for (Mm i = r.lo.l; i <= r.hi.l; ++i) {
      for (Mm j = r.lo.w; j <= r.hi.w; ++j) {
        for (Mm k = r.lo.h; k <= r.hi.h; ++k) state_[index({i, j, k})] = value;
      }
    }
  }

  void leaf(const Region& r) {
    if (cfg_.trace) cfg_.trace(r, RegionMark::kLeaf);
    std::vector<Dim3> fit, unfit;
    for (Mm i = r.lo.l; i <= r.hi.l; ++i) {
      for (Mm j = r.lo.w; j <= r.hi.w; ++j) {
        for (Mm k = r.lo.h; k <= r.hi.h; ++k) {
          (query({i, j, k}) ? fit : unfit).push_back({i, j, k});
        }
      }
    }
    for (const Dim3& f : fit) {
      for (const Dim3& u : unfit) {
        if (u.dominates(f)) {
          throw NonMonotoneError("oracle is not monotone: fits at grid point " +
                                 to_string(f) + " but not at larger point " +
                                 to_string(u));
        }
      }
    }
  }

  void solve(const Region& r) {
    if (query(r.lo)) {
      fill(r, kFit, RegionMark::kFits);
      return;
    }
    if (!query(r.hi)) {
      fill(r, kUnfitState, RegionMark::kUnfit);
      return;
    }
    if (r.count() <= cfg_.leaf_threshold) {
      leaf(r);
      return;
    }
    // lo is unfit (t = 0) and hi fits (t = n).
    std::int64_t bad = 0;
    std::int64_t good = diag_length(r);
    while (good - bad > 1) {
      const std::int64_t mid = bad + (good - bad) / 2;
      if (query(diag_point(r, mid))) {
        good = mid;
      } else {
        bad = mid;
      }
    }
    const Dim3 s = diag_point(r, good);
    fill({s, r.hi}, kFit, RegionMark::kFits);
    fill({r.lo, {s.l - 1, s.w - 1, s.h - 1}}, kUnfitState, RegionMark::kUnfit);
    for (int mask = 1; mask < 7; ++mask) {
      Region oct;
      for (int d = 0; d < 3; ++d) {
        const bool high = (mask >> d) & 1;
        const Mm lo = high ? s[d] : r.lo[d];
        const Mm hi = high ? r.hi[d] : s[d] - 1;
        oct.lo[d] = lo;
        oct.hi[d] = hi;
      }
      if (!oct.empty()) solve(oct);
    }
  }

  Dim3 shape_;
  const PointOracle& oracle_;
  const KdConfig& cfg_;
  std::vector<std::int8_t> state_;
  EvalStats stats_;
};

}  // namespace kdtree_internal

// Evaluates a monotone point predicate over the grid [0, shape). The oracle
// maps a grid point to a FitVerdict.
template <typename PointOracle>
GridEval evaluate_grid(const Dim3& shape, const PointOracle& oracle,
                       const KdConfig& cfg = {}) {
  cfg.validate();
  if (!shape.positive()) throw DomainError("grid shape must be positive");
  const auto start = std::chrono::steady_clock::now();
  GridEval out =
      kdtree_internal::Evaluator<PointOracle>(shape, oracle, cfg).run();
  out.stats.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return out;
}

// Same grid evaluated with one oracle call per point; the reference.
template <typename PointOracle>
GridEval evaluate_grid_exhaustive(const Dim3& shape,
                                  const PointOracle& oracle) {
  GridEval out{shape, BitVector(static_cast<std::size_t>(shape.volume())), {}};
  for (Mm i = 0; i < shape.l; ++i) {
    for (Mm j = 0; j < shape.w; ++j) {
      for (Mm k = 0; k < shape.h; ++k) {
        const FitVerdict v = oracle(Dim3{i, j, k});
        ++out.stats.oracle_calls;
        if (v.exhausted) ++out.stats.exhausted_calls;
        if (v.fits) out.bits.set(out.index({i, j, k}));
      }
    }
  }
  return out;
}

// One packing unit against the full rectangular box grid.
template <FitOracle Oracle>
GridEval evaluate_unit(const PackingUnit& unit, const BoxGrid& grid,
                       const Oracle& oracle, const KdConfig& cfg = {}) {
  grid.validate();
  auto point = [&](const Dim3& p) { return oracle(unit, grid.at(p.l, p.w, p.h)); };
  return evaluate_grid(grid.shape(), point, cfg);
}

// Fitting matrix via the KD-tree, one unit per task. The grid runs over the
// full rectangle [min, max]; verdicts are projected onto `boxes`, which must
// all be grid points.
template <FitOracle Oracle>
FitResult evaluate_all(const std::vector<PackingUnit>& units,
                       const std::vector<Box>& boxes, const BoxGrid& grid,
                       const Oracle& oracle, const KdConfig& cfg = {},
                       std::size_t threads = 1) {
  grid.validate();
  cfg.validate();
  const Dim3 shape = grid.shape();
  std::vector<std::size_t> flat(boxes.size());
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const auto c = grid.coords_of(boxes[b].dims);
    if (!c) {
      throw DomainError("box " + to_string(boxes[b].dims) +
                        " is not on the grid");
    }
    flat[b] = static_cast<std::size_t>((c->l * shape.w + c->w) * shape.h + c->h);
  }
  const auto start = std::chrono::steady_clock::now();
  FitResult out{BitMatrix(units.size(), boxes.size()), {}};
  std::vector<EvalStats> per_unit(units.size());
  parallel_for(units.size(), threads, [&](std::size_t p, std::size_t) {
    const GridEval g = evaluate_unit(units[p], grid, oracle, cfg);
    auto row = out.matrix.mutable_row(p);
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      if (g.bits.get(flat[b])) row[b / kWordBits] |= Word{1} << (b % kWordBits);
    }
    per_unit[p] = g.stats;
  });
  for (const EvalStats& s : per_unit) out.stats += s;
  out.stats.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return out;
}

// Worst-case oracle evaluations on an n^3 cube with centered splits:
// T(1) = 1, T(n) = log2(n) + 6 T(n / 2). n must be a power of two.
inline std::int64_t predicted_worst_case_evals(std::int64_t n) {
  if (n < 1 || !std::has_single_bit(static_cast<std::uint64_t>(n))) {
    throw DomainError("n must be a power of two, got " + std::to_string(n));
  }
  std::int64_t t = 1;
  for (std::int64_t m = 2; m <= n; m *= 2) {
    t = std::bit_width(static_cast<std::uint64_t>(m)) - 1 + 6 * t;
  }
  return t;
}

// Closed form of the recurrence: (31/25) n^log2(6) - log2(n)/5 - 6/25,
// evaluated exactly as (31 * 6^k - 5k - 6) / 25 with k = log2(n).
inline std::int64_t worst_case_evals_closed_form(std::int64_t n) {
  if (n < 1 || !std::has_single_bit(static_cast<std::uint64_t>(n))) {
    throw DomainError("n must be a power of two, got " + std::to_string(n));
  }
  const std::int64_t k = std::bit_width(static_cast<std::uint64_t>(n)) - 1;
  std::int64_t six_k = 1;
  for (std::int64_t i = 0; i < k; ++i) six_k *= 6;
  return (31 * six_k - 5 * k - 6) / 25;
}

}  // namespace boxopt

#endif  // BOXOPT_KDTREE_HPP_
