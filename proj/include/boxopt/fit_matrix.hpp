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

#ifndef BOXOPT_FIT_MATRIX_HPP_
#define BOXOPT_FIT_MATRIX_HPP_

// Fitting matrix F: F(p, b) is set iff packing unit p fits into box b.

#include <atomic>
#include <chrono>
#include <concepts>
#include <cstdint>
#include <vector>

#include "boxopt/binpack.hpp"
#include "boxopt/bit_matrix.hpp"
#include "boxopt/geometry.hpp"
#include "boxopt/parallel.hpp"
#include "nlohmann/json.hpp"

namespace boxopt {

template <typename O>
concept FitOracle = requires(const O& o, const PackingUnit& u, const Dim3& d) {
  { o(u, d) } -> std::convertible_to<FitVerdict>;
};

struct BinpackOracle {
  std::int64_t node_budget = 1'000'000;
  FitVerdict operator()(const PackingUnit& unit, const Dim3& box) const {
    return fits(unit, box, node_budget);
  }
};

struct EvalStats {
  std::int64_t oracle_calls = 0;
  std::int64_t exhausted_calls = 0;
  double seconds = 0.0;

  EvalStats& operator+=(const EvalStats& o) {
    oracle_calls += o.oracle_calls;
    exhausted_calls += o.exhausted_calls;
    return *this;
  }
};

inline nlohmann::json to_json(const EvalStats& s) {
  return {{"oracle_calls", s.oracle_calls},
          {"exhausted_calls", s.exhausted_calls},
          {"seconds", s.seconds}};
}

struct FitResult {
  BitMatrix matrix;
  EvalStats stats;
};

// Reference evaluator: one oracle call per (unit, box) pair.
template <FitOracle Oracle>
FitResult evaluate_exhaustive(const std::vector<PackingUnit>& units,
                              const std::vector<Box>& boxes,
                              const Oracle& oracle, std::size_t threads = 1) {
  const auto start = std::chrono::steady_clock::now();
  FitResult out{BitMatrix(units.size(), boxes.size()), {}};
  std::atomic<std::int64_t> exhausted{0};
  parallel_for(units.size(), threads, [&](std::size_t p, std::size_t) {
    auto row = out.matrix.mutable_row(p);
    std::int64_t local_exhausted = 0;
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      const FitVerdict v = oracle(units[p], boxes[b].dims);
      if (v.exhausted) ++local_exhausted;
      if (v.fits) row[b / kWordBits] |= Word{1} << (b % kWordBits);
    }
    exhausted += local_exhausted;
  });
  out.stats.oracle_calls =
      static_cast<std::int64_t>(units.size() * boxes.size());
  out.stats.exhausted_calls = exhausted.load();
  out.stats.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return out;
}

}  // namespace boxopt

#endif  // BOXOPT_FIT_MATRIX_HPP_
