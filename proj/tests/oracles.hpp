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


#ifndef BOXOPT_TESTS_ORACLES_HPP_
#define BOXOPT_TESTS_ORACLES_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "boxopt/binpack.hpp"

namespace boxopt::testing {

// Reference: every item at every unit-step position in every rotation, on
// an occupancy bitmask. Boxes up to 4x4x4 (64 cells).
class BruteForce {
 public:
  BruteForce(std::vector<Dim3> items, Dim3 box)
      : items_(std::move(items)), box_(box) {}

  bool run() { return place(0, 0); }

 private:
  std::uint64_t mask(const std::array<Mm, 3>& pos, const std::array<Mm, 3>& ext) const {
    std::uint64_t m = 0;
    for (Mm x = pos[0]; x < pos[0] + ext[0]; ++x)
      for (Mm y = pos[1]; y < pos[1] + ext[1]; ++y)
        for (Mm z = pos[2]; z < pos[2] + ext[2]; ++z)
          m |= std::uint64_t{1} << ((x * box_.w + y) * box_.h + z);
    return m;
  }

  bool place(std::size_t i, std::uint64_t used) {
    if (i == items_.size()) return true;
    std::array<Mm, 3> e{items_[i].l, items_[i].w, items_[i].h};
    std::sort(e.begin(), e.end());
    do {
      for (Mm x = 0; x + e[0] <= box_.l; ++x)
        for (Mm y = 0; y + e[1] <= box_.w; ++y)
          for (Mm z = 0; z + e[2] <= box_.h; ++z) {
            const std::uint64_t m = mask({x, y, z}, e);
            if ((m & used) == 0 && place(i + 1, used | m)) return true;
          }
    } while (std::next_permutation(e.begin(), e.end()));
    return false;
  }

  std::vector<Dim3> items_;
  Dim3 box_;
};

// Upward closure of a few random generator points: fits iff the point
// dominates one of them. Monotone by construction.
struct ClosureOracle {
  std::vector<Dim3> generators;
  FitVerdict operator()(const Dim3& p) const {
    for (const Dim3& g : generators) {
      if (p.dominates(g)) return {true, false, 1};
    }
    return {false, false, 1};
  }
};

inline ClosureOracle random_closure(std::mt19937_64& rng, const Dim3& shape) {
  ClosureOracle o;
  const int n = 1 + static_cast<int>(rng() % 5);
  for (int i = 0; i < n; ++i) {
    o.generators.push_back({static_cast<Mm>(rng() % (shape.l + 1)),
                            static_cast<Mm>(rng() % (shape.w + 1)),
                            static_cast<Mm>(rng() % (shape.h + 1))});
  }
  return o;
}

}  // namespace boxopt::testing

#endif  // BOXOPT_TESTS_ORACLES_HPP_
