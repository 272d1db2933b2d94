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

#ifndef BOXOPT_BINPACK_HPP_
#define BOXOPT_BINPACK_HPP_

// Exact decision oracle for orthogonal 3D packing of rectangular items into a
// single box, with all six axis-aligned orientations.
//
// Search: depth-first, items in nonincreasing volume order, each item tried
// at every candidate corner position in (z, y, x) order. Candidate
// coordinates along an axis are the "normal positions" for that item: sums
// of edge lengths of subsets of the other items. Any feasible packing can be
// pushed toward the origin until every item touches the wall or another
// item on each axis, and such a packing only uses normal positions, so the
// search is complete. The candidate set contains every extreme point that a
// placed item can generate.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <vector>

#include "boxopt/error.hpp"
#include "boxopt/geometry.hpp"

namespace boxopt {

struct FitQuery {
  std::vector<Dim3> items;
  Dim3 box;
  std::int64_t node_budget = 1'000'000;
};

struct FitVerdict {
  bool fits = false;
  // Budget consumed before either answer was proven; fits is false then.
  bool exhausted = false;
  // Placement attempts explored.
  std::int64_t nodes = 0;
};

namespace binpack_internal {

struct Placement {
  std::array<Mm, 3> pos;
  std::array<Mm, 3> ext;
};

inline bool overlaps(const Placement& a, const Placement& b) {
  for (int d = 0; d < 3; ++d) {
    if (a.pos[d] + a.ext[d] <= b.pos[d] || b.pos[d] + b.ext[d] <= a.pos[d]) {
      return false;
    }
  }
  return true;
}

// Distinct orientations of `d` that fit inside `box` unrotated.
inline std::vector<std::array<Mm, 3>> orientations(const Dim3& d,
                                                   const Dim3& box) {
  std::array<Mm, 3> e{d.l, d.w, d.h};
  std::sort(e.begin(), e.end());
  std::vector<std::array<Mm, 3>> out;
  do {
    if (e[0] <= box.l && e[1] <= box.w && e[2] <= box.h) out.push_back(e);
  } while (std::next_permutation(e.begin(), e.end()));
  return out;
}

// Reachable subset sums in [0, limit] where each item contributes nothing
// or one of its edges. reach[v] != 0 iff v is reachable.
inline std::vector<std::uint8_t> normal_sums(const std::vector<Dim3>& items,
                                             std::size_t skip, Mm limit) {
  std::vector<std::uint8_t> reach(static_cast<std::size_t>(limit) + 1, 0);
  reach[0] = 1;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i == skip) continue;
    const std::array<Mm, 3> edges{items[i].l, items[i].w, items[i].h};
    for (Mm v = limit; v >= 0; --v) {
      if (!reach[v]) continue;
      for (Mm e : edges) {
        if (v + e <= limit) reach[v + e] = 1;
      }
    }
  }
  return reach;
}

// Candidate corners for one orientation of one item.
struct OrientedCandidates {
  std::array<Mm, 3> ext;
  std::array<std::vector<Mm>, 3> coords;
  std::size_t first_ordinal = 0;  // ordinal of (z0, y0, x0)
};

class Search {
 public:
  Search(std::vector<Dim3> items, const Dim3& box, std::int64_t budget)
      : items_(std::move(items)), budget_(budget) {
    const std::array<Mm, 3> bound{box.l, box.w, box.h};
    options_.resize(items_.size());
    same_as_prev_.assign(items_.size(), false);
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (i > 0 && items_[i] == items_[i - 1]) same_as_prev_[i] = true;
      std::array<std::vector<std::uint8_t>, 3> sums;
      for (int d = 0; d < 3; ++d) sums[d] = normal_sums(items_, i, bound[d]);
      std::size_t ordinal = 0;
      for (const auto& ext : orientations(items_[i], box)) {
        OrientedCandidates oc;
        oc.ext = ext;
        oc.first_ordinal = ordinal;
        for (int d = 0; d < 3; ++d) {
          for (Mm v = 0; v + ext[d] <= bound[d]; ++v) {
            if (sums[d][v]) oc.coords[d].push_back(v);
          }
        }
        ordinal += oc.coords[0].size() * oc.coords[1].size() *
                   oc.coords[2].size();
        options_[i].push_back(std::move(oc));
      }
    }
    chosen_.assign(items_.size(), 0);
    placed_.resize(items_.size());
  }

  FitVerdict run() {
    FitVerdict v;
    v.fits = place(0);
    v.exhausted = exhausted_;
    if (exhausted_) v.fits = false;
    v.nodes = nodes_;
    return v;
  }

 private:
  bool place(std::size_t i) {
    if (i == items_.size()) return true;
    // Identical consecutive items are placed in increasing ordinal order.
    const std::size_t min_ordinal = same_as_prev_[i] ? chosen_[i - 1] + 1 : 0;
    for (const OrientedCandidates& oc : options_[i]) {
      const auto& [xs, ys, zs] = oc.coords;
      const std::size_t plane = xs.size() * ys.size();
      for (std::size_t zi = 0; zi < zs.size(); ++zi) {
        for (std::size_t yi = 0; yi < ys.size(); ++yi) {
          std::size_t xi = 0;
          const std::size_t row = oc.first_ordinal + zi * plane + yi * xs.size();
          if (row + xs.size() <= min_ordinal) continue;
          if (row < min_ordinal) xi = min_ordinal - row;
          while (xi < xs.size()) {
            if (nodes_ >= budget_) {
              exhausted_ = true;
              return false;
            }
            ++nodes_;
            const Placement p{{xs[xi], ys[yi], zs[zi]}, oc.ext};
            const Placement* blocker = nullptr;
            for (std::size_t j = 0; j < i; ++j) {
              if (overlaps(p, placed_[j])) {
                blocker = &placed_[j];
                break;
              }
            }
            if (blocker != nullptr) {
              // Every x below the blocker's far face overlaps it as well.
              const Mm next = blocker->pos[0] + blocker->ext[0];
              while (xi < xs.size() && xs[xi] < next) ++xi;
              continue;
            }
            placed_[i] = p;
            chosen_[i] = row + xi;
            if (place(i + 1)) return true;
            if (exhausted_) return false;
            ++xi;
          }
        }
      }
    }
    return false;
  }

  std::vector<Dim3> items_;
  std::int64_t budget_;
  std::vector<std::vector<OrientedCandidates>> options_;
  std::vector<bool> same_as_prev_;
  std::vector<std::size_t> chosen_;
  std::vector<Placement> placed_;
  std::int64_t nodes_ = 0;
  bool exhausted_ = false;
};

}  // namespace binpack_internal

inline FitVerdict fits(const FitQuery& query) {
  if (query.items.empty()) throw DomainError("fit query without items");
  if (query.node_budget < 1) throw DomainError("node budget must be >= 1");
  validate(query.box);

  std::vector<Dim3> items;
  items.reserve(query.items.size());
  Volume total = 0;
  for (const Dim3& d : query.items) {
    validate(d);
    items.push_back(d.sorted());
    total += d.volume();
  }
  if (total > query.box.volume()) return {};
  const Dim3 box_sorted = query.box.sorted();
  for (const Dim3& d : items) {
    if (!box_sorted.dominates(d)) return {};
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const Dim3& a, const Dim3& b) {
                     if (a.volume() != b.volume()) {
                       return a.volume() > b.volume();
                     }
                     return a > b;
                   });
  return binpack_internal::Search(std::move(items), query.box,
                                  query.node_budget)
      .run();
}

// Convenience overload over a packing unit.
inline FitVerdict fits(const PackingUnit& unit, const Dim3& box,
                       std::int64_t node_budget = 1'000'000) {
  FitQuery q;
  q.items.reserve(unit.items.size());
  for (const Item& it : unit.items) q.items.push_back(it.dims);
  q.box = box;
  q.node_budget = node_budget;
  return fits(q);
}

}  // namespace boxopt

#endif  // BOXOPT_BINPACK_HPP_
