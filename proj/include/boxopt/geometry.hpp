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

#ifndef BOXOPT_GEOMETRY_HPP_
#define BOXOPT_GEOMETRY_HPP_

#include <algorithm>
#include <array>
#include <compare>
#include <functional>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "boxopt/error.hpp"

namespace boxopt {

// Lengths are integer millimeters, volumes integer cubic millimeters.
using Mm = std::int64_t;
using Volume = std::int64_t;

struct Dim3 {
  Mm l = 0;
  Mm w = 0;
  Mm h = 0;

  constexpr Volume volume() const { return l * w * h; }
  constexpr bool positive() const { return l > 0 && w > 0 && h > 0; }
  constexpr Mm operator[](int axis) const {
    return axis == 0 ? l : (axis == 1 ? w : h);
  }
  constexpr Mm& operator[](int axis) {
    return axis == 0 ? l : (axis == 1 ? w : h);
  }

  // Componentwise dominance: a box of these dims contains `o` unrotated.
  constexpr bool dominates(const Dim3& o) const {
    return l >= o.l && w >= o.w && h >= o.h;
  }

  // Dims sorted descending (l >= w >= h).
  constexpr Dim3 sorted() const {
    std::array<Mm, 3> v{l, w, h};
    std::sort(v.begin(), v.end(), std::greater<>());
    return {v[0], v[1], v[2]};
  }

  friend constexpr auto operator<=>(const Dim3&, const Dim3&) = default;
};

inline std::string to_string(const Dim3& d) {
  return std::to_string(d.l) + "x" + std::to_string(d.w) + "x" +
         std::to_string(d.h);
}

// Throws unless all components are positive and the volume fits in 64 bits.
inline void validate(const Dim3& d) {
  if (!d.positive()) {
    throw DomainError("dimensions must be positive: " + to_string(d));
  }
  const Mm max = std::numeric_limits<Volume>::max();
  if (d.l > max / d.w || d.l * d.w > max / d.h) {
    throw DomainError("volume overflows 64-bit: " + to_string(d));
  }
}

struct Box {
  int id = 0;
  Dim3 dims;
  Volume volume = 0;
};

struct Item {
  Dim3 dims;
};

struct PackingUnit {
  int id = 0;
  std::string external_id;
  std::vector<Item> items;
  Volume volume = 0;
};

inline PackingUnit make_unit(int id, std::string external_id,
                             std::vector<Item> items) {
  if (items.empty()) throw DomainError("packing unit has no items");
  PackingUnit unit{id, std::move(external_id), std::move(items), 0};
  for (const Item& item : unit.items) {
    validate(item.dims);
    unit.volume += item.dims.volume();
  }
  return unit;
}

// A carton folded to its tallest box. Every crease height yields one box
// with the carton's length and width.
struct Carton {
  int id = 0;
  Dim3 dims;
  std::vector<Mm> crease_heights;  // ascending, distinct, contains dims.h
};

// Carton -> box production relation with adjacency in both directions.
class RelTable {
 public:
  RelTable() = default;

  RelTable(int num_cartons, int num_boxes,
           std::vector<std::pair<int, int>> pairs)
      : pairs_(std::move(pairs)),
        boxes_of_(num_cartons),
        cartons_of_(num_boxes) {
    std::sort(pairs_.begin(), pairs_.end());
    if (std::adjacent_find(pairs_.begin(), pairs_.end()) != pairs_.end()) {
      throw DomainError("duplicate REL pair");
    }
    for (const auto& [k, b] : pairs_) {
      if (k < 0 || k >= num_cartons || b < 0 || b >= num_boxes) {
        throw IndexError("REL pair (" + std::to_string(k) + "," +
                         std::to_string(b) + ") out of range");
      }
      boxes_of_[k].push_back(b);
      cartons_of_[b].push_back(k);
    }
  }

  int num_cartons() const { return static_cast<int>(boxes_of_.size()); }
  int num_boxes() const { return static_cast<int>(cartons_of_.size()); }
  std::size_t size() const { return pairs_.size(); }

  // Sorted by (carton, box).
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  const std::vector<int>& boxes_of(int carton) const {
    return boxes_of_.at(carton);
  }
  const std::vector<int>& cartons_of(int box) const {
    return cartons_of_.at(box);
  }

 private:
  std::vector<std::pair<int, int>> pairs_;
  std::vector<std::vector<int>> boxes_of_;
  std::vector<std::vector<int>> cartons_of_;
};

}  // namespace boxopt

#endif  // BOXOPT_GEOMETRY_HPP_
