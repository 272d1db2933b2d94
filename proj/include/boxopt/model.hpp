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

#ifndef BOXOPT_MODEL_HPP_
#define BOXOPT_MODEL_HPP_

// Box universe, carton derivation, packing-unit ingestion and the synthetic
// unit generator.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "boxopt/binpack.hpp"
#include "boxopt/error.hpp"
#include "boxopt/geometry.hpp"
#include "nlohmann/json.hpp"

namespace boxopt {

// Axis-aligned box grid: every (l, w, h) with min <= (l, w, h) <= max at
// multiples of `step` from `min`.
struct BoxGrid {
  Dim3 min;
  Dim3 max;
  Mm step = 10;

  void validate() const {
    if (step <= 0) throw ConfigError("grid step must be positive");
    if (!min.positive()) throw ConfigError("grid minimum must be positive");
    if (!max.dominates(min)) {
      throw ConfigError("grid minimum " + to_string(min) +
                        " exceeds maximum " + to_string(max));
    }
    for (int d = 0; d < 3; ++d) {
      if ((max[d] - min[d]) % step != 0) {
        throw ConfigError("grid extent not divisible by step on axis " +
                          std::to_string(d));
      }
    }
    boxopt::validate(max);
  }

  // Points per axis.
  Dim3 shape() const {
    return {(max.l - min.l) / step + 1, (max.w - min.w) / step + 1,
            (max.h - min.h) / step + 1};
  }

  Dim3 at(Mm i, Mm j, Mm k) const {
    return {min.l + i * step, min.w + j * step, min.h + k * step};
  }

  // Grid coordinates of `d`, if it is a grid point.
  std::optional<Dim3> coords_of(const Dim3& d) const {
    Dim3 c{};
    for (int a = 0; a < 3; ++a) {
      const Mm off = d[a] - min[a];
      if (off < 0 || off % step != 0 || d[a] > max[a]) return std::nullopt;
      c[a] = off / step;
    }
    return c;
  }
};

// Boxes sorted by (volume, l, w, h) ascending; ids follow that order.
inline std::vector<Box> sort_and_number(std::vector<Dim3> dims) {
  std::sort(dims.begin(), dims.end(), [](const Dim3& a, const Dim3& b) {
    if (a.volume() != b.volume()) return a.volume() < b.volume();
    return a < b;
  });
  std::vector<Box> boxes;
  boxes.reserve(dims.size());
  for (const Dim3& d : dims) {
    boxes.push_back({static_cast<int>(boxes.size()), d, d.volume()});
  }
  return boxes;
}

// Every grid point with l >= w >= h.
inline std::vector<Box> generate_box_grid(const BoxGrid& grid) {
  grid.validate();
  std::vector<Dim3> dims;
  for (Mm l = grid.min.l; l <= grid.max.l; l += grid.step) {
    for (Mm w = grid.min.w; w <= std::min(l, grid.max.w); w += grid.step) {
      for (Mm h = grid.min.h; h <= std::min(w, grid.max.h); h += grid.step) {
        dims.push_back({l, w, h});
      }
    }
  }
  return sort_and_number(std::move(dims));
}

inline std::vector<Box> generate_box_grid(const Dim3& min, const Dim3& max,
                                          Mm step) {
  return generate_box_grid(BoxGrid{min, max, step});
}

// Crease heights of a candidate carton are h * num / den for each fraction,
// rounded down to the grid. 1/1 must be present: the uncut carton.
struct CreaseRule {
  std::vector<std::pair<int, int>> fractions{{1, 1}, {3, 4}, {1, 2}, {1, 4}};
  std::size_t max_heights = 4;

  void validate() const {
    bool has_one = false;
    for (const auto& [num, den] : fractions) {
      if (num <= 0 || den <= 0 || num > den) {
        throw ConfigError("crease fractions must lie in (0, 1]");
      }
      if (num == den) has_one = true;
    }
    if (!has_one) throw ConfigError("crease rule must contain the fraction 1");
    if (max_heights < 1) throw ConfigError("crease rule max_heights < 1");
  }
};

struct CartonSet {
  std::vector<Carton> cartons;
  RelTable rel;
};

namespace model_internal {

struct Dim3Hash {
  std::size_t operator()(const Dim3& d) const {
    std::size_t h = std::hash<Mm>()(d.l);
    h = h * 1000003u ^ std::hash<Mm>()(d.w);
    return h * 1000003u ^ std::hash<Mm>()(d.h);
  }
};

}  // namespace model_internal

// A candidate carton per box; candidates whose crease set is contained in
// another candidate's set with the same (l, w) are dropped.
inline CartonSet derive_cartons(const std::vector<Box>& boxes,
                                const BoxGrid& grid,
                                const CreaseRule& rule = {}) {
  if (boxes.empty()) throw DomainError("no boxes to derive cartons from");
  rule.validate();
  if (grid.step <= 0) throw ConfigError("grid step must be positive");

  std::unordered_map<Dim3, int, model_internal::Dim3Hash> box_index;
  for (const Box& b : boxes) box_index.emplace(b.dims, b.id);

  const Mm min_h = grid.min.h;
  const Mm step = grid.step;
  struct Candidate {
    int box_id;
    Dim3 dims;
    std::vector<Mm> heights;  // ascending
  };
  std::map<std::pair<Mm, Mm>, std::vector<Candidate>> groups;
  for (const Box& b : boxes) {
    std::set<Mm> heights;
    for (const auto& [num, den] : rule.fractions) {
      if (num == den) {
        heights.insert(b.dims.h);
        continue;
      }
      const Mm scaled = b.dims.h * num;  // compare against min_h * den
      if (scaled < min_h * den) continue;
      const Mm h = min_h + (scaled - min_h * den) / (step * den) * step;
      if (box_index.count({b.dims.l, b.dims.w, h}) == 0) continue;
      heights.insert(h);
    }
    std::vector<Mm> hs(heights.begin(), heights.end());
    if (hs.size() > rule.max_heights) {
      // Keep the tallest heights; the uncut height is always the maximum.
      hs.erase(hs.begin(), hs.end() - static_cast<long>(rule.max_heights));
    }
    groups[{b.dims.l, b.dims.w}].push_back({b.id, b.dims, std::move(hs)});
  }

  std::vector<Candidate> kept;
  for (auto& [lw, cands] : groups) {
    for (std::size_t i = 0; i < cands.size(); ++i) {
      bool covered = false;
      for (std::size_t j = 0; j < cands.size() && !covered; ++j) {
        if (i == j) continue;
        const auto& a = cands[i].heights;
        const auto& b = cands[j].heights;
        if (b.size() > a.size() &&
            std::includes(b.begin(), b.end(), a.begin(), a.end())) {
          covered = true;
        }
      }
      if (!covered) kept.push_back(cands[i]);
    }
  }
  std::sort(kept.begin(), kept.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.box_id < b.box_id;
            });

  CartonSet out;
  std::vector<std::pair<int, int>> pairs;
  for (const Candidate& c : kept) {
    const int k = static_cast<int>(out.cartons.size());
    out.cartons.push_back({k, c.dims, c.heights});
    for (Mm h : c.heights) {
      pairs.emplace_back(k, box_index.at({c.dims.l, c.dims.w, h}));
    }
  }
  out.rel = RelTable(static_cast<int>(out.cartons.size()),
                     static_cast<int>(boxes.size()), std::move(pairs));
  return out;
}

// ---------------------------------------------------------------------------
// Packing-unit ingestion (JSON lines).

struct Rejection {
  std::size_t line = 0;
  std::string external_id;
  std::string reason;
};

struct IngestResult {
  std::vector<PackingUnit> units;
  std::vector<Rejection> rejections;
};

namespace model_internal {

inline Mm positive_int(const nlohmann::json& j, const char* key,
                       std::size_t line) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw ParseError(std::string("item field '") + key +
                         "' missing or not an integer",
                     line);
  }
  const Mm v = j[key].get<Mm>();
  if (v <= 0) {
    throw ParseError(std::string("item field '") + key + "' must be positive",
                     line);
  }
  return v;
}

}  // namespace model_internal

// Units whose items do not pack into `largest_box` are listed in the result's
// rejections and get no id.
inline IngestResult ingest_packing_units(std::istream& in,
                                         const Dim3& largest_box,
                                         std::int64_t node_budget = 1'000'000) {
  IngestResult result;
  std::unordered_set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  const Dim3 largest_sorted = largest_box.sorted();
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line);
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string()) {
      throw ParseError("record needs a string 'id'", line);
    }
    const std::string id = rec["id"].get<std::string>();
    if (!seen.insert(id).second) {
      throw ParseError("duplicate id '" + id + "'", line);
    }
    if (!rec.contains("items") || !rec["items"].is_array() ||
        rec["items"].empty()) {
      throw ParseError("record needs a nonempty 'items' array", line);
    }
    std::vector<Item> items;
    for (const auto& it : rec["items"]) {
      if (!it.is_object()) throw ParseError("item is not an object", line);
      items.push_back({{model_internal::positive_int(it, "l", line),
                        model_internal::positive_int(it, "w", line),
                        model_internal::positive_int(it, "h", line)}});
    }
    PackingUnit unit = make_unit(static_cast<int>(result.units.size()), id,
                                 std::move(items));
    bool dominated = true;
    for (const Item& it : unit.items) {
      if (!largest_sorted.dominates(it.dims.sorted())) dominated = false;
    }
    if (!dominated) {
      result.rejections.push_back({line, id, "exceeds largest box"});
      continue;
    }
    const FitVerdict v = fits(unit, largest_box, node_budget);
    if (!v.fits) {
      result.rejections.push_back(
          {line, id,
           v.exhausted ? "fit search exhausted for largest box"
                       : "does not fit largest box"});
      continue;
    }
    result.units.push_back(std::move(unit));
  }
  return result;
}

inline void write_packing_units(const std::vector<PackingUnit>& units,
                                std::ostream& out) {
  for (const PackingUnit& u : units) {
    nlohmann::ordered_json rec;
    rec["id"] = u.external_id;
    rec["items"] = nlohmann::ordered_json::array();
    for (const Item& it : u.items) {
      nlohmann::ordered_json j;
      j["l"] = it.dims.l;
      j["w"] = it.dims.w;
      j["h"] = it.dims.h;
      rec["items"].push_back(std::move(j));
    }
    out << rec.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Synthetic packing units.

struct SyntheticSpec {
  // Items per unit: 1 + Binomial(max_items - 1, (mean_items - 1) /
  // (max_items - 1)), so the mean is exactly mean_items.
  double mean_items = 4.0;
  int max_items = 12;
  Dim3 item_min{30, 20, 10};
  Dim3 item_max{400, 300, 200};
  Dim3 largest_box{995, 595, 595};
  int max_retries = 100;
  std::int64_t node_budget = 100'000;

  void validate() const {
    if (max_items < 1) throw ConfigError("max_items must be >= 1");
    if (mean_items < 1.0 || mean_items > max_items) {
      throw ConfigError("mean_items must lie in [1, max_items]");
    }
    if (!item_min.positive() || !item_max.dominates(item_min)) {
      throw ConfigError("item dimension range is empty or non-positive");
    }
    if (!largest_box.sorted().dominates(item_max.sorted())) {
      throw ConfigError("item range " + to_string(item_max) +
                        " exceeds largest box " + to_string(largest_box));
    }
    if (max_retries < 1) throw ConfigError("max_retries must be >= 1");
  }
};

namespace model_internal {

// Uniform integer in [lo, hi] by rejection; stable across standard libraries.
inline Mm uniform(std::mt19937_64& rng, Mm lo, Mm hi) {
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = rng.max() - rng.max() % range;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return lo + static_cast<Mm>(x % range);
}

inline double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace model_internal

inline std::vector<PackingUnit> generate_synthetic_units(
    std::uint64_t seed, int count, const SyntheticSpec& spec = {}) {
  if (count < 1) throw ConfigError("count must be >= 1");
  spec.validate();
  std::mt19937_64 rng(seed);
  const double p = spec.max_items > 1 ? (spec.mean_items - 1.0) /
                                            (spec.max_items - 1)
                                      : 0.0;
  std::vector<PackingUnit> units;
  units.reserve(count);
  for (int u = 0; u < count; ++u) {
    bool accepted = false;
    for (int attempt = 0; attempt < spec.max_retries && !accepted; ++attempt) {
      int n = 1;
      for (int t = 1; t < spec.max_items; ++t) {
        if (model_internal::unit_real(rng) < p) ++n;
      }
      std::vector<Item> items;
      for (int i = 0; i < n; ++i) {
        items.push_back(
            {{model_internal::uniform(rng, spec.item_min.l, spec.item_max.l),
              model_internal::uniform(rng, spec.item_min.w, spec.item_max.w),
              model_internal::uniform(rng, spec.item_min.h, spec.item_max.h)}});
      }
      PackingUnit unit =
          make_unit(u, "syn-" + std::to_string(seed) + "-" + std::to_string(u),
                    std::move(items));
      if (fits(unit, spec.largest_box, spec.node_budget).fits) {
        units.push_back(std::move(unit));
        accepted = true;
      }
    }
    if (!accepted) {
      throw ConfigError("could not draw a unit fitting the largest box after " +
                        std::to_string(spec.max_retries) + " attempts");
    }
  }
  return units;
}

}  // namespace boxopt

#endif  // BOXOPT_MODEL_HPP_
