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

#ifndef BOXOPT_SUBPROBLEM_HPP_
#define BOXOPT_SUBPROBLEM_HPP_

// Benders sub-problem for a fixed box availability y, solved analytically:
//
//   pi_p  = min { V_b - V_p : F_pb = 1, y_b = 1 }
//   mu_pb = min(0, V_b - V_p - pi_p)   for F_pb = 1, else 0
//
// With boxes numbered by nondecreasing volume, the cheapest available box of
// a unit is its lowest available fitting index, and the only negative mu_pb
// sit at fitting boxes below it. Only the column sums w_b = sum_p mu_pb are
// kept; cuts need nothing else.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "boxopt/bit_matrix.hpp"
#include "boxopt/error.hpp"
#include "boxopt/geometry.hpp"
#include "boxopt/parallel.hpp"
#include "nlohmann/json.hpp"

namespace boxopt {

// y: which boxes are available (length B).
using Availability = BitVector;
// z: which cartons are selected (length K).
using CartonSelection = BitVector;

struct DualSolution {
  Volume f = 0;                 // sum_p pi_p + sum_pb y_b mu_pb
  std::vector<Volume> pi;       // per unit, >= 0
  std::vector<Volume> w_boxes;  // per box, sum_p mu_pb <= 0
  std::int64_t bits_visited = 0;
};

// y_b = 1 - prod_{(k, b) in REL} (1 - z_k).
inline Availability expand_cartons_to_boxes(const CartonSelection& z,
                                            const RelTable& rel) {
  if (z.size() != static_cast<std::size_t>(rel.num_cartons())) {
    throw DomainError("carton selection size does not match REL");
  }
  Availability y(rel.num_boxes());
  for (std::size_t k : z.ones()) {
    for (int b : rel.boxes_of(static_cast<int>(k))) y.set(b);
  }
  return y;
}

namespace subproblem_internal {

inline void check_shapes(const BitMatrix& fit,
                         std::span<const Volume> box_volumes,
                         std::span<const Volume> unit_volumes,
                         const Availability& y) {
  if (fit.cols() != box_volumes.size() || fit.cols() != y.size() ||
      fit.rows() != unit_volumes.size()) {
    throw DomainError("fit matrix, volumes and availability disagree in size");
  }
}

[[noreturn]] inline void no_box(std::size_t p) {
  throw InfeasibleError("packing unit " + std::to_string(p) +
                        " has no available fitting box");
}

// Units [begin, end): writes pi, accumulates into w, returns bits visited.
inline std::int64_t fast_dual_rows(const BitMatrix& fit,
                                   std::span<const Volume> box_volumes,
                                   std::span<const Volume> unit_volumes,
                                   std::span<const Word> avail,
                                   std::size_t begin, std::size_t end,
                                   std::vector<Volume>& pi,
                                   std::vector<Volume>& w) {
  std::int64_t visited = 0;
  const std::size_t stride = fit.stride();
  for (std::size_t p = begin; p < end; ++p) {
    const std::span<const Word> row = fit.row(p);
    std::size_t word_idx = 0;
    Word hit = 0;
    for (; word_idx < stride; ++word_idx) {
      hit = row[word_idx] & avail[word_idx];
      if (hit != 0) break;
    }
    if (hit == 0) no_box(p);
    const std::size_t bit_idx = static_cast<std::size_t>(std::countr_zero(hit));
    const std::size_t best = word_idx * kWordBits + bit_idx;
    const Volume best_volume = box_volumes[best];
    pi[p] = best_volume - unit_volumes[p];
    ++visited;

    // Fitting boxes below best are all unavailable; each contributes
    // V_b - V_best <= 0.
    Word word = row[word_idx] & ((Word{1} << bit_idx) - 1);
    for (;;) {
      while (word != 0) {
        const std::size_t b =
            word_idx * kWordBits + static_cast<std::size_t>(std::countr_zero(word));
        w[b] += box_volumes[b] - best_volume;
        ++visited;
        word &= word - 1;
      }
      if (word_idx == 0) break;
      word = row[--word_idx];
    }
  }
  return visited;
}

}  // namespace subproblem_internal

// Bit-scan dual. Requires box ids ordered by nondecreasing volume.
inline DualSolution fast_dual(const BitMatrix& fit,
                              std::span<const Volume> box_volumes,
                              std::span<const Volume> unit_volumes,
                              const Availability& y, std::size_t threads = 1) {
  subproblem_internal::check_shapes(fit, box_volumes, unit_volumes, y);
  const std::size_t units = fit.rows();
  DualSolution d;
  d.pi.assign(units, 0);
  d.w_boxes.assign(fit.cols(), 0);
  threads = std::min(resolve_threads(threads), std::max<std::size_t>(units, 1));
  if (threads <= 1) {
    d.bits_visited = subproblem_internal::fast_dual_rows(
        fit, box_volumes, unit_volumes, y.words(), 0, units, d.pi, d.w_boxes);
  } else {
    std::vector<std::vector<Volume>> partial(threads);
    std::vector<std::int64_t> visited(threads, 0);
    const std::size_t block = (units + threads - 1) / threads;
    parallel_for(threads, threads, [&](std::size_t t, std::size_t) {
      partial[t].assign(fit.cols(), 0);
      const std::size_t begin = std::min(units, t * block);
      const std::size_t end = std::min(units, begin + block);
      visited[t] = subproblem_internal::fast_dual_rows(
          fit, box_volumes, unit_volumes, y.words(), begin, end, d.pi,
          partial[t]);
    });
    for (std::size_t t = 0; t < threads; ++t) {
      for (std::size_t b = 0; b < d.w_boxes.size(); ++b) {
        d.w_boxes[b] += partial[t][b];
      }
      d.bits_visited += visited[t];
    }
  }
  for (Volume v : d.pi) d.f += v;
  return d;
}

// Dense evaluation of the closed form over every (p, b) entry. Reference
// and benchmark baseline for fast_dual.
inline DualSolution naive_dual(const BitMatrix& fit,
                               std::span<const Volume> box_volumes,
                               std::span<const Volume> unit_volumes,
                               const Availability& y) {
  subproblem_internal::check_shapes(fit, box_volumes, unit_volumes, y);
  const std::size_t boxes = fit.cols();
  DualSolution d;
  d.pi.assign(fit.rows(), 0);
  d.w_boxes.assign(boxes, 0);
  for (std::size_t p = 0; p < fit.rows(); ++p) {
    bool found = false;
    Volume pi = 0;
    for (std::size_t b = 0; b < boxes; ++b) {
      if (fit.get(p, b) && y.get(b)) {
        const Volume cost = box_volumes[b] - unit_volumes[p];
        if (!found || cost < pi) pi = cost;
        found = true;
      }
    }
    if (!found) subproblem_internal::no_box(p);
    d.pi[p] = pi;
    d.f += pi;
    for (std::size_t b = 0; b < boxes; ++b) {
      if (!fit.get(p, b)) continue;
      const Volume mu =
          std::min<Volume>(0, box_volumes[b] - unit_volumes[p] - pi);
      d.w_boxes[b] += mu;
      if (y.get(b)) d.f += mu;
      ++d.bits_visited;
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Optimality cuts: theta >= s + sum_j w_j v_j, over cartons (v = z) or over
// boxes (v = y) depending on the decomposition.

struct Cut {
  Volume s = 0;
  std::vector<Volume> w;
  int iteration = 0;

  Volume evaluate(const BitVector& v) const {
    Volume total = s;
    for (std::size_t j : v.ones()) total += w.at(j);
    return total;
  }
};

// Chain rule through y(z): w_k = sum_{b in boxes_of(k)} w_b J_bk with
// J_bk = prod_{l != k, (l, b) in REL} (1 - z_l), and s = f - w'z.
inline Cut transform_cut(const DualSolution& d, const CartonSelection& z,
                         const RelTable& rel, int iteration = 0) {
  if (z.size() != static_cast<std::size_t>(rel.num_cartons()) ||
      d.w_boxes.size() != static_cast<std::size_t>(rel.num_boxes())) {
    throw DomainError("cut transform inputs disagree in size");
  }
  // selected[b]: number of selected cartons producing b.
  std::vector<int> selected(rel.num_boxes(), 0);
  for (std::size_t k : z.ones()) {
    for (int b : rel.boxes_of(static_cast<int>(k))) ++selected[b];
  }
  Cut cut;
  cut.iteration = iteration;
  cut.w.assign(rel.num_cartons(), 0);
  for (int k = 0; k < rel.num_cartons(); ++k) {
    const int own = z.get(k) ? 1 : 0;
    for (int b : rel.boxes_of(k)) {
      if (selected[b] - own == 0) cut.w[k] += d.w_boxes[b];
    }
  }
  cut.s = d.f;
  for (std::size_t k : z.ones()) cut.s -= cut.w[k];
  return cut;
}

// Cut over boxes: s = f(y) - w'y = sum_p pi_p since w vanishes on selected
// boxes.
inline Cut make_box_cut(const DualSolution& d, const Availability& y,
                        int iteration = 0) {
  if (y.size() != d.w_boxes.size()) {
    throw DomainError("availability size does not match dual solution");
  }
  Cut cut{d.f, d.w_boxes, iteration};
  for (std::size_t b : y.ones()) cut.s -= d.w_boxes[b];
  return cut;
}

class CutPool {
 public:
  // False when an identical (s, w) cut is already present.
  bool add(Cut cut) {
    for (const Cut& c : cuts_) {
      if (c.s == cut.s && c.w == cut.w) return false;
    }
    cuts_.push_back(std::move(cut));
    return true;
  }

  const std::vector<Cut>& cuts() const { return cuts_; }
  std::size_t size() const { return cuts_.size(); }
  bool empty() const { return cuts_.empty(); }

  // max over cuts of s + w'v; `floor` when the pool is empty.
  Volume bound(const BitVector& v, Volume floor = 0) const {
    Volume best = floor;
    for (const Cut& c : cuts_) best = std::max(best, c.evaluate(v));
    return best;
  }

 private:
  std::vector<Cut> cuts_;
};

// JSON lines: {"iter":i,"s":int,"w":{"<index>":int,...}}, zeros omitted.
inline void write_cut_pool(const CutPool& pool, std::ostream& out) {
  for (const Cut& c : pool.cuts()) {
    nlohmann::ordered_json j;
    j["iter"] = c.iteration;
    j["s"] = c.s;
    nlohmann::ordered_json w = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < c.w.size(); ++k) {
      if (c.w[k] != 0) w[std::to_string(k)] = c.w[k];
    }
    j["w"] = std::move(w);
    out << j.dump() << '\n';
  }
}

inline CutPool read_cut_pool(std::istream& in, std::size_t dimension) {
  CutPool pool;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(text);
      Cut c;
      c.iteration = j.at("iter").get<int>();
      c.s = j.at("s").get<Volume>();
      c.w.assign(dimension, 0);
      for (const auto& [key, value] : j.at("w").items()) {
        const std::size_t k = std::stoul(key);
        if (k >= dimension) throw ParseError("coefficient index " + key + " out of range", line);
        c.w[k] = value.get<Volume>();
      }
      pool.add(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid cut record: ") + e.what(), line);
    } catch (const std::logic_error&) {
      throw ParseError("invalid coefficient index", line);
    }
  }
  return pool;
}

}  // namespace boxopt

#endif  // BOXOPT_SUBPROBLEM_HPP_
