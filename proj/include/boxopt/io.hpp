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

#ifndef BOXOPT_IO_HPP_
#define BOXOPT_IO_HPP_

// CSV formats for boxes (id,l,w,h), cartons (id,l,w,heights with heights
// separated by ';') and REL (carton_id,box_id).

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "boxopt/error.hpp"
#include "boxopt/geometry.hpp"

namespace boxopt {

namespace io_internal {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::string chomp(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

inline std::int64_t parse_int(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::logic_error&) {
    throw ParseError("expected integer, got '" + s + "'", line);
  }
  if (used != s.size()) throw ParseError("expected integer, got '" + s + "'", line);
  return v;
}

// Calls fn(fields, line) for each data row after checking the header.
template <typename Fn>
void read_csv(std::istream& in, const std::string& header, std::size_t columns,
              Fn&& fn) {
  std::string text;
  std::size_t line = 0;
  if (!std::getline(in, text)) throw ParseError("missing header", 1);
  ++line;
  if (chomp(text) != header) {
    throw ParseError("expected header '" + header + "'", line);
  }
  while (std::getline(in, text)) {
    ++line;
    text = chomp(text);
    if (text.empty()) continue;
    auto fields = split(text, ',');
    if (fields.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " fields", line);
    }
    fn(fields, line);
  }
}

}  // namespace io_internal

inline void write_boxes(const std::vector<Box>& boxes, std::ostream& out) {
  out << "id,l,w,h\n";
  for (const Box& b : boxes) {
    out << b.id << ',' << b.dims.l << ',' << b.dims.w << ',' << b.dims.h << '\n';
  }
}

inline std::vector<Box> read_boxes(std::istream& in) {
  using namespace io_internal;
  std::vector<Box> boxes;
  read_csv(in, "id,l,w,h", 4, [&](const auto& f, std::size_t line) {
    const auto id = parse_int(f[0], line);
    if (id != static_cast<std::int64_t>(boxes.size())) {
      throw ParseError("box ids must be dense and ascending", line);
    }
    const Dim3 d{parse_int(f[1], line), parse_int(f[2], line), parse_int(f[3], line)};
    if (!d.positive()) throw ParseError("box dimensions must be positive", line);
    if (!boxes.empty() && boxes.back().volume > d.volume()) {
      throw ParseError("boxes must be ordered by nondecreasing volume", line);
    }
    boxes.push_back({static_cast<int>(id), d, d.volume()});
  });
  return boxes;
}

inline void write_cartons(const std::vector<Carton>& cartons, std::ostream& out) {
  out << "id,l,w,heights\n";
  for (const Carton& c : cartons) {
    out << c.id << ',' << c.dims.l << ',' << c.dims.w << ',';
    for (std::size_t i = 0; i < c.crease_heights.size(); ++i) {
      out << (i ? ";" : "") << c.crease_heights[i];
    }
    out << '\n';
  }
}

inline std::vector<Carton> read_cartons(std::istream& in) {
  using namespace io_internal;
  std::vector<Carton> cartons;
  read_csv(in, "id,l,w,heights", 4, [&](const auto& f, std::size_t line) {
    const auto id = parse_int(f[0], line);
    if (id != static_cast<std::int64_t>(cartons.size())) {
      throw ParseError("carton ids must be dense and ascending", line);
    }
    Carton c;
    c.id = static_cast<int>(id);
    for (const auto& h : split(f[3], ';')) c.crease_heights.push_back(parse_int(h, line));
    if (c.crease_heights.empty()) throw ParseError("carton without heights", line);
    if (!std::is_sorted(c.crease_heights.begin(), c.crease_heights.end()) ||
        std::adjacent_find(c.crease_heights.begin(), c.crease_heights.end()) !=
            c.crease_heights.end()) {
      throw ParseError("crease heights must be ascending and distinct", line);
    }
    c.dims = {parse_int(f[1], line), parse_int(f[2], line), c.crease_heights.back()};
    if (!c.dims.positive() || c.crease_heights.front() <= 0) {
      throw ParseError("carton dimensions must be positive", line);
    }
    cartons.push_back(std::move(c));
  });
  return cartons;
}

inline void write_rel(const RelTable& rel, std::ostream& out) {
  out << "carton_id,box_id\n";
  for (const auto& [k, b] : rel.pairs()) out << k << ',' << b << '\n';
}

inline RelTable read_rel(std::istream& in, int num_cartons, int num_boxes) {
  using namespace io_internal;
  std::vector<std::pair<int, int>> pairs;
  read_csv(in, "carton_id,box_id", 2, [&](const auto& f, std::size_t line) {
    pairs.emplace_back(static_cast<int>(parse_int(f[0], line)),
                       static_cast<int>(parse_int(f[1], line)));
  });
  return RelTable(num_cartons, num_boxes, std::move(pairs));
}

template <typename Fn>
auto with_input(const std::string& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return fn(in);
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  fn(out);
  if (!out) throw Error("failed writing " + path);
}

}  // namespace boxopt

#endif  // BOXOPT_IO_HPP_
