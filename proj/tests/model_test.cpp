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
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "boxopt/model.hpp"

namespace boxopt {
namespace {

std::vector<Dim3> dims_of(const std::vector<Box>& boxes) {
  std::vector<Dim3> out;
  for (const Box& b : boxes) out.push_back(b.dims);
  return out;
}

TEST(BoxGridTest, ReferenceGridHas71790Boxes) {
  const auto boxes = generate_box_grid({155, 155, 105}, {995, 595, 595}, 10);
  EXPECT_EQ(boxes.size(), 71'790u);
  EXPECT_EQ(boxes.front().dims, (Dim3{155, 155, 105}));
  EXPECT_EQ(boxes.back().dims, (Dim3{995, 595, 595}));
}

TEST(BoxGridTest, DegenerateGridHasOneBox) {
  const auto boxes = generate_box_grid({200, 200, 100}, {200, 200, 100}, 10);
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0].volume, 4'000'000);
}

TEST(BoxGridTest, SmallGridOrderedByVolume) {
  const auto boxes = generate_box_grid({2, 2, 1}, {3, 3, 2}, 1);
  const std::vector<Dim3> expected{{2, 2, 1}, {3, 2, 1}, {2, 2, 2},
                                   {3, 3, 1}, {3, 2, 2}, {3, 3, 2}};
  EXPECT_EQ(dims_of(boxes), expected);
  for (std::size_t i = 0; i < boxes.size(); ++i) EXPECT_EQ(boxes[i].id, int(i));
}

TEST(BoxGridTest, EqualVolumesTieBreakLexicographically) {
  const auto boxes = sort_and_number({{4, 1, 1}, {2, 2, 1}, {3, 1, 1}});
  EXPECT_EQ(dims_of(boxes), (std::vector<Dim3>{{3, 1, 1}, {2, 2, 1}, {4, 1, 1}}));
}

TEST(BoxGridTest, InvalidBoundsAreConfigErrors) {
  EXPECT_THROW(generate_box_grid({300, 200, 100}, {200, 200, 100}, 10), ConfigError);
  EXPECT_THROW(generate_box_grid({100, 100, 100}, {205, 200, 100}, 10), ConfigError);
  EXPECT_THROW(generate_box_grid({100, 100, 100}, {200, 200, 100}, 0), ConfigError);
  EXPECT_THROW(generate_box_grid({0, 100, 100}, {200, 200, 100}, 10), ConfigError);
}

TEST(BoxGridTest, CountMatchesBruteForceOnRandomGrids) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Mm step = 1 + static_cast<Mm>(rng() % 3);
    Dim3 lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
      lo[a] = 1 + static_cast<Mm>(rng() % 6);
      hi[a] = lo[a] + step * static_cast<Mm>(rng() % 10);
    }
    const auto boxes = generate_box_grid(lo, hi, step);
    std::size_t count = 0;
    for (Mm l = lo.l; l <= hi.l; l += step)
      for (Mm w = lo.w; w <= hi.w; w += step)
        for (Mm h = lo.h; h <= hi.h; h += step) count += (l >= w && w >= h);
    ASSERT_EQ(boxes.size(), count);
    for (std::size_t i = 1; i < boxes.size(); ++i) {
      ASSERT_LE(boxes[i - 1].volume, boxes[i].volume);
    }
  }
}

TEST(DeriveCartonsTest, FractionalHeightsBelowMinimumAreDropped) {
  const std::vector<Box> boxes{{0, {300, 200, 100}, 6'000'000}};
  const BoxGrid grid{{100, 100, 105}, {300, 200, 105}, 5};
  const CartonSet set = derive_cartons(boxes, grid);
  ASSERT_EQ(set.cartons.size(), 1u);
  EXPECT_EQ(set.cartons[0].crease_heights, std::vector<Mm>{100});
  EXPECT_EQ(set.rel.size(), 1u);
}

TEST(DeriveCartonsTest, CoveredCandidatesAreDropped) {
  const BoxGrid grid{{400, 400, 100}, {400, 400, 400}, 100};
  const auto boxes = generate_box_grid(grid);
  ASSERT_EQ(boxes.size(), 4u);
  const CartonSet set = derive_cartons(boxes, grid);
  ASSERT_EQ(set.cartons.size(), 1u);
  EXPECT_EQ(set.cartons[0].dims, (Dim3{400, 400, 400}));
  EXPECT_EQ(set.cartons[0].crease_heights, (std::vector<Mm>{100, 200, 300, 400}));
  EXPECT_EQ(set.rel.size(), 4u);
}

TEST(DeriveCartonsTest, RelInvariantsHoldOnSmallGrid) {
  const BoxGrid grid{{100, 100, 50}, {500, 400, 300}, 50};
  const auto boxes = generate_box_grid(grid);
  const CartonSet set = derive_cartons(boxes, grid);
  for (const Box& b : boxes) EXPECT_FALSE(set.rel.cartons_of(b.id).empty());
  std::map<std::pair<Mm, Mm>, std::vector<std::vector<Mm>>> by_lw;
  for (const Carton& c : set.cartons) {
    ASSERT_FALSE(c.crease_heights.empty());
    EXPECT_LE(c.crease_heights.size(), 4u);
    EXPECT_EQ(c.crease_heights.back(), c.dims.h);
    EXPECT_TRUE(std::is_sorted(c.crease_heights.begin(), c.crease_heights.end()));
    // (k, b) in REL iff box b has the carton's (l, w) and a crease height.
    std::set<int> expected;
    for (Mm h : c.crease_heights) {
      for (const Box& b : boxes) {
        if (b.dims == Dim3{c.dims.l, c.dims.w, h}) expected.insert(b.id);
      }
    }
    const auto& got = set.rel.boxes_of(c.id);
    EXPECT_EQ(std::set<int>(got.begin(), got.end()), expected);
    EXPECT_EQ(got.size(), c.crease_heights.size());
    by_lw[{c.dims.l, c.dims.w}].push_back(c.crease_heights);
  }
  for (const auto& [lw, sets] : by_lw) {
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (std::size_t j = 0; j < sets.size(); ++j) {
        if (i == j) continue;
        const bool strict_subset =
            sets[j].size() > sets[i].size() &&
            std::includes(sets[j].begin(), sets[j].end(), sets[i].begin(),
                          sets[i].end());
        EXPECT_FALSE(strict_subset);
      }
    }
  }
}

TEST(IngestTest, AcceptsUnitAndSumsVolume) {
  std::istringstream in(R"({"id":"a","items":[{"l":100,"w":100,"h":100}]})");
  const auto r = ingest_packing_units(in, {995, 595, 595});
  ASSERT_EQ(r.units.size(), 1u);
  EXPECT_EQ(r.units[0].volume, 1'000'000);
  EXPECT_TRUE(r.rejections.empty());
}

TEST(IngestTest, RejectsOversizedItem) {
  std::istringstream in(R"({"id":"big","items":[{"l":1000,"w":700,"h":700}]})");
  const auto r = ingest_packing_units(in, {995, 595, 595});
  EXPECT_TRUE(r.units.empty());
  ASSERT_EQ(r.rejections.size(), 1u);
  EXPECT_EQ(r.rejections[0].reason, "exceeds largest box");
  EXPECT_EQ(r.rejections[0].external_id, "big");
  EXPECT_EQ(r.rejections[0].line, 1u);
}

TEST(IngestTest, RejectsUnitThatDoesNotPack) {
  // Each item fits alone but two 600-long items cannot share the box.
  std::istringstream in(
      R"({"id":"pair","items":[{"l":600,"w":400,"h":400},{"l":600,"w":400,"h":400}]})");
  const auto r = ingest_packing_units(in, {995, 595, 595});
  ASSERT_EQ(r.rejections.size(), 1u);
  EXPECT_EQ(r.rejections[0].reason, "does not fit largest box");
}

TEST(IngestTest, AssignsDenseIdsInInputOrder) {
  std::istringstream in(
      "{\"id\":\"x\",\"items\":[{\"l\":1,\"w\":1,\"h\":1}]}\n"
      "\n"
      "{\"id\":\"y\",\"items\":[{\"l\":2,\"w\":1,\"h\":1}]}\n"
      "{\"id\":\"z\",\"items\":[{\"l\":3,\"w\":1,\"h\":1}]}\n");
  const auto r = ingest_packing_units(in, {995, 595, 595});
  ASSERT_EQ(r.units.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(r.units[i].id, i);
  EXPECT_EQ(r.units[2].external_id, "z");
}

void expect_parse_error(const std::string& text, std::size_t line) {
  std::istringstream in(text);
  try {
    ingest_packing_units(in, {995, 595, 595});
    FAIL() << "no error for: " << text;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), line) << text;
  }
}

TEST(IngestTest, MalformedRecordsReportLineNumbers) {
  const std::string ok = "{\"id\":\"a\",\"items\":[{\"l\":1,\"w\":1,\"h\":1}]}\n";
  expect_parse_error(ok + "{not json\n", 2);
  expect_parse_error(ok + "{\"items\":[{\"l\":1,\"w\":1,\"h\":1}]}\n", 2);
  expect_parse_error(ok + ok, 2);
  expect_parse_error("{\"id\":\"a\",\"items\":[]}\n", 1);
  expect_parse_error("{\"id\":\"a\",\"items\":[{\"l\":0,\"w\":1,\"h\":1}]}\n", 1);
  expect_parse_error("{\"id\":\"a\",\"items\":[{\"l\":1.5,\"w\":1,\"h\":1}]}\n", 1);
  expect_parse_error(ok + "\n{\"id\":\"b\",\"items\":[{\"l\":1,\"w\":1}]}\n", 3);
}

TEST(IngestTest, RoundTripNormalizesRecords) {
  // Extra keys and whitespace are dropped; key order is normalized.
  const std::string raw =
      "{ \"items\": [ {\"h\": 3, \"w\": 2, \"l\": 1, \"sku\": \"q\"} ], \"id\": \"u1\" }\n"
      "{\"id\":\"u2\",\"items\":[{\"l\":5,\"w\":5,\"h\":5},{\"l\":7,\"w\":6,\"h\":1}]}\n";
  std::istringstream in(raw);
  const auto r = ingest_packing_units(in, {995, 595, 595});
  std::ostringstream out;
  write_packing_units(r.units, out);
  EXPECT_EQ(out.str(),
            "{\"id\":\"u1\",\"items\":[{\"l\":1,\"w\":2,\"h\":3}]}\n"
            "{\"id\":\"u2\",\"items\":[{\"l\":5,\"w\":5,\"h\":5},{\"l\":7,\"w\":6,\"h\":1}]}\n");
  std::istringstream again(out.str());
  std::ostringstream out2;
  write_packing_units(ingest_packing_units(again, {995, 595, 595}).units, out2);
  EXPECT_EQ(out2.str(), out.str());
}

std::string serialized(const std::vector<PackingUnit>& units) {
  std::ostringstream out;
  write_packing_units(units, out);
  return out.str();
}

TEST(SyntheticTest, SameSeedIsByteIdentical) {
  EXPECT_EQ(serialized(generate_synthetic_units(1, 5)),
            serialized(generate_synthetic_units(1, 5)));
  EXPECT_NE(serialized(generate_synthetic_units(1, 5)),
            serialized(generate_synthetic_units(2, 5)));
}

TEST(SyntheticTest, CountOneGivesOneUnit) {
  EXPECT_EQ(generate_synthetic_units(9, 1).size(), 1u);
}

TEST(SyntheticTest, MeanItemCountNearFour) {
  const auto units = generate_synthetic_units(42, 10'000);
  ASSERT_EQ(units.size(), 10'000u);
  double items = 0;
  for (const auto& u : units) {
    items += static_cast<double>(u.items.size());
    ASSERT_TRUE(fits(u, {995, 595, 595}).fits);
    for (const Item& it : u.items) {
      ASSERT_TRUE(it.dims.dominates({30, 20, 10}));
      ASSERT_TRUE((Dim3{400, 300, 200}).dominates(it.dims));
    }
  }
  const double mean = items / 10'000;
  EXPECT_GE(mean, 3.8);
  EXPECT_LE(mean, 4.2);
}

TEST(SyntheticTest, RangeBeyondLargestBoxIsConfigError) {
  SyntheticSpec spec;
  spec.item_max = {1000, 300, 200};
  EXPECT_THROW(generate_synthetic_units(1, 1, spec), ConfigError);
  EXPECT_THROW(generate_synthetic_units(1, 0), ConfigError);
}

TEST(GeometryTest, RelTableRejectsBadPairs) {
  EXPECT_THROW(RelTable(1, 1, {{0, 0}, {0, 0}}), DomainError);
  EXPECT_THROW(RelTable(1, 1, {{0, 1}}), IndexError);
  const RelTable rel(2, 3, {{1, 2}, {0, 1}, {1, 0}});
  EXPECT_EQ(rel.boxes_of(1), (std::vector<int>{0, 2}));
  EXPECT_EQ(rel.cartons_of(1), (std::vector<int>{0}));
}

TEST(GeometryTest, OverflowingVolumeIsRejected) {
  EXPECT_THROW(validate(Dim3{1 << 30, 1 << 30, 1 << 30}), DomainError);
  EXPECT_THROW(make_unit(0, "x", {}), DomainError);
}

}  // namespace
}  // namespace boxopt
