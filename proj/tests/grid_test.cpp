// Copyright 2026 Offnav Authors
//
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "offnav/core/rng.hpp"
#include "offnav/grid.hpp"

using namespace offnav;

namespace {

GridSpec small_spec(double side = 10.0, double res = 0.5) {
  GridSpec s;
  s.side_length = side;
  s.resolution = res;
  return s;
}

}  // namespace

TEST_CASE("GridSpec validity and cell count") {
  GridSpec s;
  CHECK(s.valid());
  CHECK(s.cells_per_side() == 400);
  s.resolution = 0.3;  // 80 / 0.3 is not an integer cell count
  CHECK_FALSE(s.valid());
  s.resolution = -0.2;
  CHECK_FALSE(s.valid());
}

TEST_CASE("world_to_cell covers the half-open cell intervals") {
  const GridSpec s = small_spec();
  CHECK(world_to_cell(0.0, 0.0, s) == CellIndex{0, 0});
  CHECK(world_to_cell(0.49, 0.0, s) == CellIndex{0, 0});
  CHECK(world_to_cell(0.5, 0.0, s) == CellIndex{1, 0});
  CHECK(world_to_cell(9.99, 9.99, s) == CellIndex{19, 19});
  CHECK_FALSE(world_to_cell(-0.01, 5.0, s).has_value());
  CHECK_FALSE(world_to_cell(10.0, 5.0, s).has_value());
  const auto c = world_to_cell(3.3, 7.7, s);
  REQUIRE(c.has_value());
  CHECK(cell_center_x(*c, s) == doctest::Approx(3.25));
  CHECK(cell_center_y(*c, s) == doctest::Approx(7.75));
}

TEST_CASE("init_belief marks a known disk around the robot") {
  const GridSpec s = small_spec();
  const ElevationBelief b = init_belief(s, 5.0, 5.0, 0.25, 3.0, 2.0);
  const int n = s.cells_per_side();
  int known = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      CHECK(b.mean.at(i, j) == 0.25f);
      const double dx = cell_center_x({i, j}, s) - 5.0;
      const double dy = cell_center_y({i, j}, s) - 5.0;
      const bool inside = dx * dx + dy * dy <= 4.0;
      if (b.observed.at(i, j)) {
        ++known;
        CHECK(b.variance.at(i, j) == 0.0f);
      } else {
        CHECK(b.variance.at(i, j) == 3.0f);
        CHECK_FALSE(inside);
      }
    }
  }
  CHECK(known > 0);
  // Disk area sanity: pi * r^2 / res^2 ~ 50 cells.
  CHECK(known > 30);
  CHECK(known < 70);
}

TEST_CASE("inpaint_occluded fills from nearest observed cell") {
  const GridSpec s = small_spec();
  ElevationBelief b(s);
  b.variance.fill(3.0f);
  // Two observed anchors with distinct heights.
  b.observed.at(2, 10) = 1;
  b.mean.at(2, 10) = 1.0f;
  b.observed.at(12, 10) = 1;
  b.mean.at(12, 10) = 2.0f;

  Grid2D<std::uint8_t> mask(s.cells_per_side(), s.cells_per_side(), 0);
  for (int i = 0; i <= 14; ++i) mask.at(i, 10) = 1;
  ElevationBelief before = b;
  inpaint_occluded(b, mask);

  SUBCASE("cells take the nearest anchor's mean") {
    CHECK(b.mean.at(4, 10) == 1.0f);
    CHECK(b.mean.at(10, 10) == 2.0f);
    CHECK(b.mean.at(14, 10) == 2.0f);
  }
  SUBCASE("equidistant tie breaks to the lowest linear index") {
    // Cell (7, 10) is 5 cells from both anchors; anchor (2, 10) has the
    // smaller linear index.
    CHECK(b.mean.at(7, 10) == 1.0f);
  }
  SUBCASE("variance and observed mask are untouched") {
    for (size_t k = 0; k < b.variance.size(); ++k) {
      CHECK(b.variance.data()[k] == before.variance.data()[k]);
      CHECK(b.observed.data()[k] == before.observed.data()[k]);
    }
  }
  SUBCASE("cells outside the mask keep their mean") {
    CHECK(b.mean.at(7, 11) == 0.0f);
    CHECK(b.mean.at(16, 10) == 0.0f);
  }
}

TEST_CASE("inpaint against a brute-force nearest-observed oracle") {
  const GridSpec s = small_spec(8.0, 0.5);
  const int n = s.cells_per_side();
  Rng rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    ElevationBelief b(s);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (rng.uniform() < 0.15) {
          b.observed.at(i, j) = 1;
          b.mean.at(i, j) = static_cast<float>(rng.uniform(-2, 2));
        }
      }
    }
    Grid2D<std::uint8_t> mask(n, n, 1);
    ElevationBelief painted = b;
    inpaint_occluded(painted, mask);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (b.observed.at(i, j)) continue;
        long best_d2 = std::numeric_limits<long>::max();
        size_t best_idx = 0;
        bool found = false;
        for (int jj = 0; jj < n; ++jj) {
          for (int ii = 0; ii < n; ++ii) {
            if (!b.observed.at(ii, jj)) continue;
            const long d2 = long(ii - i) * (ii - i) + long(jj - j) * (jj - j);
            const size_t idx = b.observed.linear(ii, jj);
            if (d2 < best_d2 || (d2 == best_d2 && idx < best_idx)) {
              best_d2 = d2;
              best_idx = idx;
              found = true;
            }
          }
        }
        if (found) {
          CHECK(painted.mean.at(i, j) == b.mean.data()[best_idx]);
        } else {
          CHECK(painted.mean.at(i, j) == b.mean.at(i, j));
        }
      }
    }
  }
}

TEST_CASE("sample_elevation_at: common draws, exact statistics") {
  const GridSpec s = small_spec();
  ElevationBelief b(s);
  b.mean.at(4, 4) = 1.5f;
  b.variance.at(4, 4) = 4.0f;
  b.mean.at(10, 10) = -0.5f;
  b.variance.at(10, 10) = 0.0f;
  const std::vector<std::pair<double, double>> pts = {{2.25, 2.25},
                                                      {5.25, 5.25}};
  SUBCASE("deterministic for a fixed seed") {
    Rng r1(7), r2(7);
    const auto a = sample_elevation_at(b, pts, 16, r1);
    const auto c = sample_elevation_at(b, pts, 16, r2);
    CHECK(a == c);
  }
  SUBCASE("zero-variance point is exact; shared xi across points") {
    Rng r(7);
    const auto a = sample_elevation_at(b, pts, 64, r);
    REQUIRE(a.size() == 64);
    for (const auto& row : a) {
      REQUIRE(row.size() == 2);
      CHECK(row[1] == -0.5);
      // Recover xi from point 0 and confirm it is a plausible draw.
      const double xi = (row[0] - 1.5) / 2.0;
      CHECK(std::abs(xi) < 6.0);
    }
  }
  SUBCASE("sample mean converges to the belief mean") {
    Rng r(99);
    const auto a = sample_elevation_at(b, pts, 20000, r);
    double acc = 0.0;
    for (const auto& row : a) acc += row[0];
    CHECK(acc / a.size() == doctest::Approx(1.5).epsilon(0.05));
  }
  SUBCASE("out-of-map point throws naming the point") {
    const std::vector<std::pair<double, double>> bad = {{-1.0, 3.0}};
    Rng r(1);
    CHECK_THROWS_WITH_AS(sample_elevation_at(b, bad, 4, r),
                         doctest::Contains("(-1, 3)"), std::out_of_range);
  }
}

TEST_CASE("grid file round-trip") {
  const GridSpec s = small_spec(4.0, 0.5);
  Grid2D<float> layer(s.cells_per_side(), s.cells_per_side(), 0.0f);
  Rng rng(31);
  for (size_t k = 0; k < layer.size(); ++k) {
    layer.data()[k] = static_cast<float>(rng.uniform(-3, 3));
  }
  const std::string path = "grid_roundtrip_test.txt";
  save_grid(path, s, layer);
  const GroundTruthMap loaded = load_ground_truth(path);
  std::remove(path.c_str());
  CHECK(loaded.spec.cells_per_side() == s.cells_per_side());
  CHECK(loaded.spec.resolution == s.resolution);
  for (int j = 0; j < s.cells_per_side(); ++j) {
    for (int i = 0; i < s.cells_per_side(); ++i) {
      // Text round-trip through default float formatting.
      CHECK(loaded.elevation.at(i, j) ==
            doctest::Approx(layer.at(i, j)).epsilon(1e-5));
    }
  }
}

TEST_CASE("load_ground_truth rejects malformed files") {
  const std::string path = "grid_bad_test.txt";
  {
    FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("2 3 0.5 0 0\n0 0\n0 0\n0 0\n", f);  // non-square
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_ground_truth(path), std::runtime_error);
  {
    FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("2 2 0.5 0 0\n0 0\n0\n", f);  // short
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_ground_truth(path), std::runtime_error);
  {
    FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("2 2 0.5 0 0\n0 0\nnan 0\n", f);  // non-finite
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_ground_truth(path), std::runtime_error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_ground_truth("no_such_grid_file.txt"),
                  std::runtime_error);
}
