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

#ifndef OFFNAV_GRID_HPP
#define OFFNAV_GRID_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "offnav/core/rng.hpp"

namespace offnav {

// Fixed-resolution 2.5D grid geometry. Cell (0, 0) has its lower corner
// at (origin_x, origin_y); cell (i, j) covers
// [origin + i*res, origin + (i+1)*res) per axis.
struct GridSpec {
  double side_length = 80.0;  // meters, square map
  double resolution = 0.2;    // meters per cell
  double origin_x = 0.0;
  double origin_y = 0.0;

  int cells_per_side() const {
    return static_cast<int>(std::llround(side_length / resolution));
  }

  bool valid() const {
    if (resolution <= 0.0 || side_length <= 0.0) return false;
    const double n = side_length / resolution;
    return std::abs(n - std::llround(n)) < 1e-9 && std::llround(n) > 0;
  }
};

struct CellIndex {
  int i = 0;  // x axis
  int j = 0;  // y axis
  bool operator==(const CellIndex&) const = default;
};

inline std::optional<CellIndex> world_to_cell(double x, double y,
                                              const GridSpec& spec) {
  const int i =
      static_cast<int>(std::floor((x - spec.origin_x) / spec.resolution));
  const int j =
      static_cast<int>(std::floor((y - spec.origin_y) / spec.resolution));
  const int n = spec.cells_per_side();
  if (i < 0 || j < 0 || i >= n || j >= n) return std::nullopt;
  return CellIndex{i, j};
}

inline double cell_center_x(CellIndex c, const GridSpec& spec) {
  return spec.origin_x + (c.i + 0.5) * spec.resolution;
}
inline double cell_center_y(CellIndex c, const GridSpec& spec) {
  return spec.origin_y + (c.j + 0.5) * spec.resolution;
}

template <typename T>
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(size_t(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(int i, int j) const {
    return i >= 0 && j >= 0 && i < width_ && j < height_;
  }

  T& at(int i, int j) { return data_[size_t(j) * width_ + i]; }
  const T& at(int i, int j) const { return data_[size_t(j) * width_ + i]; }
  T& at(CellIndex c) { return at(c.i, c.j); }
  const T& at(CellIndex c) const { return at(c.i, c.j); }

  // Linear (row-major) index, used for deterministic tie-breaking.
  size_t linear(int i, int j) const { return size_t(j) * width_ + i; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  size_t size() const { return data_.size(); }

  void fill(T v) { data_.assign(data_.size(), v); }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

// True world elevation (simulation ground truth).
struct GroundTruthMap {
  GridSpec spec;
  Grid2D<float> elevation;

  explicit GroundTruthMap(const GridSpec& s = {})
      : spec(s), elevation(s.cells_per_side(), s.cells_per_side(), 0.0f) {}
};

// Online per-cell Gaussian elevation belief.
struct ElevationBelief {
  GridSpec spec;
  Grid2D<float> mean;
  Grid2D<float> variance;
  Grid2D<std::uint8_t> observed;

  explicit ElevationBelief(const GridSpec& s = {})
      : spec(s),
        mean(s.cells_per_side(), s.cells_per_side(), 0.0f),
        variance(s.cells_per_side(), s.cells_per_side(), 0.0f),
        observed(s.cells_per_side(), s.cells_per_side(), 0) {}
};

// Minimum variance kept after observation updates; observed cells stay
// effectively deterministic without degenerating to exactly zero spread.
constexpr float kVarianceFloor = 1e-6f;

// Unobserved space is assumed free at the robot's elevation, with
// init_variance everywhere except inside known_radius of the robot.
ElevationBelief init_belief(const GridSpec& spec, double robot_x,
                            double robot_y, double free_elevation,
                            double init_variance, double known_radius);

// Nearest-observed-cell fill of unobserved cells inside fov_mask. Ties in
// Euclidean distance break toward the lowest linear cell index. Variance
// and the observed mask are left untouched; cells outside the mask too.
void inpaint_occluded(ElevationBelief& belief,
                      const Grid2D<std::uint8_t>& fov_mask);

// n_samples coherent elevation draws at the given world points: sample s
// at point p is mean(p) + xi_s * sqrt(variance(p)) with one shared xi_s
// across all points (common random numbers). result[s][p].
// Throws std::out_of_range naming the first out-of-bounds point.
std::vector<std::vector<double>> sample_elevation_at(
    const ElevationBelief& belief,
    const std::vector<std::pair<double, double>>& points, int n_samples,
    Rng& rng);

// Plain-text grid file: header "width height resolution origin_x origin_y"
// then row-major space-separated heights (row j = 0 first).
GroundTruthMap load_ground_truth(const std::string& path);
void save_grid(const std::string& path, const GridSpec& spec,
               const Grid2D<float>& layer);
void export_belief(const std::string& mean_path,
                   const std::string& variance_path,
                   const ElevationBelief& belief);

}  // namespace offnav

#endif  // OFFNAV_GRID_HPP
