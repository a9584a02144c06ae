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

#ifndef OFFNAV_VISIBILITY_HPP
#define OFFNAV_VISIBILITY_HPP

#include <cstdint>
#include <vector>

#include "offnav/dynamics.hpp"
#include "offnav/grid.hpp"

namespace offnav {

// Sparse predicted-visibility model: per candidate trajectory, horizontal
// rays over the belief mean accumulate observation counts which decay the
// belief variance through exp(-gamma * count).
struct VisibilityConfig {
  int n_rays = 20;
  int points_per_ray = 30;
  double ray_start = 2.0;   // m
  double ray_end = 25.0;    // m
  double fov_deg = 72.0;
  double threshold_height = 1.0;  // ray height above local ground, m
  // Aggressiveness knob: the variance decay a single predicted view buys.
  // Tuned so the visibility-aware variant keeps pace with the prescient
  // one instead of creeping while it re-observes the same ground.
  double count_value = 8.0;
  double gamma = 0.3;
  int kernel_size = 9;
  double kernel_sigma = 1.0;  // cells
  int pose_stride = 1;        // cast rays every pose_stride horizon steps

  bool valid() const {
    return n_rays >= 1 && points_per_ray >= 2 && ray_end > ray_start &&
           ray_start > 0 && kernel_size >= 1 && kernel_size % 2 == 1 &&
           kernel_sigma > 0 && gamma > 0 && count_value > 0 &&
           pose_stride >= 1;
  }
};

// 2D Gaussian sampled at integer offsets, renormalized to unit sum so
// splatting preserves count mass.
Grid2D<float> gaussian_kernel(int size, double sigma);

// Raw (unsplatted) count map for a whole trajectory. Out-of-map ray points
// are skipped. escaped, when non-null, accumulates the number of rays that
// reached full length without meeting any blocker.
Grid2D<float> predicted_visibility(const std::vector<VehicleState>& trajectory,
                                   const Grid2D<float>& mean_map,
                                   const GridSpec& spec,
                                   const VisibilityConfig& cfg,
                                   long* escaped = nullptr);

// Dense zero-padded 2D convolution of a count map with the kernel.
Grid2D<float> splat(const Grid2D<float>& counts, const Grid2D<float>& kernel);

// variance <- variance * exp(-gamma * counts), elementwise, with the
// global variance floor.
void decay_variance(Grid2D<float>& variance, const Grid2D<float>& counts,
                    double gamma);

// Per-step variance snapshots for one rollout; snapshot i reflects rays
// cast at poses strictly before i (the causality prefix).
std::vector<Grid2D<float>> rollout_uncertainty_sequence(
    const std::vector<VehicleState>& trajectory,
    const ElevationBelief& belief, const VisibilityConfig& cfg);

// Incremental prefix-count accumulator used inside MPPI rollouts. Holds a
// private raw count map; variance queries see only the counts accumulated
// so far, so querying step i before advancing pose i realizes the prefix
// contract without storing N maps. The splat convolution is applied at
// query time: since splatting is linear and the kernel symmetric,
// gathering kernel-weighted raw counts around the query cell equals
// splatting every count and reading one cell, at a small fraction of the
// writes.
class RolloutUncertainty {
 public:
  RolloutUncertainty(const GridSpec& spec, const VisibilityConfig& cfg);

  // Bind the shared frozen belief for the current control step and zero
  // the private counts.
  void reset(const Grid2D<float>* mean, const Grid2D<float>* base_variance);

  void advance(const VehicleState& pose);

  float variance_at(int ci, int cj) const;
  // Splatted count at a cell (kernel gather over the raw counts).
  float count_at(int ci, int cj) const;
  float raw_count_at(int ci, int cj) const { return counts_.at(ci, cj); }

  long escaped_rays() const { return escaped_; }
  const GridSpec& spec() const { return spec_; }

 private:
  GridSpec spec_;
  VisibilityConfig cfg_;
  Grid2D<float> kernel_;
  Grid2D<float> counts_;  // raw (unsplatted), private to this rollout
  const Grid2D<float>* mean_ = nullptr;
  const Grid2D<float>* base_variance_ = nullptr;
  long escaped_ = 0;
  long pose_counter_ = 0;
  // Touched bounding box, so reset() clears only what was written.
  int touched_i0_ = 0, touched_i1_ = -1, touched_j0_ = 0, touched_j1_ = -1;
};

}  // namespace offnav

#endif  // OFFNAV_VISIBILITY_HPP
