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

#include "offnav/visibility.hpp"

#include <algorithm>
#include <cmath>

#include "offnav/core/kernels.hpp"

namespace offnav {
namespace {

constexpr double kDeg2Rad = M_PI / 180.0;

// Cast the ray fan from one pose over the mean map, invoking
// visit(cell_i, cell_j) for every visible point. Returns the number of
// rays that met no blocker over their full length.
template <typename Visit>
long cast_pose_rays(const VehicleState& pose, const Grid2D<float>& mean_map,
                    const GridSpec& spec, const VisibilityConfig& cfg,
                    Visit&& visit) {
  long escaped = 0;
  float ground = 0.0f;
  if (auto c = world_to_cell(pose.x, pose.y, spec)) {
    ground = mean_map.at(*c);
  }
  const float ray_z = ground + static_cast<float>(cfg.threshold_height);
  const double half_fov = 0.5 * cfg.fov_deg * kDeg2Rad;
  const double spacing =
      (cfg.ray_end - cfg.ray_start) / (cfg.points_per_ray - 1);
  const int n = spec.cells_per_side();
  for (int ray = 0; ray < cfg.n_rays; ++ray) {
    const double frac =
        cfg.n_rays > 1 ? static_cast<double>(ray) / (cfg.n_rays - 1) : 0.5;
    const double az = pose.yaw + (frac - 0.5) * 2.0 * half_fov;
    const double dx = std::cos(az);
    const double dy = std::sin(az);
    bool blocked = false;
    for (int k = 0; k < cfg.points_per_ray; ++k) {
      const double t = cfg.ray_start + k * spacing;
      const double px = pose.x + dx * t;
      const double py = pose.y + dy * t;
      const int ci =
          static_cast<int>(std::floor((px - spec.origin_x) / spec.resolution));
      const int cj =
          static_cast<int>(std::floor((py - spec.origin_y) / spec.resolution));
      if (ci < 0 || cj < 0 || ci >= n || cj >= n) continue;  // off-map point
      visit(ci, cj);
      if (mean_map.at(ci, cj) >= ray_z) {
        blocked = true;
        break;  // farther points on this ray are occluded
      }
    }
    if (!blocked) ++escaped;
  }
  return escaped;
}

}  // namespace

Grid2D<float> gaussian_kernel(int size, double sigma) {
  Grid2D<float> k(size, size, 0.0f);
  const int half = size / 2;
  const double inv = 1.0 / (2.0 * M_PI * sigma * sigma);
  double sum = 0.0;
  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < size; ++i) {
      const double x = i - half;
      const double y = j - half;
      const double g = inv * std::exp(-(x * x + y * y) / (2 * sigma * sigma));
      k.at(i, j) = static_cast<float>(g);
      sum += g;
    }
  }
  for (size_t idx = 0; idx < k.size(); ++idx) {
    k.data()[idx] = static_cast<float>(k.data()[idx] / sum);
  }
  return k;
}

Grid2D<float> predicted_visibility(const std::vector<VehicleState>& trajectory,
                                   const Grid2D<float>& mean_map,
                                   const GridSpec& spec,
                                   const VisibilityConfig& cfg,
                                   long* escaped) {
  Grid2D<float> counts(spec.cells_per_side(), spec.cells_per_side(), 0.0f);
  const float c = static_cast<float>(cfg.count_value);
  long esc = 0;
  for (size_t p = 0; p < trajectory.size(); p += cfg.pose_stride) {
    esc += cast_pose_rays(trajectory[p], mean_map, spec, cfg,
                          [&](int ci, int cj) { counts.at(ci, cj) += c; });
  }
  if (escaped) *escaped += esc;
  return counts;
}

Grid2D<float> splat(const Grid2D<float>& counts, const Grid2D<float>& kernel) {
  const int w = counts.width();
  const int h = counts.height();
  const int ks = kernel.width();
  const int half = ks / 2;
  Grid2D<float> out(w, h, 0.0f);
  // Scatter form of the zero-padded convolution; skipping empty cells makes
  // sparse count maps cheap.
  const auto& k = kern::active();
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      const float c = counts.at(i, j);
      if (c == 0.0f) continue;
      k.stamp_add(out.data(), w, h, i, j, kernel.data(), ks, c);
    }
  }
  (void)half;
  return out;
}

void decay_variance(Grid2D<float>& variance, const Grid2D<float>& counts,
                    double gamma) {
  kern::active().decay_mul_exp(variance.data(), variance.data(),
                               counts.data(),
                               static_cast<int>(variance.size()),
                               static_cast<float>(gamma));
  // Floor only updated cells; zero-count cells stay bit-identical.
  for (size_t i = 0; i < variance.size(); ++i) {
    if (counts.data()[i] > 0.0f) {
      variance.data()[i] = std::max(variance.data()[i], kVarianceFloor);
    }
  }
}

std::vector<Grid2D<float>> rollout_uncertainty_sequence(
    const std::vector<VehicleState>& trajectory,
    const ElevationBelief& belief, const VisibilityConfig& cfg) {
  const Grid2D<float> kernel = gaussian_kernel(cfg.kernel_size,
                                               cfg.kernel_sigma);
  const int n = belief.spec.cells_per_side();
  Grid2D<float> prefix(n, n, 0.0f);  // splatted prefix counts
  const auto& k = kern::active();
  const float c = static_cast<float>(cfg.count_value);

  std::vector<Grid2D<float>> result;
  result.reserve(trajectory.size());
  for (size_t i = 0; i < trajectory.size(); ++i) {
    Grid2D<float> var = belief.variance;
    decay_variance(var, prefix, cfg.gamma);
    result.push_back(std::move(var));
    if ((i % cfg.pose_stride) == 0) {
      cast_pose_rays(trajectory[i], belief.mean, belief.spec, cfg,
                     [&](int ci, int cj) {
                       k.stamp_add(prefix.data(), n, n, ci, cj, kernel.data(),
                                   cfg.kernel_size, c);
                     });
    }
  }
  return result;
}

RolloutUncertainty::RolloutUncertainty(const GridSpec& spec,
                                       const VisibilityConfig& cfg)
    : spec_(spec),
      cfg_(cfg),
      kernel_(gaussian_kernel(cfg.kernel_size, cfg.kernel_sigma)),
      counts_(spec.cells_per_side(), spec.cells_per_side(), 0.0f) {}

void RolloutUncertainty::reset(const Grid2D<float>* mean,
                               const Grid2D<float>* base_variance) {
  mean_ = mean;
  base_variance_ = base_variance;
  escaped_ = 0;
  pose_counter_ = 0;
  if (touched_j1_ >= touched_j0_) {
    const int w = counts_.width();
    for (int j = touched_j0_; j <= touched_j1_; ++j) {
      float* row = counts_.data() + size_t(j) * w;
      std::fill(row + touched_i0_, row + touched_i1_ + 1, 0.0f);
    }
  }
  touched_i0_ = touched_j0_ = 0;
  touched_i1_ = touched_j1_ = -1;
}

void RolloutUncertainty::advance(const VehicleState& pose) {
  if ((pose_counter_++ % cfg_.pose_stride) != 0) return;
  const float c = static_cast<float>(cfg_.count_value);
  escaped_ += cast_pose_rays(
      pose, *mean_, spec_, cfg_, [&](int ci, int cj) {
        counts_.at(ci, cj) += c;
        if (touched_j1_ < touched_j0_) {
          touched_i0_ = touched_i1_ = ci;
          touched_j0_ = touched_j1_ = cj;
        } else {
          touched_i0_ = std::min(touched_i0_, ci);
          touched_i1_ = std::max(touched_i1_, ci);
          touched_j0_ = std::min(touched_j0_, cj);
          touched_j1_ = std::max(touched_j1_, cj);
        }
      });
}

float RolloutUncertainty::count_at(int ci, int cj) const {
  const int half = cfg_.kernel_size / 2;
  // Fast reject: anything outside the touched box (grown by the kernel
  // radius) has no counts in reach.
  if (touched_j1_ < touched_j0_ || ci < touched_i0_ - half ||
      ci > touched_i1_ + half || cj < touched_j0_ - half ||
      cj > touched_j1_ + half) {
    return 0.0f;
  }
  const int n = counts_.width();
  float acc = 0.0f;
  for (int dj = -half; dj <= half; ++dj) {
    const int j = cj + dj;
    if (j < 0 || j >= n) continue;
    const int i0 = std::max(0, ci - half);
    const int i1 = std::min(n - 1, ci + half);
    const float* row = counts_.data() + size_t(j) * n;
    const float* krow =
        kernel_.data() + size_t(dj + half) * cfg_.kernel_size;
    for (int i = i0; i <= i1; ++i) {
      acc += row[i] * krow[i - ci + half];
    }
  }
  return acc;
}

float RolloutUncertainty::variance_at(int ci, int cj) const {
  const float base = base_variance_->at(ci, cj);
  const float c = count_at(ci, cj);
  if (c == 0.0f) return base;
  const float decayed =
      base * std::exp(-static_cast<float>(cfg_.gamma) * c);
  return std::max(decayed, kVarianceFloor);
}

}  // namespace offnav
