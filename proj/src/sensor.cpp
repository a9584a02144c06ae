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

#include "offnav/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace offnav {
namespace {

constexpr double kDeg2Rad = M_PI / 180.0;
// Ignore terrain closer than this horizontal distance; avoids the slope
// singularity directly under the camera.
constexpr double kMinRange = 0.3;

}  // namespace

ObservationSet raycast_3d(const GroundTruthMap& truth,
                          const VehicleState& pose, const SensorSpec& spec) {
  const GridSpec& gs = truth.spec;
  const int n = gs.cells_per_side();
  ObservationSet obs;
  obs.frustum = Grid2D<std::uint8_t>(n, n, 0);

  const auto cam_cell = world_to_cell(pose.x, pose.y, gs);
  if (!cam_cell || !spec.valid()) return obs;  // degenerate pose

  const double cam_z =
      truth.elevation.at(*cam_cell) + spec.mount_height;
  const double half_fov = 0.5 * spec.fov_deg * kDeg2Rad;
  const double slope_lim = std::tan(0.5 * spec.vertical_fov_deg * kDeg2Rad);

  // FOV wedge by cell center.
  {
    const int radius =
        static_cast<int>(std::ceil(spec.max_range / gs.resolution)) + 1;
    const int i0 = std::max(0, cam_cell->i - radius);
    const int i1 = std::min(n - 1, cam_cell->i + radius);
    const int j0 = std::max(0, cam_cell->j - radius);
    const int j1 = std::min(n - 1, cam_cell->j + radius);
    const double r2 = spec.max_range * spec.max_range;
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const double dx = cell_center_x({i, j}, gs) - pose.x;
        const double dy = cell_center_y({i, j}, gs) - pose.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 > r2) continue;
        if (d2 < kMinRange * kMinRange) {
          obs.frustum.at(i, j) = 1;  // directly underfoot
          continue;
        }
        const double bearing = wrap_angle(std::atan2(dy, dx) - pose.yaw);
        if (std::abs(bearing) <= half_fov) obs.frustum.at(i, j) = 1;
      }
    }
  }

  Grid2D<std::uint8_t> seen(n, n, 0);
  const int n_az = spec.azimuth_rays;
  for (int a = 0; a < n_az; ++a) {
    const double frac = n_az > 1 ? static_cast<double>(a) / (n_az - 1) : 0.5;
    const double az = pose.yaw + (frac - 0.5) * 2.0 * half_fov;
    const double dx = std::cos(az);
    const double dy = std::sin(az);

    // Grid traversal state (Amanatides-Woo).
    int ci = cam_cell->i, cj = cam_cell->j;
    const int si = dx > 0 ? 1 : -1;
    const int sj = dy > 0 ? 1 : -1;
    const double inv_dx = std::abs(dx) > 1e-12 ? 1.0 / dx : 0.0;
    const double inv_dy = std::abs(dy) > 1e-12 ? 1.0 / dy : 0.0;
    const double tdi =
        inv_dx != 0.0 ? gs.resolution / std::abs(dx)
                      : std::numeric_limits<double>::infinity();
    const double tdj =
        inv_dy != 0.0 ? gs.resolution / std::abs(dy)
                      : std::numeric_limits<double>::infinity();
    const double bx = gs.origin_x + (dx > 0 ? ci + 1 : ci) * gs.resolution;
    const double by = gs.origin_y + (dy > 0 ? cj + 1 : cj) * gs.resolution;
    double tmi = inv_dx != 0.0 ? (bx - pose.x) * inv_dx
                               : std::numeric_limits<double>::infinity();
    double tmj = inv_dy != 0.0 ? (by - pose.y) * inv_dy
                               : std::numeric_limits<double>::infinity();

    double horizon = -std::numeric_limits<double>::infinity();
    double t_enter = 0.0;
    while (t_enter <= spec.max_range) {
      const double t_exit = std::min(tmi, tmj);
      if (!(ci == cam_cell->i && cj == cam_cell->j)) {
        if (ci < 0 || cj < 0 || ci >= n || cj >= n) break;
        const double t0 = std::max(t_enter, kMinRange);
        const double t1 = std::min(t_exit, spec.max_range);
        if (t1 > t0) {
          const double dz = truth.elevation.at(ci, cj) - cam_z;
          // Surface slope peaks at the near edge for terrain above the
          // camera, at the far edge below it.
          const double t_best = dz >= 0.0 ? t0 : t1;
          const double slope = dz / t_best;
          if (slope > horizon) {
            if (std::abs(slope) <= slope_lim && !seen.at(ci, cj)) {
              seen.at(ci, cj) = 1;
              Hit h;
              h.cell = {ci, cj};
              h.elevation = truth.elevation.at(ci, cj);
              h.px = pose.x + dx * t_best;
              h.py = pose.y + dy * t_best;
              h.range = t_best;
              obs.hits.push_back(h);
              obs.frustum.at(ci, cj) = 1;
            }
            horizon = slope;
          }
        }
      }
      t_enter = t_exit;
      if (tmi < tmj) {
        ci += si;
        tmi += tdi;
      } else {
        cj += sj;
        tmj += tdj;
      }
    }
  }
  return obs;
}

void fuse_observations(ElevationBelief& belief, const ObservationSet& obs,
                       double gamma_obs) {
  const float decay = static_cast<float>(std::exp(-gamma_obs));
  for (const Hit& h : obs.hits) {
    if (!belief.mean.in_bounds(h.cell.i, h.cell.j)) continue;
    belief.mean.at(h.cell) = h.elevation;
    float& var = belief.variance.at(h.cell);
    var = std::max(var * decay, kVarianceFloor);
    belief.observed.at(h.cell) = 1;
  }
  // Inpaint only sampling holes next to actual returns. Occlusion shadows
  // stay unobserved: painting them with the occluder's height would turn
  // hidden space into phantom walls, when the mapping contract is that
  // unobserved space reads as free.
  const int n = belief.mean.width();
  Grid2D<std::uint8_t> holes(n, n, 0);
  for (const Hit& h : obs.hits) {
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        const int i = h.cell.i + di;
        const int j = h.cell.j + dj;
        if (i >= 0 && j >= 0 && i < n && j < n && obs.frustum.at(i, j)) {
          holes.at(i, j) = 1;
        }
      }
    }
  }
  inpaint_occluded(belief, holes);
}

void dump_observations_csv(const std::string& path,
                           const ObservationSet& obs) {
  std::ofstream out(path);
  out << "cell_i,cell_j,elevation\n";
  for (const Hit& h : obs.hits) {
    out << h.cell.i << "," << h.cell.j << "," << h.elevation << "\n";
  }
}

}  // namespace offnav
