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

#ifndef OFFNAV_SENSOR_HPP
#define OFFNAV_SENSOR_HPP

#include <string>
#include <vector>

#include "offnav/dynamics.hpp"
#include "offnav/grid.hpp"

namespace offnav {

struct SensorSpec {
  double fov_deg = 72.0;
  double max_range = 25.0;        // m
  double mount_height = 1.5;      // m above local ground
  int azimuth_rays = 144;
  int elevation_rays = 64;        // vertical fan resolution; the horizon
                                  // sweep resolves elevation continuously
                                  // and ignores this count
  // Narrow vertical aperture typical of a vehicle depth sensor. At the
  // default mount height it leaves ground closer than ~5.6 m unseen, so
  // a planner that cuts through an occlusion shadow really does drive
  // over ground it never observed.
  double vertical_fov_deg = 30.0;
  // Fusion decay coefficient. The sensor is noise-free, so a cell's
  // variance collapses after one or two direct hits; slower decay makes
  // ground the camera has plainly seen keep reading as dangerous.
  double gamma_obs = 5.0;

  bool valid() const {
    return fov_deg > 0 && fov_deg < 180 && max_range > 0 &&
           azimuth_rays >= 2 && elevation_rays >= 2;
  }
};

struct Hit {
  CellIndex cell;
  float elevation = 0.0f;  // true surface height (noise-free sensor)
  double px = 0.0;         // world point where the surface was sighted
  double py = 0.0;
  double range = 0.0;      // horizontal distance from the camera
};

struct ObservationSet {
  std::vector<Hit> hits;
  Grid2D<std::uint8_t> frustum;  // FOV wedge within range, plus hit cells
};

// Visibility of the true terrain from a camera at the vehicle position,
// mounted mount_height above local ground. One sweep per azimuth walks the
// cells under the ray (exact grid traversal) keeping a running horizon of
// the maximum surface elevation angle; a cell is observed when its surface
// rises above every nearer surface. This is the dense-ray-fan limit and is
// gap-free on open ground.
ObservationSet raycast_3d(const GroundTruthMap& truth,
                          const VehicleState& pose, const SensorSpec& spec);

// Exact measurement fusion: hit cells take the measured elevation, their
// variance decays by exp(-gamma_obs) once per call, and unobserved cells
// directly adjacent to a return are nearest-neighbor inpainted. Occlusion
// shadows are left untouched so unobserved space keeps reading as free.
void fuse_observations(ElevationBelief& belief, const ObservationSet& obs,
                       double gamma_obs);

// CSV dump (cell_i, cell_j, elevation) for visualization.
void dump_observations_csv(const std::string& path, const ObservationSet& obs);

}  // namespace offnav

#endif  // OFFNAV_SENSOR_HPP
