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

#ifndef OFFNAV_COST_HPP
#define OFFNAV_COST_HPP

#include <vector>

#include "offnav/dynamics.hpp"
#include "offnav/grid.hpp"
#include "offnav/visibility.hpp"

namespace offnav {

struct CostWeights {
  double w_time = 1.0;
  double w_dynamic = 50.0;
  double w_surface = 100.0;
  double w_dist = 20.0;
  double w_acc = 5.0;
  double w_orientation = 2.0;
  double d_activate = 10.0;      // m, distance-cost activation scale
  double grad_max = 0.25;        // unitless slope
  double step_max = 0.1;         // m
  double rel_height_max = 1.5;   // m
  int n_elev_samples = 1000;
  double v_floor = 0.3;          // m/s, time-cost regularizer
  double d_floor = 0.1;          // m, stop-cost regularizer
  int footprint_points = 5;      // per transverse array
};

struct Goal {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double radius = 2.0;      // m
  double stop_speed = 1.0;  // m/s
};

struct CostBreakdown {
  double time = 0.0;
  double dynamic = 0.0;
  double surface = 0.0;
  double dist = 0.0;
  double acc = 0.0;
  double orientation = 0.0;
  double total = 0.0;
};

// Terrain the cost evaluator reads: a mean layer plus a variance policy.
// base_variance == nullptr means identically zero (deterministic and
// prescient variants); rollout_unc, when set, overlays the per-rollout
// predicted-observation decay and is advanced pose by pose so step i only
// ever sees counts from poses before i.
struct TerrainView {
  const GridSpec* spec = nullptr;
  const Grid2D<float>* mean = nullptr;
  const Grid2D<float>* base_variance = nullptr;
  RolloutUncertainty* rollout_unc = nullptr;

  float mean_at(int ci, int cj) const { return mean->at(ci, cj); }
  float variance_at(int ci, int cj) const {
    if (rollout_unc) return rollout_unc->variance_at(ci, cj);
    if (base_variance) return base_variance->at(ci, cj);
    return 0.0f;
  }
};

// Per-rollout elevation-noise draws: one standard-normal stream per
// footprint slot (front array, rear array, CG), shared across horizon
// steps. Slots are independent of each other, so spatial difference
// indicators respond to uncertainty; reusing a slot's draws across steps
// keeps each sample a coherent terrain hypothesis over time.
class SurfaceSampler {
 public:
  SurfaceSampler(int footprint_points, int n_samples);
  void reseed(std::uint64_t seed);

  int n_samples() const { return n_samples_; }
  int n_slots() const { return n_slots_; }
  // Slots [0, P) front array, [P, 2P) rear array, 2P the CG.
  const float* slot(int s) const { return draws_.data() + size_t(s) * n_samples_; }

 private:
  int n_slots_;
  int n_samples_;
  std::vector<float> draws_;
};

double time_cost(const std::vector<VehicleState>& traj, const Goal& goal,
                 const CostWeights& w);
double dynamic_cost(const std::vector<VehicleState>& traj,
                    const DynamicLimits& limits, const CostWeights& w,
                    double dt, double v_eps);
double distance_cost(const std::vector<VehicleState>& traj, const Goal& goal,
                     const CostWeights& w);
double stop_cost(const std::vector<VehicleState>& traj, const Goal& goal,
                 const CostWeights& w);
double orientation_cost(const std::vector<VehicleState>& traj,
                        const Goal& goal, const CostWeights& w);

// Expected count of terrain-indicator violations under the footprint,
// averaged over the sampler's elevation draws. Drives view.rollout_unc
// through the trajectory when present.
double surface_cost(const std::vector<VehicleState>& traj,
                    const TerrainView& view, const CostWeights& w,
                    const VehicleParams& veh, SurfaceSampler& sampler);

CostBreakdown total_cost(const std::vector<VehicleState>& traj,
                         const TerrainView& view, const Goal& goal,
                         const CostWeights& w, const DynamicLimits& limits,
                         const VehicleParams& veh, double dt,
                         SurfaceSampler& sampler);

}  // namespace offnav

#endif  // OFFNAV_COST_HPP
