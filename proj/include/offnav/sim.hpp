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

#ifndef OFFNAV_SIM_HPP
#define OFFNAV_SIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "offnav/cost.hpp"
#include "offnav/dynamics.hpp"
#include "offnav/grid.hpp"
#include "offnav/mppi.hpp"
#include "offnav/sensor.hpp"
#include "offnav/visibility.hpp"

namespace offnav {

// Axis-aligned box written into the elevation grid.
struct BoxObstacle {
  double cx = 0.0;
  double cy = 0.0;
  double half_x = 1.0;
  double half_y = 1.0;
  double height = 2.5;

  bool contains(double x, double y) const {
    return std::abs(x - cx) <= half_x && std::abs(y - cy) <= half_y;
  }
};

struct Scenario {
  std::string name;
  GroundTruthMap truth;
  VehicleState start;
  Goal goal;
  std::vector<BoxObstacle> obstacles;
  // Obstacles occluded from the start pose; the builders assert this with
  // the sensor itself.
  std::vector<int> hidden_obstacles;
  double timeout_s = 40.0;
  double free_elevation = 0.0;
  double init_variance = 9.0;  // sigma_0 = 3 m away from the robot
  // Pre-surveyed bubble at the start pose; covers the sensor's standoff
  // blind radius so episodes do not begin on never-observed ground.
  double known_radius = 7.0;
};

void add_box(Scenario& sc, const BoxObstacle& box);

// Flat corridor with a central occluder and two hidden boxes behind it,
// one blocking each passage around the occluder.
Scenario build_alleyway();

// Straight road beside an open field, separated by a tall tree line with a
// gap at the far end; hidden boxes sit in the corner-cutting corridor
// behind the tree-line end.
Scenario build_offroad();

enum class Outcome {
  kSuccess,
  kCollision,
  kStopFailure,
  kTimeout,
  kDiverged,
};

const char* outcome_name(Outcome o);

struct SimConfig {
  MppiConfig mppi;
  CostWeights cost;
  VisibilityConfig vis;
  VehicleParams veh;
  SensorSpec sensor;
  int plant_substeps = 5;  // plant rate = substeps / mppi.dt
  int rollout_workers = 0;  // 0 = default_workers()
  bool record_trajectory = true;
};

struct ControlStepLog {
  double t = 0.0;
  VehicleState state;
  ControlInput input;
  StepDiagnostics diag;
};

struct PlantSample {
  double t = 0.0;
  VehicleState state;
  ControlInput input;
};

struct RunRecord {
  std::string scenario;
  Variant variant = Variant::kPrescient;
  int samples = 0;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::kTimeout;
  double time_to_goal = 0.0;  // valid when outcome == kSuccess
  double final_distance = 0.0;
  // Fraction of plant sub-steps whose footprint center lies on a cell the
  // sensor never observed during the episode.
  double unobserved_fraction = 0.0;
  std::string error;  // set when outcome == kDiverged
  std::vector<ControlStepLog> steps;
  std::vector<PlantSample> trajectory;
};

// Footprint = (lf + lr) x track rectangle at the pose; collision when any
// covered cell's true elevation rises >= clearance above the lowest
// covered cell.
bool footprint_collides(const GroundTruthMap& truth, const VehicleState& pose,
                        const VehicleParams& veh, double clearance = 0.5);

RunRecord run_episode(const Scenario& scenario, Variant variant,
                      const SimConfig& cfg, std::uint64_t seed);

struct BatchSummary {
  int n = 0;
  int success = 0;
  int collision = 0;
  int stop_failure = 0;
  int timeout = 0;
  int diverged = 0;
  double mean_time = 0.0;  // over successes only
  double std_time = 0.0;
  double mean_unobserved_fraction = 0.0;  // over all episodes
};

struct BatchResult {
  std::vector<RunRecord> records;
  BatchSummary summary;
};

// Episode seeds are base_seed + rep. episode_workers > 1 runs whole
// episodes in parallel (rollout_workers is forced to 1 in that case).
BatchResult run_batch(const Scenario& scenario, Variant variant,
                      const SimConfig& cfg, int n_reps,
                      std::uint64_t base_seed, int episode_workers = 1);

BatchSummary summarize(const std::vector<RunRecord>& records);

// JSON-lines episode log (one record per line) and CSV emitters matching
// the documented schemas.
void append_episode_jsonl(const std::string& path, const RunRecord& rec);
void write_summary_csv(const std::string& path,
                       const std::vector<BatchResult>& results);
void write_trajectory_csv(const std::string& path, const RunRecord& rec);

}  // namespace offnav

#endif  // OFFNAV_SIM_HPP
