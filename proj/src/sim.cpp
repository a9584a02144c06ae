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

#include "offnav/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "offnav/core/parallel.hpp"

namespace offnav {

void add_box(Scenario& sc, const BoxObstacle& box) {
  const GridSpec& spec = sc.truth.spec;
  const int n = spec.cells_per_side();
  const auto lo = world_to_cell(box.cx - box.half_x, box.cy - box.half_y,
                                spec);
  const int i0 = std::max(0, static_cast<int>(
      std::floor((box.cx - box.half_x - spec.origin_x) / spec.resolution)));
  const int j0 = std::max(0, static_cast<int>(
      std::floor((box.cy - box.half_y - spec.origin_y) / spec.resolution)));
  const int i1 = std::min(n - 1, static_cast<int>(
      std::floor((box.cx + box.half_x - spec.origin_x) / spec.resolution)));
  const int j1 = std::min(n - 1, static_cast<int>(
      std::floor((box.cy + box.half_y - spec.origin_y) / spec.resolution)));
  (void)lo;
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      float& e = sc.truth.elevation.at(i, j);
      e = std::max(e, static_cast<float>(box.height));
    }
  }
  sc.obstacles.push_back(box);
}

namespace {

// Construction-time check that the listed obstacles produce no sensor hits
// from the given poses.
void assert_hidden(const Scenario& sc, const std::vector<VehicleState>& poses,
                   const std::vector<int>& hidden) {
  SensorSpec sensor;
  for (const VehicleState& pose : poses) {
    const ObservationSet obs = raycast_3d(sc.truth, pose, sensor);
    for (const Hit& h : obs.hits) {
      const double x = cell_center_x(h.cell, sc.truth.spec);
      const double y = cell_center_y(h.cell, sc.truth.spec);
      for (int idx : hidden) {
        if (sc.obstacles[idx].contains(x, y)) {
          throw std::logic_error(
              sc.name + ": obstacle " + std::to_string(idx) +
              " is visible from (" + std::to_string(pose.x) + ", " +
              std::to_string(pose.y) + ")");
        }
      }
    }
  }
}

}  // namespace

Scenario build_alleyway() {
  Scenario sc;
  sc.name = "alleyway";
  sc.truth = GroundTruthMap(GridSpec{});
  sc.start = VehicleState{0.0, 0.0, 0.0, 10.0, 40.0, 0.0};
  sc.goal = Goal{70.0, 40.0, 0.0};

  // Corridor walls; inner faces at y = 31 and y = 49.
  add_box(sc, {40.0, 30.0, 38.0, 1.0, 2.5});
  add_box(sc, {40.0, 50.0, 38.0, 1.0, 2.5});
  // Central occluder; 5 m passages remain on each side.
  add_box(sc, {40.0, 40.0, 2.0, 4.0, 2.5});
  // Hidden boxes inside the occluder's shadow cone, staggered so the
  // corner-cutting lines are trapped while an outer lane plus a late
  // center lane stay drivable.
  const int first_hidden = static_cast<int>(sc.obstacles.size());
  add_box(sc, {48.0, 43.4, 1.5, 1.6, 2.5});
  add_box(sc, {48.0, 36.6, 1.5, 1.6, 2.5});
  for (int k = first_hidden; k < static_cast<int>(sc.obstacles.size()); ++k) {
    sc.hidden_obstacles.push_back(k);
  }
  assert_hidden(sc, {sc.start}, sc.hidden_obstacles);
  return sc;
}

Scenario build_offroad() {
  Scenario sc;
  sc.name = "offroad";
  sc.truth = GroundTruthMap(GridSpec{});
  sc.start = VehicleState{0.0, 0.0, 0.0, 8.0, 24.0, 0.0};
  sc.goal = Goal{72.0, 24.0, 0.0, 2.5};

  // Two dry washes cross the course. Both are entirely below grade, so
  // no pose at any range ever sights their floors: beyond ~5.6 m the rim
  // occludes the floor, and closer than that the ground is under the
  // sensor's vertical field of view. Each has one flat causeway, offset
  // from the straight start-goal line on opposite sides, so an informed
  // planner weaves gently while a planner that trusts unseen ground holds
  // the bee line across both floors.
  //
  // The first wash is shallow enough to drive through; crossing it only
  // means riding over ground that was never observed. The second is deep
  // enough that dropping a wheel in exceeds the vehicle's clearance.
  for (int j = 0; j < sc.truth.spec.cells_per_side(); ++j) {
    for (int i = 0; i < sc.truth.spec.cells_per_side(); ++i) {
      const double x = cell_center_x({i, j}, sc.truth.spec);
      const double y = cell_center_y({i, j}, sc.truth.spec);
      if (x >= 30.0 && x <= 31.6 && y >= 10.0 && y <= 38.0 &&
          !(y >= 27.5 && y <= 32.0)) {
        sc.truth.elevation.at(i, j) = -0.4f;
      }
      if (x >= 52.0 && x <= 54.0 && y >= 12.0 && y <= 36.0 &&
          !(y >= 27.5 && y <= 32.0)) {
        // Banked shoulders beside the causeway: a clipped corner drops a
        // wheel without exceeding the clearance.
        const bool shoulder = (y >= 26.5 && y < 27.5) || (y > 32.0 && y <= 33.0);
        sc.truth.elevation.at(i, j) = shoulder ? -0.3f : -0.65f;
      }
    }
  }
  // Scattered tree clumps well off every line, for scenery and sensor
  // clutter.
  add_box(sc, {20.0, 42.0, 2.0, 2.0, 3.5});
  add_box(sc, {44.0, 8.0, 2.5, 2.0, 3.5});
  add_box(sc, {63.0, 38.0, 2.0, 2.5, 3.5});
  return sc;
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kSuccess: return "success";
    case Outcome::kCollision: return "collision";
    case Outcome::kStopFailure: return "stop_failure";
    case Outcome::kTimeout: return "timeout";
    case Outcome::kDiverged: return "diverged";
  }
  return "unknown";
}

bool footprint_collides(const GroundTruthMap& truth, const VehicleState& pose,
                        const VehicleParams& veh, double clearance) {
  const GridSpec& spec = truth.spec;
  const double half_len = (veh.lf + veh.lr) / 2.0;
  const double half_wid = veh.track / 2.0;
  const double step = spec.resolution / 2.0;
  const double ch = std::cos(pose.yaw);
  const double sh = std::sin(pose.yaw);

  float lo = std::numeric_limits<float>::max();
  float hi = std::numeric_limits<float>::lowest();
  for (double u = -half_len; u <= half_len + 1e-9; u += step) {
    for (double v = -half_wid; v <= half_wid + 1e-9; v += step) {
      const double x = pose.x + ch * u - sh * v;
      const double y = pose.y + sh * u + ch * v;
      const auto cell = world_to_cell(x, y, spec);
      if (!cell) continue;
      const float e = truth.elevation.at(*cell);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
  }
  if (lo > hi) return false;  // footprint entirely off-map
  return hi - lo >= static_cast<float>(clearance);
}

RunRecord run_episode(const Scenario& scenario, Variant variant,
                      const SimConfig& cfg, std::uint64_t seed) {
  RunRecord rec;
  rec.scenario = scenario.name;
  rec.variant = variant;
  rec.samples = cfg.mppi.samples;
  rec.seed = seed;

  const GridSpec& spec = scenario.truth.spec;
  const int workers =
      cfg.rollout_workers > 0 ? cfg.rollout_workers : default_workers();
  MppiController ctrl(cfg.mppi, cfg.veh, cfg.cost, cfg.vis, variant, spec,
                      workers);
  ctrl.reset_episode(seed);

  ElevationBelief belief =
      init_belief(spec, scenario.start.x, scenario.start.y,
                  scenario.free_elevation, scenario.init_variance,
                  scenario.known_radius);

  VehicleState state = scenario.start;
  const double plant_dt = cfg.mppi.dt / cfg.plant_substeps;
  double t = 0.0;
  long unobs_substeps = 0;
  long total_substeps = 0;
  bool done = false;

  auto dist_to_goal = [&](const VehicleState& s) {
    return std::hypot(s.x - scenario.goal.x, s.y - scenario.goal.y);
  };

  for (int k = 0; !done && t < scenario.timeout_s - 1e-9; ++k) {
    if (variant != Variant::kPrescient) {
      const ObservationSet obs = raycast_3d(scenario.truth, state,
                                            cfg.sensor);
      fuse_observations(belief, obs, cfg.sensor.gamma_obs);
    }

    BeliefView view;
    view.spec = &spec;
    switch (variant) {
      case Variant::kPrescient:
        view.mean = &scenario.truth.elevation;
        break;
      case Variant::kDeterministic:
        view.mean = &belief.mean;
        break;
      case Variant::kVisibilityAware:
        view.mean = &belief.mean;
        view.variance = &belief.variance;
        break;
    }

    ControlStepLog log;
    log.t = t;
    log.state = state;
    try {
      log.input = ctrl.control_step(state, view, scenario.goal, k,
                                    &log.diag);
    } catch (const std::exception& e) {
      rec.outcome = Outcome::kDiverged;
      rec.error = e.what();
      done = true;
      break;
    }
    rec.steps.push_back(log);

    for (int s = 0; s < cfg.plant_substeps && !done; ++s) {
      try {
        state = step(state, log.input, cfg.veh, plant_dt);
      } catch (const std::exception& e) {
        rec.outcome = Outcome::kDiverged;
        rec.error = e.what();
        done = true;
        break;
      }
      t += plant_dt;
      if (cfg.record_trajectory) {
        rec.trajectory.push_back({t, state, log.input});
      }
      ++total_substeps;
      if (const auto c = world_to_cell(state.x, state.y, spec)) {
        if (!belief.observed.at(*c)) ++unobs_substeps;
      }
      if (footprint_collides(scenario.truth, state, cfg.veh)) {
        rec.outcome = Outcome::kCollision;
        done = true;
        break;
      }
      if (dist_to_goal(state) <= scenario.goal.radius &&
          std::abs(state.speed) < scenario.goal.stop_speed) {
        rec.outcome = Outcome::kSuccess;
        rec.time_to_goal = t;
        done = true;
        break;
      }
    }
  }

  rec.final_distance = dist_to_goal(state);
  if (!done) {
    rec.outcome = rec.final_distance < 6.0 ? Outcome::kStopFailure
                                           : Outcome::kTimeout;
  }
  rec.unobserved_fraction =
      total_substeps > 0
          ? static_cast<double>(unobs_substeps) / total_substeps
          : 0.0;
  return rec;
}

BatchResult run_batch(const Scenario& scenario, Variant variant,
                      const SimConfig& cfg, int n_reps,
                      std::uint64_t base_seed, int episode_workers) {
  BatchResult result;
  result.records.resize(n_reps);
  SimConfig episode_cfg = cfg;
  if (episode_workers > 1) episode_cfg.rollout_workers = 1;
  parallel_for(n_reps, episode_workers, [&](int, int rep) {
    result.records[rep] =
        run_episode(scenario, variant, episode_cfg, base_seed + rep);
  });
  result.summary = summarize(result.records);
  return result;
}

BatchSummary summarize(const std::vector<RunRecord>& records) {
  BatchSummary s;
  s.n = static_cast<int>(records.size());
  double sum_t = 0.0, sum_t2 = 0.0, sum_unobs = 0.0;
  for (const RunRecord& r : records) {
    switch (r.outcome) {
      case Outcome::kSuccess:
        ++s.success;
        sum_t += r.time_to_goal;
        sum_t2 += r.time_to_goal * r.time_to_goal;
        break;
      case Outcome::kCollision: ++s.collision; break;
      case Outcome::kStopFailure: ++s.stop_failure; break;
      case Outcome::kTimeout: ++s.timeout; break;
      case Outcome::kDiverged: ++s.diverged; break;
    }
    sum_unobs += r.unobserved_fraction;
  }
  if (s.success > 0) {
    s.mean_time = sum_t / s.success;
    const double var =
        std::max(0.0, sum_t2 / s.success - s.mean_time * s.mean_time);
    s.std_time = std::sqrt(var);
  }
  if (s.n > 0) s.mean_unobserved_fraction = sum_unobs / s.n;
  return s;
}

void append_episode_jsonl(const std::string& path, const RunRecord& rec) {
  nlohmann::json j;
  j["scenario"] = rec.scenario;
  j["variant"] = variant_name(rec.variant);
  j["samples"] = rec.samples;
  j["seed"] = rec.seed;
  j["outcome"] = outcome_name(rec.outcome);
  j["time_to_goal"] = rec.time_to_goal;
  j["final_distance"] = rec.final_distance;
  j["unobserved_fraction"] = rec.unobserved_fraction;
  if (!rec.error.empty()) j["error"] = rec.error;
  nlohmann::json steps = nlohmann::json::array();
  for (const ControlStepLog& s : rec.steps) {
    steps.push_back({{"t", s.t},
                     {"x", s.state.x},
                     {"y", s.state.y},
                     {"yaw", s.state.yaw},
                     {"speed", s.state.speed},
                     {"steer", s.input.steer},
                     {"force", s.input.force},
                     {"solve_ms", s.diag.solve_ms},
                     {"ess", s.diag.ess},
                     {"min_total", s.diag.min_total},
                     {"mean_total", s.diag.mean_total},
                     {"min_surface", s.diag.min_surface},
                     {"mean_surface", s.diag.mean_surface}});
  }
  j["steps"] = std::move(steps);
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump() << "\n";
}

void write_summary_csv(const std::string& path,
                       const std::vector<BatchResult>& results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "scenario,variant,J,n_reps,success,collision,stop_failure,timeout,"
         "mean_time,std_time\n";
  for (const BatchResult& r : results) {
    if (r.records.empty()) continue;
    const RunRecord& first = r.records.front();
    const BatchSummary& s = r.summary;
    out << first.scenario << "," << variant_name(first.variant) << ","
        << first.samples << "," << s.n << "," << s.success << ","
        << s.collision << "," << s.stop_failure << ","
        << s.timeout + s.diverged << "," << s.mean_time << "," << s.std_time
        << "\n";
  }
}

void write_trajectory_csv(const std::string& path, const RunRecord& rec) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t,V,v,r,X,Y,psi,steer,force\n";
  for (const PlantSample& p : rec.trajectory) {
    out << p.t << "," << p.state.speed << "," << p.state.lat_speed << ","
        << p.state.yaw_rate << "," << p.state.x << "," << p.state.y << ","
        << wrap_angle(p.state.yaw) << "," << p.input.steer << ","
        << p.input.force << "\n";
  }
}

}  // namespace offnav
