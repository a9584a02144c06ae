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

#include "offnav/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace offnav {
namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

double to_double(const std::string& v) {
  size_t pos = 0;
  const double d = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("trailing characters");
  return d;
}

int to_int(const std::string& v) {
  size_t pos = 0;
  const long d = std::stol(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("trailing characters");
  return static_cast<int>(d);
}

std::uint64_t to_u64(const std::string& v) {
  size_t pos = 0;
  const unsigned long long d = std::stoull(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("trailing characters");
  return d;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("expected true/false");
}

#define FIELD_D(name, expr) \
  {name, [](RunConfig& c, const std::string& v) { expr = to_double(v); }}
#define FIELD_I(name, expr) \
  {name, [](RunConfig& c, const std::string& v) { expr = to_int(v); }}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"run.scenario",
       [](RunConfig& c, const std::string& v) { c.scenario = v; }},
      {"run.variant",
       [](RunConfig& c, const std::string& v) { c.variant = v; }},
      FIELD_I("run.reps", c.reps),
      {"run.seed",
       [](RunConfig& c, const std::string& v) { c.seed = to_u64(v); }},
      {"run.out_dir",
       [](RunConfig& c, const std::string& v) { c.out_dir = v; }},

      FIELD_I("mppi.samples", c.sim.mppi.samples),
      FIELD_I("mppi.horizon", c.sim.mppi.horizon),
      FIELD_D("mppi.dt", c.sim.mppi.dt),
      FIELD_D("mppi.lambda", c.sim.mppi.lambda),
      FIELD_D("mppi.noise_steer", c.sim.mppi.noise_steer),
      FIELD_D("mppi.noise_force", c.sim.mppi.noise_force),
      FIELD_I("mppi.opt_iters", c.sim.mppi.opt_iters),

      FIELD_D("cost.w_time", c.sim.cost.w_time),
      FIELD_D("cost.w_dynamic", c.sim.cost.w_dynamic),
      FIELD_D("cost.w_surface", c.sim.cost.w_surface),
      FIELD_D("cost.w_dist", c.sim.cost.w_dist),
      FIELD_D("cost.w_acc", c.sim.cost.w_acc),
      FIELD_D("cost.w_orientation", c.sim.cost.w_orientation),
      FIELD_D("cost.d_activate", c.sim.cost.d_activate),
      FIELD_D("cost.grad_max", c.sim.cost.grad_max),
      FIELD_D("cost.step_max", c.sim.cost.step_max),
      FIELD_D("cost.rel_height_max", c.sim.cost.rel_height_max),
      FIELD_I("cost.n_elev_samples", c.sim.cost.n_elev_samples),
      FIELD_D("cost.v_floor", c.sim.cost.v_floor),
      FIELD_D("cost.d_floor", c.sim.cost.d_floor),
      FIELD_I("cost.footprint_points", c.sim.cost.footprint_points),

      FIELD_I("visibility.n_rays", c.sim.vis.n_rays),
      FIELD_I("visibility.points_per_ray", c.sim.vis.points_per_ray),
      FIELD_D("visibility.ray_start", c.sim.vis.ray_start),
      FIELD_D("visibility.ray_end", c.sim.vis.ray_end),
      FIELD_D("visibility.fov_deg", c.sim.vis.fov_deg),
      FIELD_D("visibility.threshold_height", c.sim.vis.threshold_height),
      FIELD_D("visibility.count_value", c.sim.vis.count_value),
      FIELD_D("visibility.gamma", c.sim.vis.gamma),
      FIELD_I("visibility.kernel_size", c.sim.vis.kernel_size),
      FIELD_D("visibility.kernel_sigma", c.sim.vis.kernel_sigma),
      FIELD_I("visibility.pose_stride", c.sim.vis.pose_stride),

      FIELD_D("vehicle.mass", c.sim.veh.mass),
      FIELD_D("vehicle.lf", c.sim.veh.lf),
      FIELD_D("vehicle.lr", c.sim.veh.lr),
      FIELD_D("vehicle.track", c.sim.veh.track),
      FIELD_D("vehicle.pac_b", c.sim.veh.pac_b),
      FIELD_D("vehicle.pac_c", c.sim.veh.pac_c),
      FIELD_D("vehicle.pac_d", c.sim.veh.pac_d),
      FIELD_D("vehicle.pac_e", c.sim.veh.pac_e),
      FIELD_D("vehicle.drag_coeff", c.sim.veh.drag_coeff),
      FIELD_D("vehicle.frontal_area", c.sim.veh.frontal_area),
      FIELD_D("vehicle.air_density", c.sim.veh.air_density),
      FIELD_D("vehicle.rolling_coeff", c.sim.veh.rolling_coeff),
      FIELD_D("vehicle.gravity", c.sim.veh.gravity),
      FIELD_D("vehicle.yaw_inertia", c.sim.veh.yaw_inertia),
      FIELD_D("vehicle.cg_height", c.sim.veh.cg_height),
      FIELD_D("vehicle.v_eps", c.sim.veh.v_eps),
      FIELD_D("vehicle.steer_max", c.sim.veh.steer_max),
      FIELD_D("vehicle.force_min", c.sim.veh.force_min),
      FIELD_D("vehicle.force_max", c.sim.veh.force_max),

      FIELD_D("sensor.fov_deg", c.sim.sensor.fov_deg),
      FIELD_D("sensor.max_range", c.sim.sensor.max_range),
      FIELD_D("sensor.mount_height", c.sim.sensor.mount_height),
      FIELD_I("sensor.azimuth_rays", c.sim.sensor.azimuth_rays),
      FIELD_I("sensor.elevation_rays", c.sim.sensor.elevation_rays),
      FIELD_D("sensor.vertical_fov_deg", c.sim.sensor.vertical_fov_deg),
      FIELD_D("sensor.gamma_obs", c.sim.sensor.gamma_obs),

      FIELD_I("sim.plant_substeps", c.sim.plant_substeps),
      FIELD_I("sim.rollout_workers", c.sim.rollout_workers),
      {"sim.record_trajectory",
       [](RunConfig& c, const std::string& v) {
         c.sim.record_trajectory = to_bool(v);
       }},
  };
  return table;
}

#undef FIELD_D
#undef FIELD_I

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& dotted_key,
                      const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(dotted_key);
  if (it == table.end()) {
    throw std::invalid_argument("unknown config key: " + dotted_key);
  }
  try {
    it->second(cfg, value);
  } catch (const std::exception& e) {
    throw std::invalid_argument("bad value for " + dotted_key + ": '" +
                                value + "' (" + e.what() + ")");
  }
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  RunConfig cfg;
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                    ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set_config_value(cfg, section.empty() ? key : section + "." + key,
                       value);
    } catch (const std::exception& e) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": " + e.what());
    }
  }
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "[run]\n"
      << "scenario = " << cfg.scenario << "\n"
      << "variant = " << cfg.variant << "\n"
      << "reps = " << cfg.reps << "\n"
      << "seed = " << cfg.seed << "\n"
      << "out_dir = " << cfg.out_dir << "\n\n";
  out << "[mppi]\n"
      << "samples = " << cfg.sim.mppi.samples << "\n"
      << "horizon = " << cfg.sim.mppi.horizon << "\n"
      << "dt = " << cfg.sim.mppi.dt << "\n"
      << "lambda = " << cfg.sim.mppi.lambda << "\n"
      << "noise_steer = " << cfg.sim.mppi.noise_steer << "\n"
      << "noise_force = " << cfg.sim.mppi.noise_force << "\n"
      << "opt_iters = " << cfg.sim.mppi.opt_iters << "\n\n";
  out << "[cost]\n"
      << "w_time = " << cfg.sim.cost.w_time << "\n"
      << "w_dynamic = " << cfg.sim.cost.w_dynamic << "\n"
      << "w_surface = " << cfg.sim.cost.w_surface << "\n"
      << "w_dist = " << cfg.sim.cost.w_dist << "\n"
      << "w_acc = " << cfg.sim.cost.w_acc << "\n"
      << "w_orientation = " << cfg.sim.cost.w_orientation << "\n"
      << "d_activate = " << cfg.sim.cost.d_activate << "\n"
      << "grad_max = " << cfg.sim.cost.grad_max << "\n"
      << "step_max = " << cfg.sim.cost.step_max << "\n"
      << "rel_height_max = " << cfg.sim.cost.rel_height_max << "\n"
      << "n_elev_samples = " << cfg.sim.cost.n_elev_samples << "\n"
      << "v_floor = " << cfg.sim.cost.v_floor << "\n"
      << "d_floor = " << cfg.sim.cost.d_floor << "\n"
      << "footprint_points = " << cfg.sim.cost.footprint_points << "\n\n";
  out << "[visibility]\n"
      << "n_rays = " << cfg.sim.vis.n_rays << "\n"
      << "points_per_ray = " << cfg.sim.vis.points_per_ray << "\n"
      << "ray_start = " << cfg.sim.vis.ray_start << "\n"
      << "ray_end = " << cfg.sim.vis.ray_end << "\n"
      << "fov_deg = " << cfg.sim.vis.fov_deg << "\n"
      << "threshold_height = " << cfg.sim.vis.threshold_height << "\n"
      << "count_value = " << cfg.sim.vis.count_value << "\n"
      << "gamma = " << cfg.sim.vis.gamma << "\n"
      << "kernel_size = " << cfg.sim.vis.kernel_size << "\n"
      << "kernel_sigma = " << cfg.sim.vis.kernel_sigma << "\n"
      << "pose_stride = " << cfg.sim.vis.pose_stride << "\n\n";
  out << "[vehicle]\n"
      << "mass = " << cfg.sim.veh.mass << "\n"
      << "lf = " << cfg.sim.veh.lf << "\n"
      << "lr = " << cfg.sim.veh.lr << "\n"
      << "track = " << cfg.sim.veh.track << "\n"
      << "pac_b = " << cfg.sim.veh.pac_b << "\n"
      << "pac_c = " << cfg.sim.veh.pac_c << "\n"
      << "pac_d = " << cfg.sim.veh.pac_d << "\n"
      << "pac_e = " << cfg.sim.veh.pac_e << "\n"
      << "drag_coeff = " << cfg.sim.veh.drag_coeff << "\n"
      << "frontal_area = " << cfg.sim.veh.frontal_area << "\n"
      << "air_density = " << cfg.sim.veh.air_density << "\n"
      << "rolling_coeff = " << cfg.sim.veh.rolling_coeff << "\n"
      << "gravity = " << cfg.sim.veh.gravity << "\n"
      << "yaw_inertia = " << cfg.sim.veh.yaw_inertia << "\n"
      << "cg_height = " << cfg.sim.veh.cg_height << "\n"
      << "v_eps = " << cfg.sim.veh.v_eps << "\n"
      << "steer_max = " << cfg.sim.veh.steer_max << "\n"
      << "force_min = " << cfg.sim.veh.force_min << "\n"
      << "force_max = " << cfg.sim.veh.force_max << "\n\n";
  out << "[sensor]\n"
      << "fov_deg = " << cfg.sim.sensor.fov_deg << "\n"
      << "max_range = " << cfg.sim.sensor.max_range << "\n"
      << "mount_height = " << cfg.sim.sensor.mount_height << "\n"
      << "azimuth_rays = " << cfg.sim.sensor.azimuth_rays << "\n"
      << "elevation_rays = " << cfg.sim.sensor.elevation_rays << "\n"
      << "vertical_fov_deg = " << cfg.sim.sensor.vertical_fov_deg << "\n"
      << "gamma_obs = " << cfg.sim.sensor.gamma_obs << "\n\n";
  out << "[sim]\n"
      << "plant_substeps = " << cfg.sim.plant_substeps << "\n"
      << "rollout_workers = " << cfg.sim.rollout_workers << "\n"
      << "record_trajectory = "
      << (cfg.sim.record_trajectory ? "true" : "false") << "\n";
  return out.str();
}

Variant parse_variant(const std::string& name) {
  if (name == "prescient") return Variant::kPrescient;
  if (name == "det" || name == "deterministic") {
    return Variant::kDeterministic;
  }
  if (name == "va" || name == "visibility_aware") {
    return Variant::kVisibilityAware;
  }
  throw std::invalid_argument("unknown variant: " + name);
}

}  // namespace offnav
