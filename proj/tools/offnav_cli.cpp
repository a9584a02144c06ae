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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "offnav/config.hpp"
#include "offnav/core/kernels.hpp"
#include "offnav/sim.hpp"

namespace fs = std::filesystem;
using namespace offnav;

namespace {

Scenario load_scenario(const std::string& name) {
  if (name == "alleyway") return build_alleyway();
  if (name == "offroad") return build_offroad();
  if (fs::exists(name)) {
    Scenario sc;
    sc.name = fs::path(name).stem().string();
    sc.truth = load_ground_truth(name);
    return sc;
  }
  throw std::invalid_argument("unknown scenario (and no such file): " + name);
}

std::vector<Variant> selected_variants(const std::string& v) {
  if (v == "all") {
    return {Variant::kPrescient, Variant::kDeterministic,
            Variant::kVisibilityAware};
  }
  return {parse_variant(v)};
}

int cmd_run(const RunConfig& cfg) {
  const Scenario scenario = load_scenario(cfg.scenario);
  fs::create_directories(cfg.out_dir);
  {
    std::ofstream echo(fs::path(cfg.out_dir) / "effective_config.ini");
    echo << serialize_config(cfg);
  }

  std::vector<BatchResult> results;
  for (Variant variant : selected_variants(cfg.variant)) {
    std::cout << "running " << scenario.name << " / "
              << variant_name(variant) << " x" << cfg.reps
              << " (J=" << cfg.sim.mppi.samples << ")..." << std::endl;
    BatchResult r = run_batch(scenario, variant, cfg.sim, cfg.reps,
                              cfg.seed);
    const std::string log_name = std::string("episodes_") +
                                 variant_name(variant) + ".jsonl";
    const std::string log_path = (fs::path(cfg.out_dir) / log_name).string();
    std::ofstream(log_path).close();  // truncate
    for (const RunRecord& rec : r.records) {
      append_episode_jsonl(log_path, rec);
    }
    if (!r.records.empty() && cfg.sim.record_trajectory) {
      const std::string traj_name = std::string("trajectory_") +
                                    variant_name(variant) + "_rep0.csv";
      write_trajectory_csv((fs::path(cfg.out_dir) / traj_name).string(),
                           r.records.front());
    }
    const BatchSummary& s = r.summary;
    std::cout << "  success " << s.success << "/" << s.n << ", collision "
              << s.collision << ", stop_failure " << s.stop_failure
              << ", timeout " << s.timeout << ", diverged " << s.diverged
              << ", mean_time " << s.mean_time << " s" << std::endl;
    results.push_back(std::move(r));
  }
  write_summary_csv((fs::path(cfg.out_dir) / "summary.csv").string(),
                    results);
  std::cout << "summary written to " << cfg.out_dir << "/summary.csv"
            << std::endl;
  return 0;
}

int cmd_figures(const std::vector<std::string>& logs,
                const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream bars(fs::path(out_dir) / "fig_outcomes.csv");
  bars << "scenario,variant,J,outcome,fraction\n";
  std::ofstream times(fs::path(out_dir) / "fig_times.csv");
  times << "scenario,variant,J,seed,time_to_goal\n";
  std::ofstream surface(fs::path(out_dir) / "fig_min_surface.csv");
  surface << "scenario,variant,J,seed,step,t,min_surface\n";
  std::ofstream traj(fs::path(out_dir) / "fig_trajectories.csv");
  traj << "scenario,variant,J,seed,t,x,y,speed\n";

  long parsed = 0;
  std::map<std::string, std::map<std::string, int>> outcome_counts;
  for (const std::string& path : logs) {
    std::ifstream in(path);
    if (!in) {
      std::cerr << "cannot open log: " << path << std::endl;
      return 1;
    }
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const nlohmann::json j = nlohmann::json::parse(line);
      ++parsed;
      const std::string key = j["scenario"].get<std::string>() + "," +
                              j["variant"].get<std::string>() + "," +
                              std::to_string(j["samples"].get<int>());
      outcome_counts[key][j["outcome"].get<std::string>()]++;
      if (j["outcome"] == "success") {
        times << key << "," << j["seed"].get<std::uint64_t>() << ","
              << j["time_to_goal"].get<double>() << "\n";
      }
      int step_idx = 0;
      for (const auto& s : j["steps"]) {
        surface << key << "," << j["seed"].get<std::uint64_t>() << ","
                << step_idx << "," << s["t"].get<double>() << ","
                << s["min_surface"].get<double>() << "\n";
        traj << key << "," << j["seed"].get<std::uint64_t>() << ","
             << s["t"].get<double>() << "," << s["x"].get<double>() << ","
             << s["y"].get<double>() << "," << s["speed"].get<double>()
             << "\n";
        ++step_idx;
      }
    }
  }
  if (parsed == 0) {
    std::cerr << "no episodes found in the given logs" << std::endl;
    return 1;
  }
  for (const auto& [key, counts] : outcome_counts) {
    int total = 0;
    for (const auto& kv : counts) total += kv.second;
    for (const auto& [outcome, c] : counts) {
      bars << key << "," << outcome << ","
           << static_cast<double>(c) / total << "\n";
    }
  }
  std::cout << "figure data written to " << out_dir << " (" << parsed
            << " episodes)" << std::endl;
  return 0;
}

int cmd_validate(const RunConfig& cfg) {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name << std::endl;
    if (!ok) ++failures;
  };

  if (cfg.sim.vis.kernel_sigma <= 0 || !cfg.sim.vis.valid()) {
    std::cout << "FAIL  visibility config rejected before checks"
              << std::endl;
    return 1;
  }

  {
    const Grid2D<float> k = gaussian_kernel(cfg.sim.vis.kernel_size,
                                            cfg.sim.vis.kernel_sigma);
    double mass = 0.0;
    for (size_t i = 0; i < k.size(); ++i) mass += k.data()[i];
    check("splat kernel unit mass", std::abs(mass - 1.0) < 1e-6);
  }
  {
    const std::vector<double> costs = {3.0, 1.0, 2.0, 10.0};
    std::vector<double> shifted = costs;
    for (double& c : shifted) c += 123.0;
    const auto w1 = weights_from_costs(costs, cfg.sim.mppi.lambda);
    const auto w2 = weights_from_costs(shifted, cfg.sim.mppi.lambda);
    bool ok = true;
    double sum = 0.0;
    for (size_t i = 0; i < w1.size(); ++i) {
      ok = ok && std::abs(w1[i] - w2[i]) < 1e-12;
      sum += w1[i];
    }
    check("softmax shift invariance + normalization",
          ok && std::abs(sum - 1.0) < 1e-12);
  }
  {
    VehicleState s;
    s.speed = 8.0;
    ControlInput u{0.2, 1000.0};
    ControlInput um{-0.2, 1000.0};
    const VehicleState a = step(s, u, cfg.sim.veh, 0.01);
    const VehicleState b = step(s, um, cfg.sim.veh, 0.01);
    check("dynamics mirror symmetry",
          std::abs(a.lat_speed + b.lat_speed) < 1e-12 &&
              std::abs(a.yaw_rate + b.yaw_rate) < 1e-12 &&
              std::abs(a.speed - b.speed) < 1e-12);
  }
  {
    // Decay monotonicity with the configured gamma.
    bool ok = cfg.sim.vis.gamma > 0;
    if (ok) {
      Grid2D<float> var(8, 8, 2.0f);
      Grid2D<float> counts(8, 8, 1.0f);
      Grid2D<float> before = var;
      decay_variance(var, counts, cfg.sim.vis.gamma);
      for (size_t i = 0; i < var.size(); ++i) {
        ok = ok && var.data()[i] <= before.data()[i];
      }
    }
    check("variance decay monotone (gamma > 0)", ok);
  }
  {
    // Occlusion oracle on a small map: a wall must shadow the cells
    // behind it.
    GridSpec spec;
    spec.side_length = 10.0;
    spec.resolution = 0.2;
    GroundTruthMap truth(spec);
    for (int j = 20; j < 30; ++j) truth.elevation.at(30, j) = 3.0f;
    VehicleState pose;
    pose.x = 2.0;
    pose.y = 5.0;
    const ObservationSet obs = raycast_3d(truth, pose, cfg.sim.sensor);
    bool ok = !obs.hits.empty();
    for (const Hit& h : obs.hits) {
      // Nothing directly behind the wall within its shadowed rows.
      ok = ok && !(h.cell.i > 30 && h.cell.j >= 21 && h.cell.j <= 28);
    }
    check("occlusion soundness (50x50 wall oracle)", ok);
  }
  std::cout << (failures == 0 ? "all invariants pass"
                              : "invariant failures: " +
                                    std::to_string(failures))
            << std::endl;
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visibility-aware sampling MPC lab"};
  app.require_subcommand(1);

  std::string config_path;
  std::string scenario, variant, out_dir;
  int samples = -1, reps = -1;
  long long seed = -1;
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file (INI sections)");
    sub->add_option("--scenario", scenario, "alleyway | offroad | map file");
    sub->add_option("--variant", variant, "prescient | det | va | all");
    sub->add_option("--samples", samples, "MPPI sample count J");
    sub->add_option("--reps", reps, "episodes per variant");
    sub->add_option("--seed", seed, "base seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--set", overrides,
                    "extra section.key=value overrides (repeatable)");
  };

  CLI::App* run = app.add_subcommand("run", "run a Monte Carlo batch");
  add_common(run);

  CLI::App* figures =
      app.add_subcommand("figures", "emit plot data from episode logs");
  std::vector<std::string> logs;
  std::string fig_out = "figures";
  figures->add_option("logs", logs, "episode .jsonl files")->required();
  figures->add_option("--out", fig_out, "output directory");

  CLI::App* validate =
      app.add_subcommand("validate", "run the fast invariant suite");
  add_common(validate);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = parse_config_file(config_path);
    if (!scenario.empty()) cfg.scenario = scenario;
    if (!variant.empty()) cfg.variant = variant;
    if (samples > 0) cfg.sim.mppi.samples = samples;
    if (reps > 0) cfg.reps = reps;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("--set expects section.key=value, got " +
                                    kv);
      }
      set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }

    if (run->parsed()) return cmd_run(cfg);
    if (figures->parsed()) return cmd_figures(logs, fig_out);
    if (validate->parsed()) return cmd_validate(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
