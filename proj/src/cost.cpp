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

#include "offnav/cost.hpp"

#include <algorithm>
#include <cmath>

#include "offnav/core/kernels.hpp"

namespace offnav {
namespace {

double dist_to_goal(const VehicleState& s, const Goal& g) {
  return std::hypot(s.x - g.x, s.y - g.y);
}

// Activation well: ~0 far from the goal, 0.5 at d0 = d_activate / 2,
// ~1 at the goal.
double goal_activation(double d0, double d_activate) {
  return 1.0 - 1.0 / (1.0 + std::exp(-2.0 * d0 + d_activate));
}

constexpr float kSigmaEps = 1e-3f;  // below this, treat a point as exact

}  // namespace

SurfaceSampler::SurfaceSampler(int footprint_points, int n_samples)
    : n_slots_(2 * footprint_points + 1),
      n_samples_(n_samples),
      draws_(size_t(n_slots_) * n_samples) {}

void SurfaceSampler::reseed(std::uint64_t seed) {
  Rng rng(seed);
  for (float& d : draws_) d = rng.normal_f();
}

double time_cost(const std::vector<VehicleState>& traj, const Goal& goal,
                 const CostWeights& w) {
  const int n = static_cast<int>(traj.size()) - 1;
  if (n <= 0) return 0.0;
  const int i1 = n / 2;
  const int i2 = (3 * n) / 4;
  auto term = [&](int i, double scale) {
    const double d = dist_to_goal(traj[i], goal);
    const double v = std::max(traj[i].speed, w.v_floor);
    return d / (scale * v);
  };
  return w.w_time * (term(i1, 4.0) + term(i2, 2.0) + term(n, 1.0));
}

double dynamic_cost(const std::vector<VehicleState>& traj,
                    const DynamicLimits& limits, const CostWeights& w,
                    double dt, double v_eps) {
  int events = 0;
  for (size_t i = 1; i < traj.size(); ++i) {
    const VehicleState& a = traj[i - 1];
    const VehicleState& b = traj[i];
    const double ax = (b.speed - a.speed) / dt;
    const double vdot = (b.lat_speed - a.lat_speed) / dt;
    const double ay = vdot + b.speed * b.yaw_rate;
    const double atot = std::hypot(ax, ay);
    const double beta = std::atan2(b.lat_speed, std::max(b.speed, v_eps));
    events += (std::abs(ay) >= limits.accel_roll) ? 1 : 0;
    events += (atot >= limits.accel_max) ? 1 : 0;
    events += (std::abs(beta) >= limits.beta_max) ? 1 : 0;
    events += (std::abs(b.lat_speed) >= limits.lat_speed_max) ? 1 : 0;
  }
  return w.w_dynamic * events;
}

double distance_cost(const std::vector<VehicleState>& traj, const Goal& goal,
                     const CostWeights& w) {
  const double d0 = dist_to_goal(traj.front(), goal);
  if (d0 <= 1e-9) return 0.0;
  const double dn = dist_to_goal(traj.back(), goal);
  const double phi = goal_activation(d0, w.d_activate);
  return w.w_dist * (dn / d0 + 2.0 * phi * dn / d0);
}

double stop_cost(const std::vector<VehicleState>& traj, const Goal& goal,
                 const CostWeights& w) {
  const VehicleState& last = traj.back();
  const double vn = last.speed;
  const double dn = std::max(dist_to_goal(last, goal), w.d_floor);
  return w.w_acc * (vn * vn * std::abs(vn)) / (2.0 * dn);
}

double orientation_cost(const std::vector<VehicleState>& traj,
                        const Goal& goal, const CostWeights& w) {
  const int n = static_cast<int>(traj.size()) - 1;
  if (n <= 0) return 0.0;
  const double phi = goal_activation(dist_to_goal(traj.front(), goal),
                                     w.d_activate);
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double err = std::abs(wrap_angle(traj[i].yaw - goal.yaw));
    sum += err * (static_cast<double>(i) / n);
  }
  return w.w_orientation * phi * sum;
}

namespace {

struct SlotSample {
  float mu = 0.0f;
  float sigma = 0.0f;
  bool off_map = true;
};

// Expected fraction of draws where |(mu_a - mu_b) + xi_a*sg_a - xi_b*sg_b|
// exceeds thr. Both sigmas effectively zero short-circuits to the
// deterministic indicator.
double pair_indicator(const SurfaceSampler& smp, int slot_a, int slot_b,
                      const SlotSample& a, const SlotSample& b, float thr) {
  const float bias = a.mu - b.mu;
  if (a.sigma < kSigmaEps && b.sigma < kSigmaEps) {
    return std::fabs(bias) > thr ? 1.0 : 0.0;
  }
  const int n = smp.n_samples();
  const int count = kern::active().indicator_count(
      smp.slot(slot_a), smp.slot(slot_b), n, a.sigma, b.sigma, bias, thr);
  return static_cast<double>(count) / n;
}

}  // namespace

double surface_cost(const std::vector<VehicleState>& traj,
                    const TerrainView& view, const CostWeights& w,
                    const VehicleParams& veh, SurfaceSampler& sampler) {
  const GridSpec& spec = *view.spec;
  const int p = w.footprint_points;
  const int cg_slot = 2 * p;
  const double spacing = veh.track / (p - 1);
  const float thr_grad_x = static_cast<float>(w.grad_max * veh.wheelbase());
  const float thr_grad_y = static_cast<float>(w.grad_max * spacing);
  const float thr_step = static_cast<float>(w.step_max);
  const float thr_rel = static_cast<float>(w.rel_height_max);

  std::vector<SlotSample> cur(2 * p + 1), prev(2 * p + 1);
  bool have_prev = false;
  double expected = 0.0;

  for (size_t step = 0; step < traj.size(); ++step) {
    const VehicleState& s = traj[step];
    const double ch = std::cos(s.yaw);
    const double sh = std::sin(s.yaw);

    auto sample_point = [&](double px, double py, SlotSample* out) {
      const auto cell = world_to_cell(px, py, spec);
      if (!cell) {
        out->off_map = true;
        return;
      }
      out->off_map = false;
      out->mu = view.mean_at(cell->i, cell->j);
      out->sigma = std::sqrt(view.variance_at(cell->i, cell->j));
    };

    for (int k = 0; k < p; ++k) {
      const double lat = -veh.track / 2 + k * spacing;
      sample_point(s.x + ch * veh.lf - sh * lat, s.y + sh * veh.lf + ch * lat,
                   &cur[k]);
      sample_point(s.x - ch * veh.lr - sh * lat, s.y - sh * veh.lr + ch * lat,
                   &cur[p + k]);
    }
    sample_point(s.x, s.y, &cur[cg_slot]);

    for (int k = 0; k < 2 * p; ++k) {
      const SlotSample& pt = cur[k];
      if (pt.off_map || cur[cg_slot].off_map) {
        // Conservative: leaving the map counts as a relative-height hit.
        expected += 1.0;
        continue;
      }
      // Relative height vs the ground under the CG.
      expected += pair_indicator(sampler, k, cg_slot, pt, cur[cg_slot],
                                 thr_rel);
      // Adjacent point within the same array: lateral gradient and step.
      const int base = k < p ? 0 : p;
      const int kk = k - base;
      if (kk > 0 && !cur[k - 1].off_map) {
        expected += pair_indicator(sampler, k, k - 1, pt, cur[k - 1],
                                   thr_grad_y);
        expected += pair_indicator(sampler, k, k - 1, pt, cur[k - 1],
                                   thr_step);
      }
      // Matching front/rear pair: longitudinal gradient and step.
      if (k < p && !cur[p + k].off_map) {
        expected += pair_indicator(sampler, k, p + k, pt, cur[p + k],
                                   thr_grad_x);
        expected += pair_indicator(sampler, k, p + k, pt, cur[p + k],
                                   thr_step);
      }
      // Temporal step at the same slot (same xi stream, so this measures
      // the change of the sampled surface under the moving footprint).
      if (have_prev && !prev[k].off_map) {
        expected += pair_indicator(sampler, k, k, pt, prev[k], thr_step);
      }
    }

    std::swap(cur, prev);
    have_prev = true;
    if (view.rollout_unc && step + 1 < traj.size()) {
      view.rollout_unc->advance(s);
    }
  }
  return w.w_surface * expected;
}

CostBreakdown total_cost(const std::vector<VehicleState>& traj,
                         const TerrainView& view, const Goal& goal,
                         const CostWeights& w, const DynamicLimits& limits,
                         const VehicleParams& veh, double dt,
                         SurfaceSampler& sampler) {
  CostBreakdown c;
  c.time = time_cost(traj, goal, w);
  c.dynamic = dynamic_cost(traj, limits, w, dt, veh.v_eps);
  c.surface = surface_cost(traj, view, w, veh, sampler);
  c.dist = distance_cost(traj, goal, w);
  c.acc = stop_cost(traj, goal, w);
  c.orientation = orientation_cost(traj, goal, w);
  c.total = c.time + c.dynamic + c.surface + c.dist + c.acc + c.orientation;
  return c;
}

}  // namespace offnav
