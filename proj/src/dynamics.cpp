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

#include "offnav/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace offnav {

double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a <= 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

double pacejka_mu(double alpha, const VehicleParams& p) {
  const double ba = p.pac_b * alpha;
  return p.pac_d *
         std::sin(p.pac_c *
                  std::atan(ba - p.pac_e * (ba - std::atan(ba))));
}

ControlInput clamp_input(ControlInput u, const VehicleParams& p) {
  u.steer = std::clamp(u.steer, -p.steer_max, p.steer_max);
  u.force = std::clamp(u.force, p.force_min, p.force_max);
  return u;
}

namespace {

// Time constant for relaxing (v, r) onto the kinematic solution below the
// slip-angle regularization speed.
constexpr double kKinematicTau = 0.2;

double clamp_nonneg(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

VehicleState derivatives(const VehicleState& x, const ControlInput& u,
                         const VehicleParams& p) {
  const double V = std::max(x.speed, 0.0);
  const double v = x.lat_speed;
  const double r = x.yaw_rate;
  const double veff = std::max(V, p.v_eps);
  const double L = p.wheelbase();
  const double weight = p.mass * p.gravity;

  // Longitudinal: tractive force minus aero drag and rolling resistance.
  const double drag =
      0.5 * p.air_density * p.drag_coeff * p.frontal_area * V * V;
  const double rolling = (V > 1e-9) ? weight * p.rolling_coeff : 0.0;
  const double v_dot_long = (u.force - drag - rolling) / p.mass + v * r;

  // Slip angles, regularized at low speed.
  const double alpha_f = u.steer - std::atan2(v + p.lf * r, veff);
  const double alpha_r = -std::atan2(v - p.lr * r, veff);

  // Axle vertical loads: static split plus longitudinal transfer.
  const double dz_long = u.force * p.cg_height / L;
  const double fz_front = clamp_nonneg(weight * p.lr / L - dz_long);
  const double fz_rear = clamp_nonneg(weight * p.lf / L + dz_long);

  // First pass without lateral transfer to estimate a_y, then per-wheel
  // loads with lateral transfer, saturated at zero.
  const double mu_f = pacejka_mu(alpha_f, p);
  const double mu_r = pacejka_mu(alpha_r, p);
  const double ay_est = (mu_f * fz_front + mu_r * fz_rear) / p.mass;
  const double dz_lat = p.mass * ay_est * p.cg_height / p.track;
  const double share_f = fz_front / std::max(fz_front + fz_rear, 1.0);
  auto axle_load = [&](double fz_axle, double share) {
    const double left = clamp_nonneg(0.5 * fz_axle - 0.5 * dz_lat * share);
    const double right = clamp_nonneg(0.5 * fz_axle + 0.5 * dz_lat * share);
    return left + right;
  };
  const double fy_front =
      mu_f * axle_load(fz_front, share_f) * std::cos(u.steer);
  const double fy_rear = mu_r * axle_load(fz_rear, 1.0 - share_f);

  const double v_dot_dyn = (fy_front + fy_rear) / p.mass - V * r;
  const double r_dot_dyn =
      (p.lf * fy_front - p.lr * fy_rear) / p.yaw_inertia;

  // Kinematic single-track target for the low-speed blend.
  const double r_kin = V * std::tan(u.steer) / L;
  const double v_kin = r_kin * p.lr;
  const double blend = std::clamp(V / p.v_eps, 0.0, 1.0);
  const double v_dot =
      blend * v_dot_dyn + (1.0 - blend) * (v_kin - v) / kKinematicTau;
  const double r_dot =
      blend * r_dot_dyn + (1.0 - blend) * (r_kin - r) / kKinematicTau;

  VehicleState d;
  d.speed = v_dot_long;
  d.lat_speed = v_dot;
  d.yaw_rate = r_dot;
  d.x = V * std::cos(x.yaw) - v * std::sin(x.yaw);
  d.y = V * std::sin(x.yaw) + v * std::cos(x.yaw);
  d.yaw = r;
  return d;
}

VehicleState step(const VehicleState& x, const ControlInput& u,
                  const VehicleParams& p, double dt) {
  if (dt <= 0.0) return x;
  auto axpy = [](const VehicleState& a, const VehicleState& b, double h) {
    VehicleState s;
    s.speed = a.speed + h * b.speed;
    s.lat_speed = a.lat_speed + h * b.lat_speed;
    s.yaw_rate = a.yaw_rate + h * b.yaw_rate;
    s.x = a.x + h * b.x;
    s.y = a.y + h * b.y;
    s.yaw = a.yaw + h * b.yaw;
    return s;
  };
  const VehicleState k1 = derivatives(x, u, p);
  const VehicleState k2 = derivatives(axpy(x, k1, dt / 2), u, p);
  const VehicleState k3 = derivatives(axpy(x, k2, dt / 2), u, p);
  const VehicleState k4 = derivatives(axpy(x, k3, dt), u, p);

  VehicleState out = x;
  out.speed += dt / 6 * (k1.speed + 2 * k2.speed + 2 * k3.speed + k4.speed);
  out.lat_speed +=
      dt / 6 *
      (k1.lat_speed + 2 * k2.lat_speed + 2 * k3.lat_speed + k4.lat_speed);
  out.yaw_rate +=
      dt / 6 * (k1.yaw_rate + 2 * k2.yaw_rate + 2 * k3.yaw_rate + k4.yaw_rate);
  out.x += dt / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
  out.y += dt / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
  out.yaw += dt / 6 * (k1.yaw + 2 * k2.yaw + 2 * k3.yaw + k4.yaw);
  if (out.speed < 0.0) out.speed = 0.0;  // no reverse in this study

  if (!(std::isfinite(out.speed) && std::isfinite(out.lat_speed) &&
        std::isfinite(out.yaw_rate) && std::isfinite(out.x) &&
        std::isfinite(out.y) && std::isfinite(out.yaw))) {
    std::ostringstream msg;
    msg << "dynamics step produced a non-finite state (V=" << x.speed
        << ", steer=" << u.steer << ", force=" << u.force << ")";
    throw std::runtime_error(msg.str());
  }
  return out;
}

std::vector<VehicleState> rollout(const VehicleState& x0,
                                  const std::vector<ControlInput>& controls,
                                  const VehicleParams& p, double dt) {
  std::vector<VehicleState> traj;
  traj.reserve(controls.size() + 1);
  traj.push_back(x0);
  for (size_t k = 0; k < controls.size(); ++k) {
    try {
      traj.push_back(step(traj.back(), controls[k], p, dt));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("rollout step " + std::to_string(k) + ": " +
                               e.what());
    }
  }
  return traj;
}

}  // namespace offnav
