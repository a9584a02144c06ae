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

#ifndef OFFNAV_DYNAMICS_HPP
#define OFFNAV_DYNAMICS_HPP

#include <stdexcept>
#include <vector>

namespace offnav {

// 3-DOF single-track state: longitudinal speed, lateral speed, yaw rate,
// world position, heading. Heading integrates unwrapped; wrap_angle() is
// applied at observation boundaries.
struct VehicleState {
  double speed = 0.0;      // V, m/s (no reverse)
  double lat_speed = 0.0;  // v, m/s
  double yaw_rate = 0.0;   // r, rad/s
  double x = 0.0;          // X, m
  double y = 0.0;          // Y, m
  double yaw = 0.0;        // Psi, rad
};

struct ControlInput {
  double steer = 0.0;  // rad
  double force = 0.0;  // tractive force, N
};

struct VehicleParams {
  double mass = 1650.0;        // kg
  double lf = 1.8;             // m, CG to front axle
  double lr = 1.8;             // m, CG to rear axle
  double track = 2.0;          // m
  double pac_b = 6.0;          // Pacejka B
  double pac_c = 2.5;          // Pacejka C
  double pac_d = 0.37;         // Pacejka D (peak friction coefficient)
  double pac_e = 1.1;          // Pacejka E
  double drag_coeff = 0.7;     // C_d
  double frontal_area = 4.0;   // m^2
  double air_density = 1.225;  // kg/m^3
  double rolling_coeff = 0.02;
  double gravity = 9.80655;
  double yaw_inertia = 2500.0;  // kg m^2
  double cg_height = 0.7;       // m
  double v_eps = 0.5;           // m/s, slip-angle regularization
  double steer_max = 0.5;       // rad
  double force_min = -12000.0;  // N (braking)
  double force_max = 6000.0;    // N (drive)

  double wheelbase() const { return lf + lr; }
};

struct DynamicLimits {
  double accel_max = 0.0;       // traction limit, D*g
  double accel_roll = 0.0;      // static stability factor, g*track/(2*h_cg)
  double beta_max = 0.25;       // rad
  double lat_speed_max = 2.0;   // m/s

  static DynamicLimits from_params(const VehicleParams& p) {
    DynamicLimits l;
    l.accel_max = p.pac_d * p.gravity;
    l.accel_roll = p.gravity * p.track / (2.0 * p.cg_height);
    return l;
  }
};

double wrap_angle(double a);  // to (-pi, pi]

// Pacejka magic-formula friction coefficient as a function of slip angle.
double pacejka_mu(double alpha, const VehicleParams& p);

ControlInput clamp_input(ControlInput u, const VehicleParams& p);

// Right-hand side of the 3-DOF model: drag and rolling resistance on the
// longitudinal axis, per-axle Pacejka lateral forces with longitudinal and
// lateral load transfer, kinematic position rates. Below v_eps the lateral
// dynamics blend toward the kinematic single-track solution.
VehicleState derivatives(const VehicleState& x, const ControlInput& u,
                         const VehicleParams& p);

// One RK4 step with zero-order-hold input. Throws std::runtime_error on a
// non-finite result (parameter blow-up diagnostic).
VehicleState step(const VehicleState& x, const ControlInput& u,
                  const VehicleParams& p, double dt);

// trajectory[0] = x0, trajectory[k+1] = step(trajectory[k], controls[k]).
std::vector<VehicleState> rollout(const VehicleState& x0,
                                  const std::vector<ControlInput>& controls,
                                  const VehicleParams& p, double dt);

}  // namespace offnav

#endif  // OFFNAV_DYNAMICS_HPP
