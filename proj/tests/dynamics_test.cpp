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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "offnav/dynamics.hpp"

using namespace offnav;

namespace {

const VehicleParams kP;

std::vector<ControlInput> constant_inputs(int n, double steer, double force) {
  return std::vector<ControlInput>(n, ControlInput{steer, force});
}

}  // namespace

TEST_CASE("wrap_angle maps to (-pi, pi]") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(3 * M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(2 * M_PI + 0.25) == doctest::Approx(0.25));
  CHECK(wrap_angle(-7.5 * M_PI) == doctest::Approx(0.5 * M_PI));
}

TEST_CASE("pacejka_mu matches the magic formula") {
  for (double alpha : {-0.3, -0.05, 0.0, 0.02, 0.1, 0.5}) {
    const double ba = kP.pac_b * alpha;
    const double want =
        kP.pac_d *
        std::sin(kP.pac_c *
                 std::atan(ba - kP.pac_e * (ba - std::atan(ba))));
    CHECK(pacejka_mu(alpha, kP) == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(pacejka_mu(0.0, kP) == 0.0);
  // Odd function.
  CHECK(pacejka_mu(0.1, kP) == doctest::Approx(-pacejka_mu(-0.1, kP)));
}

TEST_CASE("clamp_input enforces actuator bounds") {
  const ControlInput c = clamp_input({1.0, 99999.0}, kP);
  CHECK(c.steer == kP.steer_max);
  CHECK(c.force == kP.force_max);
  const ControlInput d = clamp_input({-1.0, -99999.0}, kP);
  CHECK(d.steer == -kP.steer_max);
  CHECK(d.force == kP.force_min);
  const ControlInput e = clamp_input({0.1, 500.0}, kP);
  CHECK(e.steer == 0.1);
  CHECK(e.force == 500.0);
}

TEST_CASE("equilibrium at rest: all derivatives zero") {
  const VehicleState d = derivatives(VehicleState{}, ControlInput{}, kP);
  CHECK(d.speed == 0.0);  // rolling drag gated off at V = 0
  CHECK(d.lat_speed == 0.0);
  CHECK(d.yaw_rate == 0.0);
  CHECK(d.x == 0.0);
  CHECK(d.y == 0.0);
  CHECK(d.yaw == 0.0);
}

TEST_CASE("straight running: no lateral excitation") {
  VehicleState s;
  s.speed = 10.0;
  s.yaw = 0.7;
  const VehicleState d = derivatives(s, ControlInput{}, kP);
  CHECK(d.lat_speed == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.yaw_rate == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.x == doctest::Approx(10.0 * std::cos(0.7)));
  CHECK(d.y == doctest::Approx(10.0 * std::sin(0.7)));
  CHECK(d.yaw == 0.0);
  // Drag plus rolling resistance decelerate the vehicle.
  const double drag =
      0.5 * kP.air_density * kP.drag_coeff * kP.frontal_area * 100.0 / kP.mass;
  const double roll = kP.gravity * kP.rolling_coeff;
  CHECK(d.speed == doctest::Approx(-(drag + roll)).epsilon(1e-9));
}

TEST_CASE("coastdown: speed strictly decreases without drive force") {
  VehicleState s;
  s.speed = 15.0;
  for (int i = 0; i < 50; ++i) {
    const VehicleState next = step(s, ControlInput{}, kP, 0.1);
    CHECK(next.speed < s.speed);
    s = next;
  }
}

TEST_CASE("mirror symmetry about the vehicle centerline") {
  VehicleState s;
  s.speed = 9.0;
  s.lat_speed = 0.4;
  s.yaw_rate = 0.2;
  s.y = 3.0;
  s.yaw = 0.3;
  VehicleState m = s;
  m.lat_speed = -s.lat_speed;
  m.yaw_rate = -s.yaw_rate;
  m.y = -s.y;
  m.yaw = -s.yaw;
  const auto u = constant_inputs(30, 0.2, 1500.0);
  const auto um = constant_inputs(30, -0.2, 1500.0);
  const auto ta = rollout(s, u, kP, 0.1);
  const auto tb = rollout(m, um, kP, 0.1);
  for (size_t i = 0; i < ta.size(); ++i) {
    CHECK(ta[i].speed == tb[i].speed);
    CHECK(ta[i].x == tb[i].x);
    CHECK(ta[i].lat_speed == -tb[i].lat_speed);
    CHECK(ta[i].yaw_rate == -tb[i].yaw_rate);
    CHECK(ta[i].y == -tb[i].y);
    CHECK(ta[i].yaw == -tb[i].yaw);
  }
}

TEST_CASE("low-lateral-acceleration turn radius near kinematic") {
  // V = 5 m/s, delta = 0.05 rad: kinematic radius L / tan(delta) = 72 m.
  VehicleState s;
  s.speed = 5.0;
  double yaw_rate_ss = 0.0;
  for (int i = 0; i < 400; ++i) {
    // Hold speed with a matched drive force so the steady state is clean.
    const double drag = 0.5 * kP.air_density * kP.drag_coeff *
                        kP.frontal_area * s.speed * s.speed;
    const double roll = kP.mass * kP.gravity * kP.rolling_coeff;
    s = step(s, ControlInput{0.05, drag + roll}, kP, 0.02);
    yaw_rate_ss = s.yaw_rate;
  }
  const double radius = s.speed / yaw_rate_ss;
  const double kinematic = kP.wheelbase() / std::tan(0.05);
  CHECK(radius == doctest::Approx(kinematic).epsilon(0.10));
}

TEST_CASE("zero step leaves the state unchanged") {
  VehicleState s;
  s.speed = 7.0;
  s.yaw = 0.3;
  // dt -> 0 limit: compare a tiny step against identity.
  const VehicleState n = step(s, ControlInput{0.1, 1000.0}, kP, 1e-12);
  CHECK(n.speed == doctest::Approx(s.speed));
  CHECK(n.x == doctest::Approx(s.x));
  CHECK(n.yaw == doctest::Approx(s.yaw));
}

TEST_CASE("one 0.1 s step vs five 0.02 s substeps") {
  // Settle onto the cornering manifold first; the step-steer transient
  // right at t = 0 is the one place the model is stiff.
  VehicleState s;
  s.speed = 8.0;
  const ControlInput u{0.05, 2000.0};
  for (int i = 0; i < 100; ++i) s = step(s, u, kP, 0.02);
  const VehicleState coarse = step(s, u, kP, 0.1);
  VehicleState fine = s;
  for (int i = 0; i < 5; ++i) fine = step(fine, u, kP, 0.02);
  CHECK(std::abs(coarse.speed - fine.speed) < 1e-3);
  CHECK(std::abs(coarse.lat_speed - fine.lat_speed) < 1e-3);
  CHECK(std::abs(coarse.yaw_rate - fine.yaw_rate) < 1e-3);
  CHECK(std::abs(coarse.x - fine.x) < 1e-3);
  CHECK(std::abs(coarse.y - fine.y) < 1e-3);
  CHECK(std::abs(coarse.yaw - fine.yaw) < 1e-3);
}

TEST_CASE("RK4 order: halving dt shrinks endpoint error ~16x") {
  VehicleState s;
  s.speed = 10.0;
  const ControlInput u{0.08, 1000.0};
  const double T = 1.0;
  auto integrate = [&](double dt) {
    VehicleState x = s;
    const int n = static_cast<int>(std::llround(T / dt));
    for (int i = 0; i < n; ++i) x = step(x, u, kP, dt);
    return x;
  };
  const VehicleState ref = integrate(1.0 / 4096.0);
  auto err = [&](const VehicleState& x) {
    return std::hypot(x.x - ref.x, x.y - ref.y) +
           std::abs(x.speed - ref.speed) + std::abs(x.yaw - ref.yaw);
  };
  const double e1 = err(integrate(0.1));
  const double e2 = err(integrate(0.05));
  const double ratio = e1 / e2;
  // Smooth maneuver, so the asymptotic 2^4 factor should be visible.
  CHECK(ratio > 8.0);
}

TEST_CASE("speed never goes negative under full braking") {
  VehicleState s;
  s.speed = 3.0;
  for (int i = 0; i < 40; ++i) {
    s = step(s, ControlInput{0.0, kP.force_min}, kP, 0.1);
    CHECK(s.speed >= 0.0);
  }
  CHECK(s.speed == 0.0);
}

TEST_CASE("rollout structure and error propagation") {
  VehicleState s;
  s.speed = 5.0;
  SUBCASE("empty horizon returns just the start state") {
    const auto traj = rollout(s, {}, kP, 0.1);
    REQUIRE(traj.size() == 1);
    CHECK(traj[0].speed == s.speed);
  }
  SUBCASE("zero input from rest stays put") {
    const auto traj = rollout(VehicleState{}, constant_inputs(10, 0, 0), kP,
                              0.1);
    REQUIRE(traj.size() == 11);
    for (const auto& x : traj) {
      CHECK(x.speed == 0.0);
      CHECK(x.x == 0.0);
      CHECK(x.y == 0.0);
    }
  }
  SUBCASE("trajectory[k+1] = step(trajectory[k])") {
    const auto u = constant_inputs(40, 0.05, 1200.0);
    const auto traj = rollout(s, u, kP, 0.1);
    REQUIRE(traj.size() == 41);
    for (size_t k = 0; k < u.size(); ++k) {
      const VehicleState want = step(traj[k], u[k], kP, 0.1);
      CHECK(traj[k + 1].x == want.x);
      CHECK(traj[k + 1].speed == want.speed);
    }
  }
  SUBCASE("blow-up reports the offending step index") {
    VehicleParams bad = kP;
    bad.mass = 0.0;  // division by zero mass goes non-finite immediately
    const auto u = constant_inputs(10, 0.4, 5000.0);
    CHECK_THROWS_AS(rollout(s, u, bad, 0.1), std::runtime_error);
  }
}
