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

#ifndef OFFNAV_MPPI_HPP
#define OFFNAV_MPPI_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "offnav/cost.hpp"
#include "offnav/dynamics.hpp"
#include "offnav/grid.hpp"
#include "offnav/visibility.hpp"

namespace offnav {

struct MppiConfig {
  int samples = 400;         // J
  int horizon = 40;          // N prediction steps
  double dt = 0.1;           // s
  // Temperature and perturbation scales tuned on the bundled scenarios: a
  // soft temperature averages the north and south detours around a blocking
  // obstacle into a straight-ahead stall, and steering noise must be large
  // enough to discover full swerves within one horizon.
  double lambda = 0.2;        // temperature
  double noise_steer = 0.5;   // rad, per-step perturbation std
  double noise_force = 800.0;  // N
  int opt_iters = 1;

  bool valid() const {
    return samples >= 1 && horizon >= 1 && dt > 0 && lambda > 0 &&
           noise_steer > 0 && noise_force > 0 && opt_iters >= 1;
  }
};

// Which terrain and variance policy the rollouts evaluate against.
enum class Variant { kPrescient, kDeterministic, kVisibilityAware };

const char* variant_name(Variant v);

// J x N x 2 control perturbations, row j holding the unclamped
// [steer, force] pairs for candidate j. Row 0 is all zeros so the
// unperturbed incumbent sequence is always among the candidates.
struct NoiseBatch {
  int samples = 0;
  int horizon = 0;
  std::vector<double> eps;  // samples rows of 2*horizon doubles

  double* row(int j) { return eps.data() + size_t(j) * 2 * horizon; }
  const double* row(int j) const {
    return eps.data() + size_t(j) * 2 * horizon;
  }
};

// Each candidate row j != 0 is drawn from its own RNG stream,
// derive_seed(seed, j), so batches are reproducible under any
// parallel evaluation order.
NoiseBatch sample_noise(const MppiConfig& cfg, std::uint64_t seed);

// Candidate sequence j: clamp(mean + eps_j) per step and channel.
std::vector<ControlInput> candidate_sequence(
    const std::vector<ControlInput>& mean, const NoiseBatch& noise, int j,
    const VehicleParams& veh);

// Exponential-transform weights with min-cost baseline subtraction.
// Throws std::runtime_error when every cost is infinite.
std::vector<double> weights_from_costs(const std::vector<double>& costs,
                                       double lambda);

// mean' = clamp(mean + sum_j w_j * eps_j).
std::vector<ControlInput> update_law(const std::vector<ControlInput>& mean,
                                     const NoiseBatch& noise,
                                     const std::vector<double>& weights,
                                     const VehicleParams& veh);

// Receding-horizon shift: drop step 0, repeat the final input.
void shift_sequence(std::vector<ControlInput>& mean);

struct StepDiagnostics {
  double solve_ms = 0.0;
  double ess = 0.0;  // effective sample size, 1 / sum(w^2)
  double min_total = 0.0;
  double mean_total = 0.0;
  double min_surface = 0.0;
  double mean_surface = 0.0;
  CostBreakdown mean_terms;  // per-term means over the batch
};

// Frozen belief snapshot a control step plans against. variance == nullptr
// means identically zero (prescient and deterministic variants).
struct BeliefView {
  const GridSpec* spec = nullptr;
  const Grid2D<float>* mean = nullptr;
  const Grid2D<float>* variance = nullptr;
};

// Receding-horizon MPPI solver. Holds the mean control sequence between
// steps plus per-worker rollout scratch; one instance drives one episode.
class MppiController {
 public:
  MppiController(const MppiConfig& cfg, const VehicleParams& veh,
                 const CostWeights& weights, const VisibilityConfig& vis,
                 Variant variant, const GridSpec& spec, int workers);

  // Clear the mean sequence and freeze the episode seed; the surface
  // sampler's elevation draws derive from it.
  void reset_episode(std::uint64_t episode_seed);

  // One planning cycle: sample, rollout, weight, update (opt_iters times
  // with fresh noise), return the applied input, shift the mean sequence.
  // Throws std::runtime_error naming the rollout index on a dynamics
  // blow-up.
  ControlInput control_step(const VehicleState& state,
                            const BeliefView& belief, const Goal& goal,
                            int step_index, StepDiagnostics* diag = nullptr);

  const std::vector<ControlInput>& mean_sequence() const { return mean_; }
  Variant variant() const { return variant_; }
  const MppiConfig& config() const { return cfg_; }

 private:
  MppiConfig cfg_;
  VehicleParams veh_;
  DynamicLimits limits_;
  CostWeights weights_;
  VisibilityConfig vis_;
  Variant variant_;
  GridSpec spec_;
  int workers_;
  std::uint64_t episode_seed_ = 0;
  std::vector<ControlInput> mean_;
  SurfaceSampler sampler_;
  std::vector<std::unique_ptr<RolloutUncertainty>> scratch_;  // per worker
};

}  // namespace offnav

#endif  // OFFNAV_MPPI_HPP
