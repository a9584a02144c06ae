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

#include "offnav/mppi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "offnav/core/kernels.hpp"
#include "offnav/core/parallel.hpp"
#include "offnav/core/rng.hpp"

namespace offnav {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kPrescient: return "prescient";
    case Variant::kDeterministic: return "deterministic";
    case Variant::kVisibilityAware: return "visibility_aware";
  }
  return "unknown";
}

NoiseBatch sample_noise(const MppiConfig& cfg, std::uint64_t seed) {
  NoiseBatch batch;
  batch.samples = cfg.samples;
  batch.horizon = cfg.horizon;
  batch.eps.assign(size_t(cfg.samples) * 2 * cfg.horizon, 0.0);
  for (int j = 1; j < cfg.samples; ++j) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
    double* row = batch.row(j);
    for (int i = 0; i < cfg.horizon; ++i) {
      row[2 * i] = cfg.noise_steer * rng.normal();
      row[2 * i + 1] = cfg.noise_force * rng.normal();
    }
  }
  return batch;
}

std::vector<ControlInput> candidate_sequence(
    const std::vector<ControlInput>& mean, const NoiseBatch& noise, int j,
    const VehicleParams& veh) {
  const double* row = noise.row(j);
  std::vector<ControlInput> seq(mean.size());
  for (size_t i = 0; i < mean.size(); ++i) {
    seq[i] = clamp_input({mean[i].steer + row[2 * i],
                          mean[i].force + row[2 * i + 1]},
                         veh);
  }
  return seq;
}

std::vector<double> weights_from_costs(const std::vector<double>& costs,
                                       double lambda) {
  double best = std::numeric_limits<double>::infinity();
  for (double c : costs) best = std::min(best, c);
  if (!std::isfinite(best)) {
    throw std::runtime_error("weights_from_costs: every rollout cost is "
                             "infinite");
  }
  std::vector<double> w(costs.size());
  double sum = 0.0;
  for (size_t j = 0; j < costs.size(); ++j) {
    w[j] = std::exp(-(costs[j] - best) / lambda);
    sum += w[j];
  }
  for (double& x : w) x /= sum;
  return w;
}

std::vector<ControlInput> update_law(const std::vector<ControlInput>& mean,
                                     const NoiseBatch& noise,
                                     const std::vector<double>& weights,
                                     const VehicleParams& veh) {
  const int n2 = 2 * noise.horizon;
  std::vector<double> acc(n2, 0.0);
  const auto& k = kern::active();
  for (int j = 0; j < noise.samples; ++j) {
    if (weights[j] == 0.0) continue;
    k.weighted_accum(acc.data(), noise.row(j), n2, weights[j]);
  }
  std::vector<ControlInput> out(mean.size());
  for (size_t i = 0; i < mean.size(); ++i) {
    out[i] = clamp_input({mean[i].steer + acc[2 * i],
                          mean[i].force + acc[2 * i + 1]},
                         veh);
  }
  return out;
}

void shift_sequence(std::vector<ControlInput>& mean) {
  if (mean.empty()) return;
  for (size_t i = 0; i + 1 < mean.size(); ++i) mean[i] = mean[i + 1];
}

MppiController::MppiController(const MppiConfig& cfg,
                               const VehicleParams& veh,
                               const CostWeights& weights,
                               const VisibilityConfig& vis, Variant variant,
                               const GridSpec& spec, int workers)
    : cfg_(cfg),
      veh_(veh),
      limits_(DynamicLimits::from_params(veh)),
      weights_(weights),
      vis_(vis),
      variant_(variant),
      spec_(spec),
      workers_(std::max(1, workers)),
      mean_(cfg.horizon),
      sampler_(weights.footprint_points, weights.n_elev_samples) {
  if (!cfg_.valid() || !vis_.valid() || !spec_.valid()) {
    throw std::invalid_argument("MppiController: invalid configuration");
  }
  if (variant_ == Variant::kVisibilityAware) {
    scratch_.reserve(workers_);
    for (int w = 0; w < workers_; ++w) {
      scratch_.push_back(std::make_unique<RolloutUncertainty>(spec_, vis_));
    }
  }
}

void MppiController::reset_episode(std::uint64_t episode_seed) {
  episode_seed_ = episode_seed;
  std::fill(mean_.begin(), mean_.end(), ControlInput{});
  sampler_.reseed(derive_seed(episode_seed, 0x5u));
}

ControlInput MppiController::control_step(const VehicleState& state,
                                          const BeliefView& belief,
                                          const Goal& goal, int step_index,
                                          StepDiagnostics* diag) {
  const auto t0 = std::chrono::steady_clock::now();
  const int j_count = cfg_.samples;

  // A mean sequence braked to rest cannot explore: force noise centered on
  // a deep negative mean leaves every rollout standing, all costs tie, and
  // the update law keeps the brake forever. Restart from a coasting
  // nominal so the batch can discover motion again.
  if (std::abs(state.speed) < 0.3 && mean_.front().force < 0.0) {
    std::fill(mean_.begin(), mean_.end(), ControlInput{});
  }

  std::vector<double> totals(j_count);
  std::vector<CostBreakdown> breakdowns(j_count);
  std::vector<std::string> errors(j_count);
  std::vector<double> last_weights;

  for (int iter = 0; iter < cfg_.opt_iters; ++iter) {
    const NoiseBatch noise = sample_noise(
        cfg_, derive_seed(episode_seed_, 0x1u,
                          static_cast<std::uint64_t>(step_index),
                          static_cast<std::uint64_t>(iter)));

    parallel_for(j_count, workers_, [&](int worker, int j) {
      try {
        const std::vector<ControlInput> seq =
            candidate_sequence(mean_, noise, j, veh_);
        const std::vector<VehicleState> traj =
            rollout(state, seq, veh_, cfg_.dt);
        TerrainView view;
        view.spec = belief.spec;
        view.mean = belief.mean;
        view.base_variance = belief.variance;
        if (variant_ == Variant::kVisibilityAware) {
          RolloutUncertainty* unc = scratch_[worker].get();
          unc->reset(belief.mean, belief.variance);
          view.rollout_unc = unc;
        }
        breakdowns[j] = total_cost(traj, view, goal, weights_, limits_,
                                   veh_, cfg_.dt, sampler_);
        totals[j] = breakdowns[j].total;
      } catch (const std::exception& e) {
        errors[j] = e.what();
      }
    });

    for (int j = 0; j < j_count; ++j) {
      if (!errors[j].empty()) {
        throw std::runtime_error("control_step: rollout " +
                                 std::to_string(j) + ": " + errors[j]);
      }
    }

    last_weights = weights_from_costs(totals, cfg_.lambda);
    mean_ = update_law(mean_, noise, last_weights, veh_);
  }

  if (diag) {
    diag->min_total = std::numeric_limits<double>::infinity();
    diag->min_surface = std::numeric_limits<double>::infinity();
    diag->mean_terms = CostBreakdown{};
    double sum_total = 0.0, sum_surface = 0.0, sum_w2 = 0.0;
    for (int j = 0; j < j_count; ++j) {
      const CostBreakdown& b = breakdowns[j];
      diag->min_total = std::min(diag->min_total, b.total);
      diag->min_surface = std::min(diag->min_surface, b.surface);
      sum_total += b.total;
      sum_surface += b.surface;
      diag->mean_terms.time += b.time;
      diag->mean_terms.dynamic += b.dynamic;
      diag->mean_terms.surface += b.surface;
      diag->mean_terms.dist += b.dist;
      diag->mean_terms.acc += b.acc;
      diag->mean_terms.orientation += b.orientation;
      diag->mean_terms.total += b.total;
      sum_w2 += last_weights[j] * last_weights[j];
    }
    diag->mean_total = sum_total / j_count;
    diag->mean_surface = sum_surface / j_count;
    diag->mean_terms.time /= j_count;
    diag->mean_terms.dynamic /= j_count;
    diag->mean_terms.surface /= j_count;
    diag->mean_terms.dist /= j_count;
    diag->mean_terms.acc /= j_count;
    diag->mean_terms.orientation /= j_count;
    diag->mean_terms.total /= j_count;
    diag->ess = sum_w2 > 0.0 ? 1.0 / sum_w2 : 0.0;
    diag->solve_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  }

  const ControlInput applied = mean_.front();
  shift_sequence(mean_);
  return applied;
}

}  // namespace offnav
