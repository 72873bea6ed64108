#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "playgen/checkpoint.hpp"
#include "playgen/core.hpp"
#include "playgen/rng.hpp"
#include "playgen/schedule.hpp"

namespace playgen {

struct PlanConfig {
    double alpha = 0.1;               // guidance scale; 0 is unconditional sampling
    std::uint64_t seed = 0;
    int batch = 1;
    std::array<double, kStateDim> initial_state{};  // raw court coordinates (ft)
    double grad_clip = 100.0;         // per-trajectory L2 cap on the value gradient

    void validate() const;
};

// The Eq-style mean shift on its own: mu + alpha * sigma * grad, elementwise.
std::vector<double> perturbed_mean(const std::vector<double>& mu, double sigma,
                                   const std::vector<double>& grad, double alpha);

// Scales grad down to L2 norm max_norm when it exceeds it. Returns true when
// clipping fired.
bool clip_gradient(std::vector<double>& grad, double max_norm);

// One reverse step: predict noise, form the posterior mean, shift it by the
// scaled value gradient, and sample with the step's variance. At step 0 the
// perturbed mean is returned without added noise.
TrajectoryTensor guided_step(TemporalUNet& denoiser, ValueNet& value,
                             const NoiseSchedule& schedule, const TrajectoryTensor& tau_i,
                             int step, double alpha, double grad_clip, Rng& rng,
                             int* clip_events = nullptr);

// Reverse step without the value model; consumes RNG draws identically to
// guided_step so that alpha = 0 runs are element-identical to this.
TrajectoryTensor unguided_step(TemporalUNet& denoiser, const NoiseSchedule& schedule,
                               const TrajectoryTensor& tau_i, int step, Rng& rng);

// Overwrites row 0's state columns with s (normalized); actions untouched.
TrajectoryTensor condition_initial_state(const TrajectoryTensor& tau,
                                         const std::array<double, kStateDim>& s);

struct PlanResult {
    std::vector<TrajectoryTensor> trajectories;             // denormalized
    std::vector<TrajectoryTensor> normalized_trajectories;  // as sampled
    std::vector<double> predicted_returns;                  // value at step 0
    int clip_events = 0;
};

// Full reverse chain from unit Gaussian noise, conditioning on the initial
// state after every step. Batch elements use independent RNG substreams
// derived from (seed, element index).
PlanResult plan(TemporalUNet& denoiser, ValueNet& value, const NoiseSchedule& schedule,
                const NormalizationStats& stats, const PlanConfig& config);

// Same chain with no guidance term evaluated at all (reference sampler).
PlanResult plan_unguided(TemporalUNet& denoiser, ValueNet& value, const NoiseSchedule& schedule,
                         const NormalizationStats& stats, const PlanConfig& config);

using EnvStep = std::function<std::array<double, kStateDim>(
    const std::array<double, kStateDim>& state, const std::array<double, kActionDim>& action)>;

struct ExecutedStep {
    std::array<double, kStateDim> state{};
    std::array<double, kActionDim> action{};
};

// Plans from the current state, executes only the first action through
// env_step, then re-plans; `steps` iterations in total.
std::vector<ExecutedStep> receding_horizon(TemporalUNet& denoiser, ValueNet& value,
                                           const NoiseSchedule& schedule,
                                           const NormalizationStats& stats, PlanConfig config,
                                           const EnvStep& env_step, int steps);

// Plan/rollout artifact writer: trajectories, returns, config echo, and the
// checkpoint fingerprints they came from.
void write_plan_file(const std::string& path, const PlanResult& result,
                     const nlohmann::json& config_echo, const nlohmann::json& provenance);

}  // namespace playgen
