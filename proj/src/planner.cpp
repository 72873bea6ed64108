#include "playgen/planner.hpp"

#include <cmath>

#include "playgen/container.hpp"
#include "playgen/value_net.hpp"

namespace playgen {

void PlanConfig::validate() const {
    if (!std::isfinite(alpha) || alpha < 0.0) {
        throw DataError("plan alpha must be finite and nonnegative");
    }
    if (batch < 1) {
        throw DataError("plan batch must be >= 1");
    }
    if (!(grad_clip > 0.0)) {
        throw DataError("plan grad_clip must be positive");
    }
}

std::vector<double> perturbed_mean(const std::vector<double>& mu, double sigma,
                                   const std::vector<double>& grad, double alpha) {
    if (mu.size() != grad.size()) {
        throw DataError("perturbed_mean: shape mismatch");
    }
    std::vector<double> out(mu.size());
    for (std::size_t k = 0; k < mu.size(); ++k) {
        out[k] = mu[k] + alpha * sigma * grad[k];
    }
    return out;
}

bool clip_gradient(std::vector<double>& grad, double max_norm) {
    double sq = 0.0;
    for (double g : grad) {
        sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) {
        return false;
    }
    const double scale = max_norm / norm;
    for (double& g : grad) {
        g *= scale;
    }
    return true;
}

namespace {

TrajectoryTensor values_to_traj(const std::vector<double>& values, int horizon, int valid_len) {
    TrajectoryTensor t = TrajectoryTensor::zeros(horizon);
    t.valid_len = valid_len;
    t.normalized = true;
    t.values = values;
    return t;
}

void check_finite_gradient(const std::vector<double>& grad, int step) {
    for (double g : grad) {
        if (!std::isfinite(g)) {
            throw NumericError("non-finite value gradient at diffusion step " +
                               std::to_string(step));
        }
    }
}

}  // namespace

TrajectoryTensor guided_step(TemporalUNet& denoiser, ValueNet& value,
                             const NoiseSchedule& schedule, const TrajectoryTensor& tau_i,
                             int step, double alpha, double grad_clip, Rng& rng,
                             int* clip_events) {
    if (step < 0 || step >= schedule.steps) {
        throw DataError("guided_step: step index out of range");
    }
    if (!tau_i.normalized) {
        throw DataError("guided_step expects a normalized trajectory");
    }

    const std::vector<double> eps_hat = predict_noise(denoiser, tau_i, step);
    const std::vector<double> mu = posterior_mean(schedule, tau_i.values, eps_hat, step);

    const TrajectoryTensor mu_traj = values_to_traj(mu, tau_i.horizon, tau_i.valid_len);
    std::vector<double> grad = grad_return(value, mu_traj, step);
    check_finite_gradient(grad, step);
    if (clip_gradient(grad, grad_clip) && clip_events != nullptr) {
        ++*clip_events;
    }

    const double sigma = schedule.posterior_var[step];
    std::vector<double> next = perturbed_mean(mu, sigma, grad, alpha);
    if (step > 0) {
        const double stddev = std::sqrt(sigma);
        for (double& v : next) {
            v += stddev * rng.normal();
        }
    }
    return values_to_traj(next, tau_i.horizon, tau_i.valid_len);
}

TrajectoryTensor unguided_step(TemporalUNet& denoiser, const NoiseSchedule& schedule,
                               const TrajectoryTensor& tau_i, int step, Rng& rng) {
    if (step < 0 || step >= schedule.steps) {
        throw DataError("unguided_step: step index out of range");
    }
    const std::vector<double> eps_hat = predict_noise(denoiser, tau_i, step);
    std::vector<double> next = posterior_mean(schedule, tau_i.values, eps_hat, step);
    if (step > 0) {
        const double stddev = std::sqrt(schedule.posterior_var[step]);
        for (double& v : next) {
            v += stddev * rng.normal();
        }
    }
    return values_to_traj(next, tau_i.horizon, tau_i.valid_len);
}

TrajectoryTensor condition_initial_state(const TrajectoryTensor& tau,
                                         const std::array<double, kStateDim>& s) {
    if (!tau.normalized) {
        throw DataError("condition_initial_state expects a normalized trajectory");
    }
    TrajectoryTensor out = tau;
    for (int d = 0; d < kStateDim; ++d) {
        out.at(0, d) = s[d];
    }
    return out;
}

namespace {

std::array<double, kStateDim> normalize_state(const std::array<double, kStateDim>& raw,
                                              const NormalizationStats& stats) {
    std::array<double, kStateDim> out{};
    for (int d = 0; d < kStateDim; ++d) {
        if (stats.is_constant(d)) {
            out[d] = 0.0;
        } else {
            const double span = stats.max_v[d] - stats.min_v[d];
            out[d] = 2.0 * (raw[d] - stats.min_v[d]) / span - 1.0;
        }
    }
    return out;
}

PlanResult run_chain(TemporalUNet& denoiser, ValueNet* value, const NoiseSchedule& schedule,
                     const NormalizationStats& stats, const PlanConfig& config, bool guided) {
    config.validate();
    const int horizon = denoiser.config().horizon;
    const std::array<double, kStateDim> s = normalize_state(config.initial_state, stats);

    PlanResult result;
    for (int b = 0; b < config.batch; ++b) {
        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(b)));
        TrajectoryTensor tau = TrajectoryTensor::zeros(horizon);
        tau.normalized = true;
        for (auto& v : tau.values) {
            v = rng.normal();
        }
        tau = condition_initial_state(tau, s);
        for (int step = schedule.steps - 1; step >= 0; --step) {
            if (guided) {
                tau = guided_step(denoiser, *value, schedule, tau, step, config.alpha,
                                  config.grad_clip, rng, &result.clip_events);
            } else {
                tau = unguided_step(denoiser, schedule, tau, step, rng);
            }
            tau = condition_initial_state(tau, s);
        }
        result.normalized_trajectories.push_back(tau);
        result.predicted_returns.push_back(value != nullptr ? predict_return(*value, tau, 0) : 0.0);
        result.trajectories.push_back(denormalize(tau, stats));
    }
    return result;
}

}  // namespace

PlanResult plan(TemporalUNet& denoiser, ValueNet& value, const NoiseSchedule& schedule,
                const NormalizationStats& stats, const PlanConfig& config) {
    return run_chain(denoiser, &value, schedule, stats, config, /*guided=*/true);
}

PlanResult plan_unguided(TemporalUNet& denoiser, ValueNet& value, const NoiseSchedule& schedule,
                         const NormalizationStats& stats, const PlanConfig& config) {
    return run_chain(denoiser, &value, schedule, stats, config, /*guided=*/false);
}

std::vector<ExecutedStep> receding_horizon(TemporalUNet& denoiser, ValueNet& value,
                                           const NoiseSchedule& schedule,
                                           const NormalizationStats& stats, PlanConfig config,
                                           const EnvStep& env_step, int steps) {
    if (steps < 1) {
        throw DataError("receding_horizon: steps must be >= 1");
    }
    config.batch = 1;
    const std::uint64_t base_seed = config.seed;

    std::vector<ExecutedStep> executed;
    executed.reserve(static_cast<std::size_t>(steps));
    for (int iter = 0; iter < steps; ++iter) {
        config.seed = derive_seed(base_seed, static_cast<std::uint64_t>(iter));
        const PlanResult result = plan(denoiser, value, schedule, stats, config);
        const TrajectoryTensor& traj = result.trajectories.front();

        ExecutedStep ex;
        for (int d = 0; d < kStateDim; ++d) {
            ex.state[d] = traj.at(0, d);
            ex.action[d] = traj.at(0, kStateDim + d);
        }
        executed.push_back(ex);

        try {
            const auto next_state = env_step(ex.state, ex.action);
            config.initial_state = next_state;
        } catch (const std::exception& e) {
            throw DataError("receding_horizon: environment step " + std::to_string(iter) +
                            " failed: " + e.what());
        }
    }
    return executed;
}

void write_plan_file(const std::string& path, const PlanResult& result,
                     const nlohmann::json& config_echo, const nlohmann::json& provenance) {
    Container c;
    c.header = {
        {"kind", "plan"},
        {"layout_version", kLayoutVersion},
        {"config", config_echo},
        {"provenance", provenance},
        {"clip_events", result.clip_events},
    };
    const auto batch = static_cast<std::int64_t>(result.trajectories.size());
    const std::int64_t horizon = batch > 0 ? result.trajectories.front().horizon : 0;

    ArrayBlob trajs{"trajectories", {batch, horizon, kFeatureDim}, {}};
    for (const auto& t : result.trajectories) {
        trajs.data.insert(trajs.data.end(), t.values.begin(), t.values.end());
    }
    ArrayBlob returns{"predicted_return", {batch}, result.predicted_returns};
    c.arrays.push_back(std::move(trajs));
    c.arrays.push_back(std::move(returns));
    save_container(path, c);
}

}  // namespace playgen
