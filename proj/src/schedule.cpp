#include "playgen/schedule.hpp"

#include <cmath>

namespace playgen {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCosineOffset = 0.008;
constexpr double kMaxBeta = 0.999;
constexpr double kTerminalAlphaBar = 0.05;

}  // namespace

const char* schedule_kind_name(ScheduleKind kind) {
    return kind == ScheduleKind::cosine ? "cosine" : "linear";
}

ScheduleKind schedule_kind_from_name(const std::string& name) {
    if (name == "cosine") {
        return ScheduleKind::cosine;
    }
    if (name == "linear") {
        return ScheduleKind::linear;
    }
    throw DataError("unknown schedule kind '" + name + "'");
}

void NoiseSchedule::validate() const {
    if (steps < 1) {
        throw DataError("noise schedule must have at least one step");
    }
    if (alpha.size() != static_cast<std::size_t>(steps) ||
        alpha_bar.size() != static_cast<std::size_t>(steps) ||
        posterior_var.size() != static_cast<std::size_t>(steps)) {
        throw DataError("noise schedule arrays must have one entry per step");
    }
    for (int i = 0; i < steps; ++i) {
        if (!(alpha[i] > 0.0) || alpha[i] > 1.0) {
            throw DataError("alpha entries must lie in (0, 1]");
        }
        if (i > 0 && !(alpha_bar[i] < alpha_bar[i - 1])) {
            throw DataError("alpha_bar must be strictly decreasing");
        }
        if (posterior_var[i] < 0.0) {
            throw DataError("posterior variance must be nonnegative");
        }
    }
    if (alpha_bar[steps - 1] > kTerminalAlphaBar) {
        throw DataError("terminal alpha_bar must not exceed 0.05");
    }
}

NoiseSchedule make_schedule(int steps, ScheduleKind kind) {
    if (steps < 1) {
        throw DataError("make_schedule: steps must be >= 1");
    }
    NoiseSchedule s;
    s.steps = steps;
    s.kind = kind;
    s.alpha.resize(steps);
    s.alpha_bar.resize(steps);
    s.posterior_var.resize(steps);

    if (kind == ScheduleKind::cosine) {
        auto f = [](double t) {
            const double x = (t + kCosineOffset) / (1.0 + kCosineOffset) * kPi / 2.0;
            const double c = std::cos(x);
            return c * c;
        };
        const double f0 = f(0.0);
        double abar_prev = 1.0;
        for (int i = 0; i < steps; ++i) {
            const double abar_target = f(static_cast<double>(i + 1) / steps) / f0;
            double a = abar_target / abar_prev;
            a = std::max(a, 1.0 - kMaxBeta);
            s.alpha[i] = a;
            abar_prev *= a;
            s.alpha_bar[i] = abar_prev;
        }
    } else {
        // Linear interpolation of alpha_bar between fixed endpoints; the
        // per-step alpha is recovered from consecutive ratios.
        const double head = 0.995;
        const double tail = 0.02;
        double abar_prev = 1.0;
        for (int i = 0; i < steps; ++i) {
            const double abar = steps == 1
                                    ? tail
                                    : head + (tail - head) * static_cast<double>(i) / (steps - 1);
            s.alpha[i] = abar / abar_prev;
            s.alpha_bar[i] = abar;
            abar_prev = abar;
        }
    }

    for (int i = 0; i < steps; ++i) {
        const double abar_prev = i == 0 ? 1.0 : s.alpha_bar[i - 1];
        const double beta = 1.0 - s.alpha[i];
        s.posterior_var[i] = beta * (1.0 - abar_prev) / (1.0 - s.alpha_bar[i]);
    }

    s.validate();
    return s;
}

TrajectoryTensor q_sample(const TrajectoryTensor& tau0, const NoiseSchedule& schedule, int step,
                          const std::vector<double>& eps) {
    if (step < 0 || step >= schedule.steps) {
        throw DataError("q_sample: step index out of range");
    }
    if (!tau0.normalized) {
        throw DataError("q_sample expects a normalized trajectory");
    }
    if (eps.size() != tau0.values.size()) {
        throw DataError("q_sample: noise shape mismatch");
    }
    const double signal = std::sqrt(schedule.alpha_bar[step]);
    const double noise = std::sqrt(1.0 - schedule.alpha_bar[step]);
    TrajectoryTensor out = tau0;
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        out.values[k] = signal * tau0.values[k] + noise * eps[k];
    }
    return out;
}

std::vector<double> posterior_mean(const NoiseSchedule& schedule, const std::vector<double>& tau_i,
                                   const std::vector<double>& eps_hat, int step) {
    if (step < 0 || step >= schedule.steps) {
        throw DataError("posterior_mean: step index out of range");
    }
    if (tau_i.size() != eps_hat.size()) {
        throw DataError("posterior_mean: shape mismatch");
    }
    const double inv_sqrt_alpha = 1.0 / std::sqrt(schedule.alpha[step]);
    const double coef = (1.0 - schedule.alpha[step]) / std::sqrt(1.0 - schedule.alpha_bar[step]);
    std::vector<double> mean(tau_i.size());
    for (std::size_t k = 0; k < tau_i.size(); ++k) {
        mean[k] = inv_sqrt_alpha * (tau_i[k] - coef * eps_hat[k]);
    }
    return mean;
}

}  // namespace playgen
