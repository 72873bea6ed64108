#pragma once

#include <string>
#include <vector>

#include "playgen/core.hpp"

namespace playgen {

enum class ScheduleKind { cosine, linear };

const char* schedule_kind_name(ScheduleKind kind);
ScheduleKind schedule_kind_from_name(const std::string& name);

// Per-step diffusion coefficients. Index i runs from the least-noisy step 0
// to the noisiest step N-1; alpha_bar is the cumulative product of alpha.
struct NoiseSchedule {
    int steps = 0;
    ScheduleKind kind = ScheduleKind::cosine;
    std::vector<double> alpha;
    std::vector<double> alpha_bar;
    std::vector<double> posterior_var;  // reverse-process variance per step

    void validate() const;
    bool operator==(const NoiseSchedule& other) const = default;
};

NoiseSchedule make_schedule(int steps, ScheduleKind kind);

// Closed-form forward noising: sqrt(abar_i) * tau0 + sqrt(1 - abar_i) * eps.
TrajectoryTensor q_sample(const TrajectoryTensor& tau0, const NoiseSchedule& schedule, int step,
                          const std::vector<double>& eps);

// Reverse-process mean from the noisy input and the predicted noise:
// (tau_i - (1 - alpha_i) / sqrt(1 - abar_i) * eps_hat) / sqrt(alpha_i).
std::vector<double> posterior_mean(const NoiseSchedule& schedule, const std::vector<double>& tau_i,
                                   const std::vector<double>& eps_hat, int step);

}  // namespace playgen
