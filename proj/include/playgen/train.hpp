#pragma once

#include <cstdint>
#include <vector>

#include "playgen/dataset.hpp"
#include "playgen/schedule.hpp"
#include "playgen/unet.hpp"
#include "playgen/value_net.hpp"

namespace playgen {

struct TrainHyper {
    int steps = 245000;  // documented full-scale default; desk configs override
    int batch = 512;
    double lr = 2e-5;
    std::uint64_t seed = 0;
    int snapshot_every = 100;  // granularity of the NaN-abort restore point
};

struct TrainResult {
    std::vector<double> loss_curve;  // one entry per optimizer step
    bool aborted = false;            // NaN loss; weights restored to last snapshot
    int abort_step = -1;
};

// Noise-prediction training: i ~ U[0, N), eps ~ N(0, I), minimize the mean
// squared error between eps and the net's prediction on q_sample(tau0, i, eps).
TrainResult train_diffusion(TemporalUNet& net, const Dataset& ds, const NoiseSchedule& schedule,
                            const TrainHyper& hp);

// Return regression on the same noised inputs against possession returns.
TrainResult train_value(ValueNet& net, const Dataset& ds, const NoiseSchedule& schedule,
                        const TrainHyper& hp);

void write_loss_curve(const std::string& path, const std::vector<double>& curve);

}  // namespace playgen
