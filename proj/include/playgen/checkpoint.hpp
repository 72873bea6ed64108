#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "playgen/core.hpp"
#include "playgen/schedule.hpp"
#include "playgen/unet.hpp"
#include "playgen/value_net.hpp"

namespace playgen {

// Self-contained model container: architecture, schedule, normalization
// stats, training seed, and the flattened weights.
struct Checkpoint {
    std::string role;  // "denoiser" or "value"
    UNetConfig arch;
    NoiseSchedule schedule;
    NormalizationStats stats;
    std::uint64_t train_seed = 0;
    std::vector<double> weights;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

std::unique_ptr<TemporalUNet> make_denoiser(const Checkpoint& ckpt);
std::unique_ptr<ValueNet> make_value_net(const Checkpoint& ckpt);

Checkpoint snapshot_denoiser(const TemporalUNet& net, const NoiseSchedule& schedule,
                             const NormalizationStats& stats, std::uint64_t train_seed);
Checkpoint snapshot_value(const ValueNet& net, const NoiseSchedule& schedule,
                          const NormalizationStats& stats, std::uint64_t train_seed);

// Throws DataError when two checkpoints cannot plan together (different
// stats, horizon, schedule, or layout version).
void require_compatible(const Checkpoint& denoiser, const Checkpoint& value);

}  // namespace playgen
