#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "playgen/core.hpp"
#include "playgen/nn.hpp"
#include "playgen/schedule.hpp"

namespace playgen {

struct UNetConfig {
    int in_channels = kFeatureDim;
    int base_width = 32;
    std::vector<int> level_mults = {1, 2, 4};
    int kernel = 5;
    int groups = 8;
    int time_dim = 32;
    int diffusion_steps = 20;
    int horizon = 64;

    int levels() const { return static_cast<int>(level_mults.size()); }
    int downsample_factor() const { return 1 << (levels() - 1); }
    void validate() const;

    nlohmann::json to_json() const;
    static UNetConfig from_json(const nlohmann::json& j);
    bool operator==(const UNetConfig& other) const = default;
};

// Temporal U-Net noise predictor: 1-D convolutions over the time axis with
// per-level downsampling, skip connections, and step-embedding biases.
class TemporalUNet {
public:
    TemporalUNet(const UNetConfig& config, std::uint64_t init_seed);

    Seq3 forward(const Seq3& x, const std::vector<int>& steps);
    Seq3 backward(const Seq3& dy);

    const UNetConfig& config() const { return config_; }
    ParamList& params() { return params_; }
    const ParamList& params() const { return params_; }

private:
    UNetConfig config_;
    TimeEmbedding time_embed_;
    std::vector<ResidualBlock> down_rb1_;
    std::vector<ResidualBlock> down_rb2_;
    std::vector<Downsample> downs_;
    ResidualBlock mid1_;
    ResidualBlock mid2_;
    std::vector<ResidualBlock> up_rb1_;  // indexed by level, levels-1 .. 1 used
    std::vector<ResidualBlock> up_rb2_;
    std::vector<Upsample> ups_;
    Conv1d final_conv1_;
    GroupNorm final_gn_;
    Mish final_act_;
    Conv1d final_conv2_;

    std::vector<int> skip_channels_;
    ParamList params_;
    int batch_cache_ = 0;
};

// Single-trajectory wrapper over the batched forward pass. The input must be
// normalized with a horizon divisible by the net's downsampling factor.
std::vector<double> predict_noise(TemporalUNet& net, const TrajectoryTensor& tau_i, int step);

// Layout converters between trajectory rows (time x feature) and Seq3.
Seq3 trajectories_to_seq(const std::vector<const TrajectoryTensor*>& batch);
void seq_to_values(const Seq3& x, int sample, std::vector<double>& out);

}  // namespace playgen
