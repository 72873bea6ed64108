#pragma once

#include <cstdint>
#include <vector>

#include "playgen/core.hpp"
#include "playgen/nn.hpp"
#include "playgen/unet.hpp"

namespace playgen {

// Return predictor: the U-Net's downsampling half plus a linear scalar head.
// Shares the architecture descriptor (and step-embedding shape) with the
// denoiser it guides.
class ValueNet {
public:
    ValueNet(const UNetConfig& config, std::uint64_t init_seed);

    // One scalar per batch sample.
    std::vector<double> forward(const Seq3& x, const std::vector<int>& steps);
    // dscalar: one upstream gradient per sample; returns d(input).
    Seq3 backward(const std::vector<double>& dscalar);

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
    Linear head_;

    ParamList params_;
    int batch_cache_ = 0;
    int mid_length_cache_ = 0;
    int head_features_ = 0;
};

// Scalar return estimate for one normalized trajectory at diffusion step i.
double predict_return(ValueNet& net, const TrajectoryTensor& tau_i, int step);

// Gradient of predict_return with respect to every input entry, as an
// H x feature row-major array matching the trajectory layout.
std::vector<double> grad_return(ValueNet& net, const TrajectoryTensor& tau_i, int step);

}  // namespace playgen
