#include "playgen/value_net.hpp"

#include <cmath>

namespace playgen {

ValueNet::ValueNet(const UNetConfig& config, std::uint64_t init_seed) : config_(config) {
    config_.validate();
    Rng rng(init_seed);
    const int levels = config_.levels();
    const int e = config_.time_dim;
    const int k = config_.kernel;
    const int g = config_.groups;

    time_embed_ = TimeEmbedding(config_.diffusion_steps, e, rng);

    std::vector<int> widths(levels);
    for (int l = 0; l < levels; ++l) {
        widths[l] = config_.base_width * config_.level_mults[l];
    }
    for (int l = 0; l < levels; ++l) {
        const int in_ch = l == 0 ? config_.in_channels : widths[l - 1];
        const std::string tag = "vdown" + std::to_string(l);
        down_rb1_.emplace_back(tag + ".rb1", in_ch, widths[l], e, k, g, rng);
        down_rb2_.emplace_back(tag + ".rb2", widths[l], widths[l], e, k, g, rng);
        if (l < levels - 1) {
            downs_.emplace_back(tag + ".down", widths[l], rng);
        }
    }
    mid1_ = ResidualBlock("vmid.rb1", widths[levels - 1], widths[levels - 1], e, k, g, rng);
    mid2_ = ResidualBlock("vmid.rb2", widths[levels - 1], widths[levels - 1], e, k, g, rng);

    mid_length_cache_ = config_.horizon / config_.downsample_factor();
    head_features_ = widths[levels - 1] * mid_length_cache_;
    // The scalar head starts at zero so an untrained net predicts 0.
    head_ = Linear("vhead", head_features_, 1, rng, /*zero_init=*/true);

    time_embed_.collect_params(params_);
    for (int l = 0; l < levels; ++l) {
        down_rb1_[l].collect_params(params_);
        down_rb2_[l].collect_params(params_);
        if (l < levels - 1) {
            downs_[l].collect_params(params_);
        }
    }
    mid1_.collect_params(params_);
    mid2_.collect_params(params_);
    head_.collect_params(params_);
}

std::vector<double> ValueNet::forward(const Seq3& x_in, const std::vector<int>& steps) {
    if (x_in.channels != config_.in_channels) {
        throw DataError("value net forward: channel mismatch");
    }
    if (x_in.length != config_.horizon) {
        throw DataError("value net forward: horizon mismatch with architecture");
    }
    if (static_cast<int>(steps.size()) != x_in.batch) {
        throw DataError("value net forward: one step index per batch sample required");
    }
    batch_cache_ = x_in.batch;
    const int levels = config_.levels();

    const Mat temb = time_embed_.forward(steps);
    Seq3 x = x_in;
    for (int l = 0; l < levels; ++l) {
        x = down_rb1_[l].forward(x, temb);
        x = down_rb2_[l].forward(x, temb);
        if (l < levels - 1) {
            x = downs_[l].forward(x);
        }
    }
    x = mid1_.forward(x, temb);
    x = mid2_.forward(x, temb);

    // Flatten (channels, length) per sample and apply the scalar head.
    Mat flat = Mat::zeros(x.batch, head_features_);
    for (int b = 0; b < x.batch; ++b) {
        for (int c = 0; c < x.channels; ++c) {
            for (int h = 0; h < x.length; ++h) {
                flat.at(b, c * x.length + h) = x.at(c, b, h);
            }
        }
    }
    const Mat out = head_.forward(flat);
    std::vector<double> scalars(static_cast<std::size_t>(out.rows));
    for (int b = 0; b < out.rows; ++b) {
        scalars[static_cast<std::size_t>(b)] = out.at(b, 0);
        if (!std::isfinite(scalars[static_cast<std::size_t>(b)])) {
            throw NumericError("value net produced a non-finite return estimate");
        }
    }
    return scalars;
}

Seq3 ValueNet::backward(const std::vector<double>& dscalar) {
    const int levels = config_.levels();
    Mat dout = Mat::zeros(batch_cache_, 1);
    for (int b = 0; b < batch_cache_; ++b) {
        dout.at(b, 0) = dscalar[static_cast<std::size_t>(b)];
    }
    const Mat dflat = head_.backward(dout);

    const int mid_ch = config_.base_width * config_.level_mults[levels - 1];
    Seq3 dx = Seq3::zeros(mid_ch, batch_cache_, mid_length_cache_);
    for (int b = 0; b < batch_cache_; ++b) {
        for (int c = 0; c < mid_ch; ++c) {
            for (int h = 0; h < mid_length_cache_; ++h) {
                dx.at(c, b, h) = dflat.at(b, c * mid_length_cache_ + h);
            }
        }
    }

    Mat dtemb = Mat::zeros(batch_cache_, config_.time_dim);
    dx = mid2_.backward(dx, dtemb);
    dx = mid1_.backward(dx, dtemb);
    for (int l = levels - 1; l >= 0; --l) {
        if (l < levels - 1) {
            dx = downs_[l].backward(dx);
        }
        dx = down_rb2_[l].backward(dx, dtemb);
        dx = down_rb1_[l].backward(dx, dtemb);
    }
    time_embed_.backward(dtemb);
    return dx;
}

double predict_return(ValueNet& net, const TrajectoryTensor& tau_i, int step) {
    if (!tau_i.normalized) {
        throw DataError("predict_return expects a normalized trajectory");
    }
    if (step < 0 || step >= net.config().diffusion_steps) {
        throw DataError("predict_return: step index out of range");
    }
    tau_i.validate();
    if (tau_i.horizon != net.config().horizon) {
        throw DataError("predict_return: horizon mismatch with architecture");
    }
    const Seq3 x = trajectories_to_seq({&tau_i});
    return net.forward(x, {step}).front();
}

std::vector<double> grad_return(ValueNet& net, const TrajectoryTensor& tau_i, int step) {
    predict_return(net, tau_i, step);
    const Seq3 dx = net.backward({1.0});
    std::vector<double> grad;
    seq_to_values(dx, 0, grad);
    return grad;
}

}  // namespace playgen
