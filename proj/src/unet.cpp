#include "playgen/unet.hpp"

namespace playgen {

void UNetConfig::validate() const {
    if (in_channels < 1 || base_width < 1 || kernel < 1 || kernel % 2 == 0 || groups < 1 ||
        time_dim < 2 || time_dim % 2 != 0 || diffusion_steps < 1 || horizon < 1) {
        throw DataError("invalid U-Net configuration");
    }
    if (level_mults.empty()) {
        throw DataError("U-Net needs at least one resolution level");
    }
    for (int m : level_mults) {
        if (m < 1 || (base_width * m) % groups != 0) {
            throw DataError("level widths must be positive multiples of the group count");
        }
    }
    if (horizon % downsample_factor() != 0) {
        throw DataError("horizon must be divisible by the U-Net downsampling factor");
    }
}

nlohmann::json UNetConfig::to_json() const {
    return {
        {"in_channels", in_channels}, {"base_width", base_width}, {"level_mults", level_mults},
        {"kernel", kernel},           {"groups", groups},         {"time_dim", time_dim},
        {"diffusion_steps", diffusion_steps}, {"horizon", horizon},
    };
}

UNetConfig UNetConfig::from_json(const nlohmann::json& j) {
    UNetConfig c;
    c.in_channels = j.at("in_channels").get<int>();
    c.base_width = j.at("base_width").get<int>();
    c.level_mults = j.at("level_mults").get<std::vector<int>>();
    c.kernel = j.at("kernel").get<int>();
    c.groups = j.at("groups").get<int>();
    c.time_dim = j.at("time_dim").get<int>();
    c.diffusion_steps = j.at("diffusion_steps").get<int>();
    c.horizon = j.at("horizon").get<int>();
    c.validate();
    return c;
}

TemporalUNet::TemporalUNet(const UNetConfig& config, std::uint64_t init_seed) : config_(config) {
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
    skip_channels_ = widths;

    for (int l = 0; l < levels; ++l) {
        const int in_ch = l == 0 ? config_.in_channels : widths[l - 1];
        const std::string tag = "down" + std::to_string(l);
        down_rb1_.emplace_back(tag + ".rb1", in_ch, widths[l], e, k, g, rng);
        down_rb2_.emplace_back(tag + ".rb2", widths[l], widths[l], e, k, g, rng);
        if (l < levels - 1) {
            downs_.emplace_back(tag + ".down", widths[l], rng);
        }
    }
    mid1_ = ResidualBlock("mid.rb1", widths[levels - 1], widths[levels - 1], e, k, g, rng);
    mid2_ = ResidualBlock("mid.rb2", widths[levels - 1], widths[levels - 1], e, k, g, rng);

    up_rb1_.resize(levels);
    up_rb2_.resize(levels);
    ups_.resize(levels);
    for (int l = levels - 1; l >= 1; --l) {
        const std::string tag = "up" + std::to_string(l);
        up_rb1_[l] = ResidualBlock(tag + ".rb1", 2 * widths[l], widths[l - 1], e, k, g, rng);
        up_rb2_[l] = ResidualBlock(tag + ".rb2", widths[l - 1], widths[l - 1], e, k, g, rng);
        ups_[l] = Upsample(tag + ".up", widths[l - 1], rng);
    }

    final_conv1_ = Conv1d("final.conv1", 2 * widths[0], widths[0], k, 1, k / 2, rng);
    final_gn_ = GroupNorm("final.gn", widths[0], g);
    final_conv2_ = Conv1d("final.conv2", widths[0], config_.in_channels, 1, 1, 0, rng,
                          /*zero_init=*/true);

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
    for (int l = levels - 1; l >= 1; --l) {
        up_rb1_[l].collect_params(params_);
        up_rb2_[l].collect_params(params_);
        ups_[l].collect_params(params_);
    }
    final_conv1_.collect_params(params_);
    final_gn_.collect_params(params_);
    final_conv2_.collect_params(params_);
}

Seq3 TemporalUNet::forward(const Seq3& x_in, const std::vector<int>& steps) {
    if (x_in.channels != config_.in_channels) {
        throw DataError("U-Net forward: channel mismatch");
    }
    if (x_in.length % config_.downsample_factor() != 0) {
        throw DataError("U-Net forward: length not divisible by downsampling factor");
    }
    if (static_cast<int>(steps.size()) != x_in.batch) {
        throw DataError("U-Net forward: one step index per batch sample required");
    }
    batch_cache_ = x_in.batch;
    const int levels = config_.levels();

    const Mat temb = time_embed_.forward(steps);
    Seq3 x = x_in;
    std::vector<Seq3> skips(levels);
    for (int l = 0; l < levels; ++l) {
        x = down_rb1_[l].forward(x, temb);
        x = down_rb2_[l].forward(x, temb);
        skips[l] = x;
        if (l < levels - 1) {
            x = downs_[l].forward(x);
        }
    }
    x = mid1_.forward(x, temb);
    x = mid2_.forward(x, temb);
    for (int l = levels - 1; l >= 1; --l) {
        x = concat_channels(x, skips[l]);
        x = up_rb1_[l].forward(x, temb);
        x = up_rb2_[l].forward(x, temb);
        x = ups_[l].forward(x);
    }
    x = concat_channels(x, skips[0]);
    x = final_conv1_.forward(x);
    x = final_gn_.forward(x);
    x = final_act_.forward(x);
    x = final_conv2_.forward(x);
    return x;
}

Seq3 TemporalUNet::backward(const Seq3& dy) {
    const int levels = config_.levels();
    Mat dtemb = Mat::zeros(batch_cache_, config_.time_dim);
    std::vector<Seq3> dskips(levels);

    Seq3 d = final_conv2_.backward(dy);
    d = final_act_.backward(d);
    d = final_gn_.backward(d);
    d = final_conv1_.backward(d);
    Seq3 dx;
    split_channels(d, skip_channels_[0], dx, dskips[0]);

    for (int l = 1; l <= levels - 1; ++l) {
        d = ups_[l].backward(dx);
        d = up_rb2_[l].backward(d, dtemb);
        d = up_rb1_[l].backward(d, dtemb);
        split_channels(d, skip_channels_[l], dx, dskips[l]);
    }

    dx = mid2_.backward(dx, dtemb);
    dx = mid1_.backward(dx, dtemb);

    for (int l = levels - 1; l >= 0; --l) {
        if (l < levels - 1) {
            dx = downs_[l].backward(dx);
        }
        add_inplace(dx, dskips[l]);
        dx = down_rb2_[l].backward(dx, dtemb);
        dx = down_rb1_[l].backward(dx, dtemb);
    }

    time_embed_.backward(dtemb);
    return dx;
}

std::vector<double> predict_noise(TemporalUNet& net, const TrajectoryTensor& tau_i, int step) {
    if (!tau_i.normalized) {
        throw DataError("predict_noise expects a normalized trajectory");
    }
    if (step < 0 || step >= net.config().diffusion_steps) {
        throw DataError("predict_noise: step index out of range");
    }
    tau_i.validate();
    if (tau_i.horizon % net.config().downsample_factor() != 0) {
        throw DataError("predict_noise: horizon incompatible with architecture");
    }
    const Seq3 x = trajectories_to_seq({&tau_i});
    const Seq3 y = net.forward(x, {step});
    std::vector<double> out;
    seq_to_values(y, 0, out);
    return out;
}

Seq3 trajectories_to_seq(const std::vector<const TrajectoryTensor*>& batch) {
    if (batch.empty()) {
        throw DataError("trajectories_to_seq: empty batch");
    }
    const int h = batch.front()->horizon;
    Seq3 x = Seq3::zeros(kFeatureDim, static_cast<int>(batch.size()), h);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const TrajectoryTensor& t = *batch[b];
        if (t.horizon != h) {
            throw DataError("trajectories_to_seq: mixed horizons in batch");
        }
        for (int c = 0; c < kFeatureDim; ++c) {
            for (int row = 0; row < h; ++row) {
                x.at(c, static_cast<int>(b), row) = t.at(row, c);
            }
        }
    }
    return x;
}

void seq_to_values(const Seq3& x, int sample, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(x.length) * x.channels);
    for (int c = 0; c < x.channels; ++c) {
        for (int h = 0; h < x.length; ++h) {
            out[static_cast<std::size_t>(h) * x.channels + c] = x.at(c, sample, h);
        }
    }
}

}  // namespace playgen
