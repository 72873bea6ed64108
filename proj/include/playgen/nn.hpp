#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "playgen/core.hpp"
#include "playgen/rng.hpp"

namespace playgen {

// Activations for the temporal nets: channels x batch x length, row-major,
// so a conv layer is a single GEMM over the (batch * length) axis.
struct Seq3 {
    int channels = 0;
    int batch = 0;
    int length = 0;
    std::vector<double> v;

    static Seq3 zeros(int channels, int batch, int length);
    double& at(int c, int b, int h) {
        return v[(static_cast<std::size_t>(c) * batch + b) * length + h];
    }
    double at(int c, int b, int h) const {
        return v[(static_cast<std::size_t>(c) * batch + b) * length + h];
    }
    std::size_t size() const { return v.size(); }
};

// Per-sample feature matrices (time embeddings, value-head inputs).
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    static Mat zeros(int rows, int cols);
    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

struct Param {
    std::string name;
    std::vector<double> w;
    std::vector<double> g;

    void init_zero(std::size_t n);
    void init_uniform(std::size_t n, double scale, Rng& rng);
    void zero_grad();
};

// Layers register their parameters here in construction order; the order
// defines the checkpoint serialization layout.
using ParamList = std::vector<Param*>;

class Conv1d {
public:
    Conv1d() = default;
    Conv1d(std::string name, int in_ch, int out_ch, int kernel, int stride, int pad, Rng& rng,
           bool zero_init = false);

    void collect_params(ParamList& params);

    Seq3 forward(const Seq3& x);
    Seq3 backward(const Seq3& dy);  // accumulates weight grads, returns dx

    int out_length(int in_length) const;
    int in_channels() const { return in_ch_; }
    int out_channels() const { return out_ch_; }

private:
    int in_ch_ = 0;
    int out_ch_ = 0;
    int kernel_ = 1;
    int stride_ = 1;
    int pad_ = 0;
    Param weight_;  // out_ch x (in_ch * kernel)
    Param bias_;    // out_ch
    Seq3 x_cache_;
};

class GroupNorm {
public:
    GroupNorm() = default;
    GroupNorm(std::string name, int channels, int groups);

    void collect_params(ParamList& params);

    Seq3 forward(const Seq3& x);
    Seq3 backward(const Seq3& dy);

private:
    int channels_ = 0;
    int groups_ = 0;
    double eps_ = 1e-5;
    Param gamma_;
    Param beta_;
    Seq3 xhat_cache_;
    std::vector<double> inv_std_cache_;  // batch * groups
};

class Mish {
public:
    Seq3 forward(const Seq3& x);
    Seq3 backward(const Seq3& dy);

private:
    Seq3 x_cache_;
};

double mish_scalar(double x);
double mish_grad_scalar(double x);

class Linear {
public:
    Linear() = default;
    Linear(std::string name, int in_features, int out_features, Rng& rng, bool zero_init = false);

    void collect_params(ParamList& params);

    Mat forward(const Mat& x);
    Mat backward(const Mat& dy);

    int in_features() const { return in_; }
    int out_features() const { return out_; }

private:
    int in_ = 0;
    int out_ = 0;
    Param weight_;  // out x in
    Param bias_;    // out
    Mat x_cache_;
};

// Sinusoidal table over diffusion steps followed by a two-layer MLP.
class TimeEmbedding {
public:
    TimeEmbedding() = default;
    TimeEmbedding(int num_steps, int dim, Rng& rng);

    void collect_params(ParamList& params);

    // One embedding row per batch sample, given each sample's step index.
    Mat forward(const std::vector<int>& steps);
    void backward(const Mat& demb);

    int dim() const { return dim_; }
    const Mat& table() const { return table_; }

private:
    int num_steps_ = 0;
    int dim_ = 0;
    Mat table_;  // num_steps x dim, fixed sinusoid base
    Linear lin1_;
    Mish mish_hidden_;
    Linear lin2_;
    Mat sin_cache_;
    Mat hidden_cache_;

    Mat mish_mat_forward(const Mat& x);
    Mat mish_mat_backward(const Mat& x, const Mat& dy);
};

// conv -> group norm -> mish, twice, with a per-channel time bias added
// after the first block and a 1x1 residual shortcut.
class ResidualBlock {
public:
    ResidualBlock() = default;
    ResidualBlock(std::string name, int in_ch, int out_ch, int embed_dim, int kernel, int groups,
                  Rng& rng);

    void collect_params(ParamList& params);

    Seq3 forward(const Seq3& x, const Mat& temb);
    // Returns dx; adds the embedding gradient into dtemb.
    Seq3 backward(const Seq3& dy, Mat& dtemb);

    int out_channels() const { return out_ch_; }

private:
    int in_ch_ = 0;
    int out_ch_ = 0;
    bool has_skip_conv_ = false;
    Conv1d conv1_;
    GroupNorm gn1_;
    Mish act1_;
    Mish time_act_;
    Linear time_lin_;
    Conv1d conv2_;
    GroupNorm gn2_;
    Mish act2_;
    Conv1d skip_;
    Mat temb_cache_;
    Mat time_mish_cache_;
};

// Strided conv halving the sequence length.
class Downsample {
public:
    Downsample() = default;
    Downsample(std::string name, int channels, Rng& rng);

    void collect_params(ParamList& params) { conv_.collect_params(params); }
    Seq3 forward(const Seq3& x) { return conv_.forward(x); }
    Seq3 backward(const Seq3& dy) { return conv_.backward(dy); }

private:
    Conv1d conv_;
};

// Nearest-neighbor x2 followed by a smoothing conv.
class Upsample {
public:
    Upsample() = default;
    Upsample(std::string name, int channels, Rng& rng);

    void collect_params(ParamList& params) { conv_.collect_params(params); }
    Seq3 forward(const Seq3& x);
    Seq3 backward(const Seq3& dy);

private:
    Conv1d conv_;
};

Seq3 concat_channels(const Seq3& a, const Seq3& b);
void split_channels(const Seq3& d, int channels_a, Seq3& da, Seq3& db);
void add_inplace(Seq3& dst, const Seq3& src);

class AdamOptimizer {
public:
    AdamOptimizer(ParamList params, double lr, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8);

    void step();
    void zero_grad();
    void set_lr(double lr) { lr_ = lr; }

private:
    ParamList params_;
    double lr_;
    double beta1_;
    double beta2_;
    double eps_;
    std::int64_t t_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

std::size_t total_param_count(const ParamList& params);
std::vector<double> flatten_params(const ParamList& params);
void unflatten_params(const std::vector<double>& flat, ParamList& params);

}  // namespace playgen
