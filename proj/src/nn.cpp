#include "playgen/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <cblas.h>

namespace playgen {

namespace {

// Row-major GEMM: C = alpha * op(A) * op(B) + beta * C.
void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a, int lda,
          const double* b, int ldb, double beta, double* c, int ldc) {
    cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

// X (C,B,H) -> M (C*K, B*H_out) with zero padding.
void im2col(const Seq3& x, int kernel, int stride, int pad, int h_out, std::vector<double>& m) {
    const int bxh = x.batch * h_out;
    m.assign(static_cast<std::size_t>(x.channels) * kernel * bxh, 0.0);
    for (int ci = 0; ci < x.channels; ++ci) {
        for (int k = 0; k < kernel; ++k) {
            double* row = m.data() + static_cast<std::size_t>(ci * kernel + k) * bxh;
            for (int b = 0; b < x.batch; ++b) {
                const double* src = x.v.data() + (static_cast<std::size_t>(ci) * x.batch + b) * x.length;
                double* dst = row + static_cast<std::size_t>(b) * h_out;
                if (stride == 1) {
                    const int lo = std::max(0, pad - k);
                    const int hi = std::min(h_out, x.length + pad - k);
                    if (hi > lo) {
                        std::memcpy(dst + lo, src + lo + k - pad,
                                    static_cast<std::size_t>(hi - lo) * sizeof(double));
                    }
                } else {
                    for (int ho = 0; ho < h_out; ++ho) {
                        const int h = ho * stride + k - pad;
                        if (h >= 0 && h < x.length) {
                            dst[ho] = src[h];
                        }
                    }
                }
            }
        }
    }
}

// Scatter-add of dM (C*K, B*H_out) back into dX (C,B,H).
void col2im(const std::vector<double>& m, int channels, int batch, int length, int kernel,
            int stride, int pad, int h_out, Seq3& dx) {
    const int bxh = batch * h_out;
    for (int ci = 0; ci < channels; ++ci) {
        for (int k = 0; k < kernel; ++k) {
            const double* row = m.data() + static_cast<std::size_t>(ci * kernel + k) * bxh;
            for (int b = 0; b < batch; ++b) {
                double* dst = dx.v.data() + (static_cast<std::size_t>(ci) * batch + b) * length;
                const double* src = row + static_cast<std::size_t>(b) * h_out;
                for (int ho = 0; ho < h_out; ++ho) {
                    const int h = ho * stride + k - pad;
                    if (h >= 0 && h < length) {
                        dst[h] += src[ho];
                    }
                }
            }
        }
    }
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x) {
    if (x > 20.0) {
        return x;
    }
    if (x < -20.0) {
        return std::exp(x);
    }
    return std::log1p(std::exp(x));
}

}  // namespace

double mish_scalar(double x) {
    return x * std::tanh(softplus(x));
}

double mish_grad_scalar(double x) {
    const double t = std::tanh(softplus(x));
    return t + x * (1.0 - t * t) * sigmoid(x);
}

Seq3 Seq3::zeros(int channels, int batch, int length) {
    Seq3 s;
    s.channels = channels;
    s.batch = batch;
    s.length = length;
    s.v.assign(static_cast<std::size_t>(channels) * batch * length, 0.0);
    return s;
}

Mat Mat::zeros(int rows, int cols) {
    Mat m;
    m.rows = rows;
    m.cols = cols;
    m.v.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    return m;
}

void Param::init_zero(std::size_t n) {
    w.assign(n, 0.0);
    g.assign(n, 0.0);
}

void Param::init_uniform(std::size_t n, double scale, Rng& rng) {
    w.resize(n);
    g.assign(n, 0.0);
    for (auto& x : w) {
        x = rng.uniform(-scale, scale);
    }
}

void Param::zero_grad() {
    std::fill(g.begin(), g.end(), 0.0);
}

// ---------------------------------------------------------------------------
// Conv1d
// ---------------------------------------------------------------------------

Conv1d::Conv1d(std::string name, int in_ch, int out_ch, int kernel, int stride, int pad, Rng& rng,
               bool zero_init)
    : in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel), stride_(stride), pad_(pad) {
    weight_.name = name + ".weight";
    bias_.name = name + ".bias";
    const std::size_t wn = static_cast<std::size_t>(out_ch) * in_ch * kernel;
    if (zero_init) {
        weight_.init_zero(wn);
    } else {
        weight_.init_uniform(wn, 1.0 / std::sqrt(static_cast<double>(in_ch) * kernel), rng);
    }
    bias_.init_zero(static_cast<std::size_t>(out_ch));
}

void Conv1d::collect_params(ParamList& params) {
    params.push_back(&weight_);
    params.push_back(&bias_);
}

int Conv1d::out_length(int in_length) const {
    return (in_length + 2 * pad_ - kernel_) / stride_ + 1;
}

Seq3 Conv1d::forward(const Seq3& x) {
    if (x.channels != in_ch_) {
        throw DataError("Conv1d: channel mismatch");
    }
    x_cache_ = x;
    const int h_out = out_length(x.length);
    Seq3 y = Seq3::zeros(out_ch_, x.batch, h_out);
    std::vector<double> m;
    im2col(x, kernel_, stride_, pad_, h_out, m);
    const int bxh = x.batch * h_out;
    gemm(false, false, out_ch_, bxh, in_ch_ * kernel_, 1.0, weight_.w.data(), in_ch_ * kernel_,
         m.data(), bxh, 0.0, y.v.data(), bxh);
    for (int o = 0; o < out_ch_; ++o) {
        const double b = bias_.w[o];
        double* row = y.v.data() + static_cast<std::size_t>(o) * bxh;
        for (int j = 0; j < bxh; ++j) {
            row[j] += b;
        }
    }
    return y;
}

Seq3 Conv1d::backward(const Seq3& dy) {
    const Seq3& x = x_cache_;
    const int h_out = dy.length;
    const int bxh = x.batch * h_out;

    for (int o = 0; o < out_ch_; ++o) {
        const double* row = dy.v.data() + static_cast<std::size_t>(o) * bxh;
        double s = 0.0;
        for (int j = 0; j < bxh; ++j) {
            s += row[j];
        }
        bias_.g[o] += s;
    }

    std::vector<double> m;
    im2col(x, kernel_, stride_, pad_, h_out, m);
    // dW += dY * M^T
    gemm(false, true, out_ch_, in_ch_ * kernel_, bxh, 1.0, dy.v.data(), bxh, m.data(), bxh, 1.0,
         weight_.g.data(), in_ch_ * kernel_);

    // dM = W^T * dY, then scatter back to dX.
    std::vector<double> dm(static_cast<std::size_t>(in_ch_) * kernel_ * bxh);
    gemm(true, false, in_ch_ * kernel_, bxh, out_ch_, 1.0, weight_.w.data(), in_ch_ * kernel_,
         dy.v.data(), bxh, 0.0, dm.data(), bxh);
    Seq3 dx = Seq3::zeros(in_ch_, x.batch, x.length);
    col2im(dm, in_ch_, x.batch, x.length, kernel_, stride_, pad_, h_out, dx);
    return dx;
}

// ---------------------------------------------------------------------------
// GroupNorm
// ---------------------------------------------------------------------------

GroupNorm::GroupNorm(std::string name, int channels, int groups)
    : channels_(channels), groups_(groups) {
    if (channels % groups != 0) {
        throw DataError("GroupNorm: channels must be divisible by groups");
    }
    gamma_.name = name + ".gamma";
    beta_.name = name + ".beta";
    gamma_.w.assign(static_cast<std::size_t>(channels), 1.0);
    gamma_.g.assign(static_cast<std::size_t>(channels), 0.0);
    beta_.init_zero(static_cast<std::size_t>(channels));
}

void GroupNorm::collect_params(ParamList& params) {
    params.push_back(&gamma_);
    params.push_back(&beta_);
}

Seq3 GroupNorm::forward(const Seq3& x) {
    if (x.channels != channels_) {
        throw DataError("GroupNorm: channel mismatch");
    }
    const int cpg = channels_ / groups_;
    const int n = cpg * x.length;
    xhat_cache_ = Seq3::zeros(x.channels, x.batch, x.length);
    inv_std_cache_.assign(static_cast<std::size_t>(x.batch) * groups_, 0.0);
    Seq3 y = Seq3::zeros(x.channels, x.batch, x.length);

    for (int b = 0; b < x.batch; ++b) {
        for (int g = 0; g < groups_; ++g) {
            double mean = 0.0;
            for (int c = g * cpg; c < (g + 1) * cpg; ++c) {
                const double* row = &x.v[(static_cast<std::size_t>(c) * x.batch + b) * x.length];
                for (int h = 0; h < x.length; ++h) {
                    mean += row[h];
                }
            }
            mean /= n;
            double var = 0.0;
            for (int c = g * cpg; c < (g + 1) * cpg; ++c) {
                const double* row = &x.v[(static_cast<std::size_t>(c) * x.batch + b) * x.length];
                for (int h = 0; h < x.length; ++h) {
                    const double d = row[h] - mean;
                    var += d * d;
                }
            }
            var /= n;
            const double inv_std = 1.0 / std::sqrt(var + eps_);
            inv_std_cache_[static_cast<std::size_t>(b) * groups_ + g] = inv_std;
            for (int c = g * cpg; c < (g + 1) * cpg; ++c) {
                const double* row = &x.v[(static_cast<std::size_t>(c) * x.batch + b) * x.length];
                double* xh = &xhat_cache_.v[(static_cast<std::size_t>(c) * x.batch + b) * x.length];
                double* yr = &y.v[(static_cast<std::size_t>(c) * x.batch + b) * x.length];
                const double gam = gamma_.w[c];
                const double bet = beta_.w[c];
                for (int h = 0; h < x.length; ++h) {
                    xh[h] = (row[h] - mean) * inv_std;
                    yr[h] = gam * xh[h] + bet;
                }
            }
        }
    }
    return y;
}

Seq3 GroupNorm::backward(const Seq3& dy) {
    const Seq3& xh = xhat_cache_;
    const int cpg = channels_ / groups_;
    const int n = cpg * dy.length;
    Seq3 dx = Seq3::zeros(dy.channels, dy.batch, dy.length);

    for (int c = 0; c < channels_; ++c) {
        double dg = 0.0;
        double db = 0.0;
        for (int b = 0; b < dy.batch; ++b) {
            const double* dyr = &dy.v[(static_cast<std::size_t>(c) * dy.batch + b) * dy.length];
            const double* xhr = &xh.v[(static_cast<std::size_t>(c) * dy.batch + b) * dy.length];
            for (int h = 0; h < dy.length; ++h) {
                dg += dyr[h] * xhr[h];
                db += dyr[h];
            }
        }
        gamma_.g[c] += dg;
        beta_.g[c] += db;
    }

    for (int b = 0; b < dy.batch; ++b) {
        for (int g = 0; g < groups_; ++g) {
            double sum1 = 0.0;  // sum of dxhat
            double sum2 = 0.0;  // sum of dxhat * xhat
            for (int c = g * cpg; c < (g + 1) * cpg; ++c) {
                const double gam = gamma_.w[c];
                const double* dyr = &dy.v[(static_cast<std::size_t>(c) * dy.batch + b) * dy.length];
                const double* xhr = &xh.v[(static_cast<std::size_t>(c) * dy.batch + b) * dy.length];
                for (int h = 0; h < dy.length; ++h) {
                    const double dxh = dyr[h] * gam;
                    sum1 += dxh;
                    sum2 += dxh * xhr[h];
                }
            }
            const double inv_std = inv_std_cache_[static_cast<std::size_t>(b) * groups_ + g];
            for (int c = g * cpg; c < (g + 1) * cpg; ++c) {
                const double gam = gamma_.w[c];
                const double* dyr = &dy.v[(static_cast<std::size_t>(c) * dy.batch + b) * dy.length];
                const double* xhr = &xh.v[(static_cast<std::size_t>(c) * dy.batch + b) * dy.length];
                double* dxr = &dx.v[(static_cast<std::size_t>(c) * dy.batch + b) * dy.length];
                for (int h = 0; h < dy.length; ++h) {
                    const double dxh = dyr[h] * gam;
                    dxr[h] = inv_std * (dxh - (sum1 + xhr[h] * sum2) / n);
                }
            }
        }
    }
    return dx;
}

// ---------------------------------------------------------------------------
// Mish
// ---------------------------------------------------------------------------

Seq3 Mish::forward(const Seq3& x) {
    x_cache_ = x;
    Seq3 y = x;
    for (auto& v : y.v) {
        v = mish_scalar(v);
    }
    return y;
}

Seq3 Mish::backward(const Seq3& dy) {
    Seq3 dx = dy;
    for (std::size_t i = 0; i < dx.v.size(); ++i) {
        dx.v[i] *= mish_grad_scalar(x_cache_.v[i]);
    }
    return dx;
}

// ---------------------------------------------------------------------------
// Linear
// ---------------------------------------------------------------------------

Linear::Linear(std::string name, int in_features, int out_features, Rng& rng, bool zero_init)
    : in_(in_features), out_(out_features) {
    weight_.name = name + ".weight";
    bias_.name = name + ".bias";
    const std::size_t wn = static_cast<std::size_t>(out_) * in_;
    if (zero_init) {
        weight_.init_zero(wn);
    } else {
        weight_.init_uniform(wn, 1.0 / std::sqrt(static_cast<double>(in_)), rng);
    }
    bias_.init_zero(static_cast<std::size_t>(out_));
}

void Linear::collect_params(ParamList& params) {
    params.push_back(&weight_);
    params.push_back(&bias_);
}

Mat Linear::forward(const Mat& x) {
    if (x.cols != in_) {
        throw DataError("Linear: feature mismatch");
    }
    x_cache_ = x;
    Mat y = Mat::zeros(x.rows, out_);
    gemm(false, true, x.rows, out_, in_, 1.0, x.v.data(), in_, weight_.w.data(), in_, 0.0,
         y.v.data(), out_);
    for (int r = 0; r < y.rows; ++r) {
        for (int c = 0; c < out_; ++c) {
            y.at(r, c) += bias_.w[c];
        }
    }
    return y;
}

Mat Linear::backward(const Mat& dy) {
    const Mat& x = x_cache_;
    for (int r = 0; r < dy.rows; ++r) {
        for (int c = 0; c < out_; ++c) {
            bias_.g[c] += dy.at(r, c);
        }
    }
    // dW += dY^T * X
    gemm(true, false, out_, in_, dy.rows, 1.0, dy.v.data(), out_, x.v.data(), in_, 1.0,
         weight_.g.data(), in_);
    Mat dx = Mat::zeros(dy.rows, in_);
    gemm(false, false, dy.rows, in_, out_, 1.0, dy.v.data(), out_, weight_.w.data(), in_, 0.0,
         dx.v.data(), in_);
    return dx;
}

// ---------------------------------------------------------------------------
// TimeEmbedding
// ---------------------------------------------------------------------------

TimeEmbedding::TimeEmbedding(int num_steps, int dim, Rng& rng)
    : num_steps_(num_steps), dim_(dim) {
    if (dim % 2 != 0) {
        throw DataError("TimeEmbedding: dim must be even");
    }
    const int half = dim / 2;
    table_ = Mat::zeros(num_steps, dim);
    const double denom = half > 1 ? static_cast<double>(half - 1) : 1.0;
    for (int i = 0; i < num_steps; ++i) {
        for (int j = 0; j < half; ++j) {
            const double freq = std::exp(-std::log(10000.0) * j / denom);
            table_.at(i, j) = std::sin(i * freq);
            table_.at(i, half + j) = std::cos(i * freq);
        }
    }
    lin1_ = Linear("time.lin1", dim, dim * 4, rng);
    lin2_ = Linear("time.lin2", dim * 4, dim, rng);
}

void TimeEmbedding::collect_params(ParamList& params) {
    lin1_.collect_params(params);
    lin2_.collect_params(params);
}

Mat TimeEmbedding::mish_mat_forward(const Mat& x) {
    Mat y = x;
    for (auto& v : y.v) {
        v = mish_scalar(v);
    }
    return y;
}

Mat TimeEmbedding::mish_mat_backward(const Mat& x, const Mat& dy) {
    Mat dx = dy;
    for (std::size_t i = 0; i < dx.v.size(); ++i) {
        dx.v[i] *= mish_grad_scalar(x.v[i]);
    }
    return dx;
}

Mat TimeEmbedding::forward(const std::vector<int>& steps) {
    sin_cache_ = Mat::zeros(static_cast<int>(steps.size()), dim_);
    for (std::size_t b = 0; b < steps.size(); ++b) {
        if (steps[b] < 0 || steps[b] >= num_steps_) {
            throw DataError("TimeEmbedding: step index out of range");
        }
        for (int c = 0; c < dim_; ++c) {
            sin_cache_.at(static_cast<int>(b), c) = table_.at(steps[b], c);
        }
    }
    hidden_cache_ = lin1_.forward(sin_cache_);
    const Mat hm = mish_mat_forward(hidden_cache_);
    return lin2_.forward(hm);
}

void TimeEmbedding::backward(const Mat& demb) {
    const Mat dhm = lin2_.backward(demb);
    const Mat dh = mish_mat_backward(hidden_cache_, dhm);
    lin1_.backward(dh);  // gradient w.r.t. the fixed sinusoid table is dropped
}

// ---------------------------------------------------------------------------
// ResidualBlock
// ---------------------------------------------------------------------------

ResidualBlock::ResidualBlock(std::string name, int in_ch, int out_ch, int embed_dim, int kernel,
                             int groups, Rng& rng)
    : in_ch_(in_ch), out_ch_(out_ch), has_skip_conv_(in_ch != out_ch) {
    const int pad = kernel / 2;
    conv1_ = Conv1d(name + ".conv1", in_ch, out_ch, kernel, 1, pad, rng);
    gn1_ = GroupNorm(name + ".gn1", out_ch, groups);
    time_lin_ = Linear(name + ".time", embed_dim, out_ch, rng);
    conv2_ = Conv1d(name + ".conv2", out_ch, out_ch, kernel, 1, pad, rng);
    gn2_ = GroupNorm(name + ".gn2", out_ch, groups);
    if (has_skip_conv_) {
        skip_ = Conv1d(name + ".skip", in_ch, out_ch, 1, 1, 0, rng);
    }
}

void ResidualBlock::collect_params(ParamList& params) {
    conv1_.collect_params(params);
    gn1_.collect_params(params);
    time_lin_.collect_params(params);
    conv2_.collect_params(params);
    gn2_.collect_params(params);
    if (has_skip_conv_) {
        skip_.collect_params(params);
    }
}

Seq3 ResidualBlock::forward(const Seq3& x, const Mat& temb) {
    temb_cache_ = temb;
    time_mish_cache_ = temb;
    for (auto& v : time_mish_cache_.v) {
        v = mish_scalar(v);
    }
    const Mat tb = time_lin_.forward(time_mish_cache_);

    Seq3 h = act1_.forward(gn1_.forward(conv1_.forward(x)));
    for (int c = 0; c < out_ch_; ++c) {
        for (int b = 0; b < h.batch; ++b) {
            const double bias = tb.at(b, c);
            double* row = &h.v[(static_cast<std::size_t>(c) * h.batch + b) * h.length];
            for (int t = 0; t < h.length; ++t) {
                row[t] += bias;
            }
        }
    }
    Seq3 y = act2_.forward(gn2_.forward(conv2_.forward(h)));

    if (has_skip_conv_) {
        add_inplace(y, skip_.forward(x));
    } else {
        add_inplace(y, x);
    }
    return y;
}

Seq3 ResidualBlock::backward(const Seq3& dy, Mat& dtemb) {
    Seq3 dh = conv2_.backward(gn2_.backward(act2_.backward(dy)));

    Mat dtb = Mat::zeros(dh.batch, out_ch_);
    for (int c = 0; c < out_ch_; ++c) {
        for (int b = 0; b < dh.batch; ++b) {
            const double* row = &dh.v[(static_cast<std::size_t>(c) * dh.batch + b) * dh.length];
            double s = 0.0;
            for (int t = 0; t < dh.length; ++t) {
                s += row[t];
            }
            dtb.at(b, c) = s;
        }
    }
    Mat dtm = time_lin_.backward(dtb);
    for (std::size_t i = 0; i < dtm.v.size(); ++i) {
        dtemb.v[i] += dtm.v[i] * mish_grad_scalar(temb_cache_.v[i]);
    }

    Seq3 dx = conv1_.backward(gn1_.backward(act1_.backward(dh)));
    if (has_skip_conv_) {
        add_inplace(dx, skip_.backward(dy));
    } else {
        add_inplace(dx, dy);
    }
    return dx;
}

// ---------------------------------------------------------------------------
// Down/Upsample
// ---------------------------------------------------------------------------

Downsample::Downsample(std::string name, int channels, Rng& rng) {
    conv_ = Conv1d(name + ".conv", channels, channels, 3, 2, 1, rng);
}

Upsample::Upsample(std::string name, int channels, Rng& rng) {
    conv_ = Conv1d(name + ".conv", channels, channels, 3, 1, 1, rng);
}

Seq3 Upsample::forward(const Seq3& x) {
    Seq3 rep = Seq3::zeros(x.channels, x.batch, x.length * 2);
    for (int c = 0; c < x.channels; ++c) {
        for (int b = 0; b < x.batch; ++b) {
            const double* src = &x.v[(static_cast<std::size_t>(c) * x.batch + b) * x.length];
            double* dst = &rep.v[(static_cast<std::size_t>(c) * x.batch + b) * rep.length];
            for (int h = 0; h < x.length; ++h) {
                dst[2 * h] = src[h];
                dst[2 * h + 1] = src[h];
            }
        }
    }
    return conv_.forward(rep);
}

Seq3 Upsample::backward(const Seq3& dy) {
    Seq3 drep = conv_.backward(dy);
    Seq3 dx = Seq3::zeros(drep.channels, drep.batch, drep.length / 2);
    for (int c = 0; c < dx.channels; ++c) {
        for (int b = 0; b < dx.batch; ++b) {
            const double* src = &drep.v[(static_cast<std::size_t>(c) * drep.batch + b) * drep.length];
            double* dst = &dx.v[(static_cast<std::size_t>(c) * dx.batch + b) * dx.length];
            for (int h = 0; h < dx.length; ++h) {
                dst[h] = src[2 * h] + src[2 * h + 1];
            }
        }
    }
    return dx;
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

Seq3 concat_channels(const Seq3& a, const Seq3& b) {
    if (a.batch != b.batch || a.length != b.length) {
        throw DataError("concat_channels: shape mismatch");
    }
    Seq3 y = Seq3::zeros(a.channels + b.channels, a.batch, a.length);
    std::memcpy(y.v.data(), a.v.data(), a.v.size() * sizeof(double));
    std::memcpy(y.v.data() + a.v.size(), b.v.data(), b.v.size() * sizeof(double));
    return y;
}

void split_channels(const Seq3& d, int channels_a, Seq3& da, Seq3& db) {
    da = Seq3::zeros(channels_a, d.batch, d.length);
    db = Seq3::zeros(d.channels - channels_a, d.batch, d.length);
    std::memcpy(da.v.data(), d.v.data(), da.v.size() * sizeof(double));
    std::memcpy(db.v.data(), d.v.data() + da.v.size(), db.v.size() * sizeof(double));
}

void add_inplace(Seq3& dst, const Seq3& src) {
    if (dst.v.size() != src.v.size()) {
        throw DataError("add_inplace: shape mismatch");
    }
    for (std::size_t i = 0; i < dst.v.size(); ++i) {
        dst.v[i] += src.v[i];
    }
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

AdamOptimizer::AdamOptimizer(ParamList params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_.resize(params_.size());
    v_.resize(params_.size());
    for (std::size_t i = 0; i < params_.size(); ++i) {
        m_[i].assign(params_[i]->w.size(), 0.0);
        v_[i].assign(params_[i]->w.size(), 0.0);
    }
}

void AdamOptimizer::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        Param& p = *params_[i];
        for (std::size_t j = 0; j < p.w.size(); ++j) {
            const double g = p.g[j];
            m_[i][j] = beta1_ * m_[i][j] + (1.0 - beta1_) * g;
            v_[i][j] = beta2_ * v_[i][j] + (1.0 - beta2_) * g * g;
            const double mhat = m_[i][j] / bc1;
            const double vhat = v_[i][j] / bc2;
            p.w[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

void AdamOptimizer::zero_grad() {
    for (Param* p : params_) {
        p->zero_grad();
    }
}

std::size_t total_param_count(const ParamList& params) {
    std::size_t n = 0;
    for (const Param* p : params) {
        n += p->w.size();
    }
    return n;
}

std::vector<double> flatten_params(const ParamList& params) {
    std::vector<double> flat;
    flat.reserve(total_param_count(params));
    for (const Param* p : params) {
        flat.insert(flat.end(), p->w.begin(), p->w.end());
    }
    return flat;
}

void unflatten_params(const std::vector<double>& flat, ParamList& params) {
    if (flat.size() != total_param_count(params)) {
        throw DataError("parameter blob size mismatch");
    }
    std::size_t off = 0;
    for (Param* p : params) {
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
                  flat.begin() + static_cast<std::ptrdiff_t>(off + p->w.size()), p->w.begin());
        off += p->w.size();
    }
}

}  // namespace playgen
