#include "playgen/train.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "playgen/rng.hpp"

namespace playgen {

namespace {

void check_hyper(const TrainHyper& hp, const Dataset& ds) {
    if (ds.examples.empty()) {
        throw DataError("training requires a nonempty dataset");
    }
    if (hp.steps < 1 || hp.batch < 1 || !(hp.lr > 0.0)) {
        throw DataError("training hyperparameters must be positive");
    }
}

// Gathers a minibatch into (C, B, H) and keeps which example fed each slot.
Seq3 gather_batch(const Dataset& ds, const std::vector<int>& picks) {
    std::vector<const TrajectoryTensor*> batch;
    batch.reserve(picks.size());
    for (int idx : picks) {
        batch.push_back(&ds.examples[static_cast<std::size_t>(idx)].tensor);
    }
    return trajectories_to_seq(batch);
}

}  // namespace

TrainResult train_diffusion(TemporalUNet& net, const Dataset& ds, const NoiseSchedule& schedule,
                            const TrainHyper& hp) {
    check_hyper(hp, ds);
    if (ds.horizon != net.config().horizon) {
        throw DataError("dataset horizon does not match the network");
    }
    if (schedule.steps != net.config().diffusion_steps) {
        throw DataError("schedule step count does not match the network");
    }

    Rng pick_rng(derive_seed(hp.seed, 0));
    Rng noise_rng(derive_seed(hp.seed, 1));
    AdamOptimizer opt(net.params(), hp.lr);

    TrainResult result;
    result.loss_curve.reserve(static_cast<std::size_t>(hp.steps));
    std::vector<double> snapshot = flatten_params(net.params());

    const int n = static_cast<int>(ds.examples.size());
    for (int step = 0; step < hp.steps; ++step) {
        std::vector<int> picks(static_cast<std::size_t>(hp.batch));
        std::vector<int> dsteps(static_cast<std::size_t>(hp.batch));
        for (int b = 0; b < hp.batch; ++b) {
            picks[static_cast<std::size_t>(b)] = static_cast<int>(pick_rng.below(n));
            dsteps[static_cast<std::size_t>(b)] =
                static_cast<int>(noise_rng.below(static_cast<std::uint64_t>(schedule.steps)));
        }

        Seq3 x = gather_batch(ds, picks);
        Seq3 eps = Seq3::zeros(x.channels, x.batch, x.length);
        for (auto& v : eps.v) {
            v = noise_rng.normal();
        }
        for (int b = 0; b < x.batch; ++b) {
            const double abar = schedule.alpha_bar[dsteps[static_cast<std::size_t>(b)]];
            const double signal = std::sqrt(abar);
            const double noise = std::sqrt(1.0 - abar);
            for (int c = 0; c < x.channels; ++c) {
                double* xr = &x.v[(static_cast<std::size_t>(c) * x.batch + b) * x.length];
                const double* er = &eps.v[(static_cast<std::size_t>(c) * x.batch + b) * x.length];
                for (int h = 0; h < x.length; ++h) {
                    xr[h] = signal * xr[h] + noise * er[h];
                }
            }
        }

        opt.zero_grad();
        Seq3 pred = net.forward(x, dsteps);
        const double numel = static_cast<double>(pred.v.size());
        double loss = 0.0;
        Seq3 dy = pred;
        for (std::size_t i = 0; i < pred.v.size(); ++i) {
            const double diff = pred.v[i] - eps.v[i];
            loss += diff * diff;
            dy.v[i] = 2.0 * diff / numel;
        }
        loss /= numel;

        if (!std::isfinite(loss)) {
            unflatten_params(snapshot, net.params());
            result.aborted = true;
            result.abort_step = step;
            return result;
        }
        result.loss_curve.push_back(loss);

        net.backward(dy);
        opt.step();
        if ((step + 1) % hp.snapshot_every == 0) {
            snapshot = flatten_params(net.params());
        }
    }
    return result;
}

TrainResult train_value(ValueNet& net, const Dataset& ds, const NoiseSchedule& schedule,
                        const TrainHyper& hp) {
    check_hyper(hp, ds);
    if (ds.horizon != net.config().horizon) {
        throw DataError("dataset horizon does not match the network");
    }
    if (schedule.steps != net.config().diffusion_steps) {
        throw DataError("schedule step count does not match the network");
    }

    Rng pick_rng(derive_seed(hp.seed, 0));
    Rng noise_rng(derive_seed(hp.seed, 1));
    AdamOptimizer opt(net.params(), hp.lr);

    TrainResult result;
    result.loss_curve.reserve(static_cast<std::size_t>(hp.steps));
    std::vector<double> snapshot = flatten_params(net.params());

    const int n = static_cast<int>(ds.examples.size());
    for (int step = 0; step < hp.steps; ++step) {
        std::vector<int> picks(static_cast<std::size_t>(hp.batch));
        std::vector<int> dsteps(static_cast<std::size_t>(hp.batch));
        for (int b = 0; b < hp.batch; ++b) {
            picks[static_cast<std::size_t>(b)] = static_cast<int>(pick_rng.below(n));
            dsteps[static_cast<std::size_t>(b)] =
                static_cast<int>(noise_rng.below(static_cast<std::uint64_t>(schedule.steps)));
        }

        Seq3 x = gather_batch(ds, picks);
        for (int b = 0; b < x.batch; ++b) {
            const double abar = schedule.alpha_bar[dsteps[static_cast<std::size_t>(b)]];
            const double signal = std::sqrt(abar);
            const double noise = std::sqrt(1.0 - abar);
            for (int c = 0; c < x.channels; ++c) {
                double* xr = &x.v[(static_cast<std::size_t>(c) * x.batch + b) * x.length];
                for (int h = 0; h < x.length; ++h) {
                    xr[h] = signal * xr[h] + noise * noise_rng.normal();
                }
            }
        }

        opt.zero_grad();
        const std::vector<double> pred = net.forward(x, dsteps);
        double loss = 0.0;
        std::vector<double> dscalar(pred.size());
        for (std::size_t b = 0; b < pred.size(); ++b) {
            const double target = ds.examples[static_cast<std::size_t>(picks[b])].return_target;
            const double diff = pred[b] - target;
            loss += diff * diff;
            dscalar[b] = 2.0 * diff / static_cast<double>(pred.size());
        }
        loss /= static_cast<double>(pred.size());

        if (!std::isfinite(loss)) {
            unflatten_params(snapshot, net.params());
            result.aborted = true;
            result.abort_step = step;
            return result;
        }
        result.loss_curve.push_back(loss);

        net.backward(dscalar);
        opt.step();
        if ((step + 1) % hp.snapshot_every == 0) {
            snapshot = flatten_params(net.params());
        }
    }
    return result;
}

void write_loss_curve(const std::string& path, const std::vector<double>& curve) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError("cannot write loss curve: " + path);
    }
    out << "step,loss\n";
    char buf[64];
    for (std::size_t i = 0; i < curve.size(); ++i) {
        auto res = std::to_chars(buf, buf + sizeof(buf), curve[i]);
        out << i << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
    }
}

}  // namespace playgen
