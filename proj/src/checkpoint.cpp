#include "playgen/checkpoint.hpp"

#include "playgen/container.hpp"

namespace playgen {

namespace {
constexpr int kCheckpointVersion = 1;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    if (ckpt.role != "denoiser" && ckpt.role != "value") {
        throw DataError("checkpoint role must be 'denoiser' or 'value'");
    }
    Container c;
    c.header = {
        {"kind", "checkpoint"},
        {"checkpoint_version", kCheckpointVersion},
        {"layout_version", kLayoutVersion},
        {"role", ckpt.role},
        {"arch", ckpt.arch.to_json()},
        {"schedule", {{"steps", ckpt.schedule.steps},
                      {"kind", schedule_kind_name(ckpt.schedule.kind)}}},
        {"train_seed", ckpt.train_seed},
    };
    ArrayBlob weights{"weights", {static_cast<std::int64_t>(ckpt.weights.size())}, ckpt.weights};
    ArrayBlob stats_min{"stats_min", {static_cast<std::int64_t>(ckpt.stats.min_v.size())},
                        ckpt.stats.min_v};
    ArrayBlob stats_max{"stats_max", {static_cast<std::int64_t>(ckpt.stats.max_v.size())},
                        ckpt.stats.max_v};
    c.arrays.push_back(std::move(weights));
    c.arrays.push_back(std::move(stats_min));
    c.arrays.push_back(std::move(stats_max));
    save_container(path, c);
}

Checkpoint load_checkpoint(const std::string& path) {
    const Container c = load_container(path);
    if (c.header.value("kind", std::string{}) != "checkpoint") {
        throw DataError("not a checkpoint file: " + path);
    }
    if (c.header.at("checkpoint_version").get<int>() != kCheckpointVersion) {
        throw DataError("unsupported checkpoint version in " + path);
    }
    if (c.header.at("layout_version").get<int>() != kLayoutVersion) {
        throw DataError("checkpoint layout version mismatch in " + path);
    }
    Checkpoint ckpt;
    ckpt.role = c.header.at("role").get<std::string>();
    ckpt.arch = UNetConfig::from_json(c.header.at("arch"));
    ckpt.schedule = make_schedule(
        c.header.at("schedule").at("steps").get<int>(),
        schedule_kind_from_name(c.header.at("schedule").at("kind").get<std::string>()));
    ckpt.train_seed = c.header.at("train_seed").get<std::uint64_t>();
    ckpt.weights = c.array("weights").data;
    ckpt.stats.min_v = c.array("stats_min").data;
    ckpt.stats.max_v = c.array("stats_max").data;
    ckpt.stats.validate();
    if (ckpt.arch.diffusion_steps != ckpt.schedule.steps) {
        throw DataError("checkpoint schedule and architecture disagree on step count");
    }
    return ckpt;
}

std::unique_ptr<TemporalUNet> make_denoiser(const Checkpoint& ckpt) {
    if (ckpt.role != "denoiser") {
        throw DataError("checkpoint role is '" + ckpt.role + "', expected 'denoiser'");
    }
    auto net = std::make_unique<TemporalUNet>(ckpt.arch, ckpt.train_seed);
    unflatten_params(ckpt.weights, net->params());
    return net;
}

std::unique_ptr<ValueNet> make_value_net(const Checkpoint& ckpt) {
    if (ckpt.role != "value") {
        throw DataError("checkpoint role is '" + ckpt.role + "', expected 'value'");
    }
    auto net = std::make_unique<ValueNet>(ckpt.arch, ckpt.train_seed);
    unflatten_params(ckpt.weights, net->params());
    return net;
}

Checkpoint snapshot_denoiser(const TemporalUNet& net, const NoiseSchedule& schedule,
                             const NormalizationStats& stats, std::uint64_t train_seed) {
    Checkpoint ckpt;
    ckpt.role = "denoiser";
    ckpt.arch = net.config();
    ckpt.schedule = schedule;
    ckpt.stats = stats;
    ckpt.train_seed = train_seed;
    ckpt.weights = flatten_params(net.params());
    return ckpt;
}

Checkpoint snapshot_value(const ValueNet& net, const NoiseSchedule& schedule,
                          const NormalizationStats& stats, std::uint64_t train_seed) {
    Checkpoint ckpt;
    ckpt.role = "value";
    ckpt.arch = net.config();
    ckpt.schedule = schedule;
    ckpt.stats = stats;
    ckpt.train_seed = train_seed;
    ckpt.weights = flatten_params(net.params());
    return ckpt;
}

void require_compatible(const Checkpoint& denoiser, const Checkpoint& value) {
    if (denoiser.role != "denoiser" || value.role != "value") {
        throw DataError("plan requires one denoiser and one value checkpoint");
    }
    if (denoiser.arch.horizon != value.arch.horizon) {
        throw DataError("checkpoint horizon mismatch");
    }
    if (denoiser.arch.in_channels != value.arch.in_channels) {
        throw DataError("checkpoint channel mismatch");
    }
    if (!(denoiser.schedule == value.schedule)) {
        throw DataError("checkpoint schedule mismatch");
    }
    if (!(denoiser.stats == value.stats)) {
        throw DataError("checkpoint normalization stats mismatch");
    }
}

}  // namespace playgen
