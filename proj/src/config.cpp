#include "playgen/config.hpp"

#include <fstream>

#include "playgen/core.hpp"
#include "playgen/schedule.hpp"

namespace playgen {

namespace {

void reject_unknown(const nlohmann::json& obj, const std::string& section,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw UsageError("unknown config key '" + (section.empty() ? key : section + "." + key) +
                             "'");
        }
    }
}

template <typename T>
void maybe(const nlohmann::json& obj, const char* key, T& out) {
    if (obj.contains(key)) {
        out = obj.at(key).get<T>();
    }
}

}  // namespace

void RunConfig::apply_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw UsageError("config document must be a JSON object");
    }
    reject_unknown(doc, "", {"data", "model", "train", "plan", "adversary", "eval"});

    if (doc.contains("data")) {
        const auto& j = doc.at("data");
        reject_unknown(j, "data", {"motion", "pbp", "ingest_dir", "dataset_dir", "out_dir"});
        maybe(j, "motion", data.motion);
        maybe(j, "pbp", data.pbp);
        maybe(j, "ingest_dir", data.ingest_dir);
        maybe(j, "dataset_dir", data.dataset_dir);
        maybe(j, "out_dir", data.out_dir);
    }
    if (doc.contains("model")) {
        const auto& j = doc.at("model");
        reject_unknown(j, "model",
                       {"horizon", "diffusion_steps", "base_width", "level_mults", "kernel",
                        "groups", "time_dim", "schedule"});
        maybe(j, "horizon", model.horizon);
        maybe(j, "diffusion_steps", model.diffusion_steps);
        maybe(j, "base_width", model.base_width);
        maybe(j, "level_mults", model.level_mults);
        maybe(j, "kernel", model.kernel);
        maybe(j, "groups", model.groups);
        maybe(j, "time_dim", model.time_dim);
        maybe(j, "schedule", model.schedule);
        schedule_kind_from_name(model.schedule);  // validate the name
    }
    if (doc.contains("train")) {
        const auto& j = doc.at("train");
        reject_unknown(j, "train", {"lr", "batch", "steps", "seed", "snapshot_every"});
        maybe(j, "lr", train.lr);
        maybe(j, "batch", train.batch);
        maybe(j, "steps", train.steps);
        maybe(j, "seed", train.seed);
        maybe(j, "snapshot_every", train.snapshot_every);
    }
    if (doc.contains("plan")) {
        const auto& j = doc.at("plan");
        reject_unknown(j, "plan", {"alpha", "batch", "seed", "grad_clip"});
        maybe(j, "alpha", plan.alpha);
        maybe(j, "batch", plan.batch);
        maybe(j, "seed", plan.seed);
        maybe(j, "grad_clip", plan.grad_clip);
    }
    if (doc.contains("adversary")) {
        const auto& j = doc.at("adversary");
        reject_unknown(j, "adversary", {"policy", "m", "total_len", "max_speed_ftps"});
        maybe(j, "policy", adversary.policy);
        maybe(j, "m", adversary.m);
        maybe(j, "total_len", adversary.total_len);
        maybe(j, "max_speed_ftps", adversary.max_speed_ftps);
    }
    if (doc.contains("eval")) {
        const auto& j = doc.at("eval");
        reject_unknown(j, "eval", {"runs", "alphas", "batch", "step_std_ft", "seed"});
        maybe(j, "runs", eval.runs);
        maybe(j, "alphas", eval.alphas);
        maybe(j, "batch", eval.batch);
        maybe(j, "step_std_ft", eval.step_std_ft);
        maybe(j, "seed", eval.seed);
    }
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open config file: " + path);
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("config parse error in " + path + ": " + e.what());
    }
    RunConfig cfg;
    cfg.apply_json(doc);
    return cfg;
}

nlohmann::json RunConfig::to_json() const {
    return {
        {"data",
         {{"motion", data.motion},
          {"pbp", data.pbp},
          {"ingest_dir", data.ingest_dir},
          {"dataset_dir", data.dataset_dir},
          {"out_dir", data.out_dir}}},
        {"model",
         {{"horizon", model.horizon},
          {"diffusion_steps", model.diffusion_steps},
          {"base_width", model.base_width},
          {"level_mults", model.level_mults},
          {"kernel", model.kernel},
          {"groups", model.groups},
          {"time_dim", model.time_dim},
          {"schedule", model.schedule}}},
        {"train",
         {{"lr", train.lr},
          {"batch", train.batch},
          {"steps", train.steps},
          {"seed", train.seed},
          {"snapshot_every", train.snapshot_every}}},
        {"plan",
         {{"alpha", plan.alpha},
          {"batch", plan.batch},
          {"seed", plan.seed},
          {"grad_clip", plan.grad_clip}}},
        {"adversary",
         {{"policy", adversary.policy},
          {"m", adversary.m},
          {"total_len", adversary.total_len},
          {"max_speed_ftps", adversary.max_speed_ftps}}},
        {"eval",
         {{"runs", eval.runs},
          {"alphas", eval.alphas},
          {"batch", eval.batch},
          {"step_std_ft", eval.step_std_ft},
          {"seed", eval.seed}}},
    };
}

std::string RunConfig::fingerprint() const {
    const std::string text = to_json().dump();
    return fingerprint_hex(fnv1a64(text.data(), text.size()));
}

UNetConfig RunConfig::model_config(int horizon) const {
    UNetConfig c;
    c.in_channels = kFeatureDim;
    c.base_width = model.base_width;
    c.level_mults = model.level_mults;
    c.kernel = model.kernel;
    c.groups = model.groups;
    c.time_dim = model.time_dim;
    c.diffusion_steps = model.diffusion_steps;
    c.horizon = horizon;
    c.validate();
    return c;
}

}  // namespace playgen
