#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "playgen/unet.hpp"

namespace playgen {

// Resolved experiment configuration. Every field has a default; unknown keys
// in a config document are rejected; the full document is echoed into every
// output artifact.
struct RunConfig {
    struct DataSection {
        std::string motion;
        std::string pbp;
        std::string ingest_dir;
        std::string dataset_dir;
        std::string out_dir;
    } data;

    struct ModelSection {
        int horizon = 1024;
        int diffusion_steps = 20;
        int base_width = 32;
        std::vector<int> level_mults = {1, 2, 4};
        int kernel = 5;
        int groups = 8;
        int time_dim = 32;
        std::string schedule = "cosine";
    } model;

    struct TrainSection {
        double lr = 2e-5;
        int batch = 512;
        int steps = 245000;
        std::uint64_t seed = 0;
        int snapshot_every = 100;
    } train;

    struct PlanSection {
        double alpha = 0.1;
        int batch = 1;
        std::uint64_t seed = 0;
        double grad_clip = 100.0;
    } plan;

    struct AdversarySection {
        std::string policy = "man_to_man";
        int m = 25;
        int total_len = 100;
        double max_speed_ftps = 26.0;
    } adversary;

    struct EvalSection {
        int runs = 5;
        std::vector<double> alphas = {0.0, 0.01, 0.1, 1.0, 10.0};
        int batch = 8;
        double step_std_ft = 0.5;
        std::uint64_t seed = 0;
    } eval;

    // Applies a partial document over the current values; throws UsageError
    // naming any unknown key.
    void apply_json(const nlohmann::json& doc);
    static RunConfig from_file(const std::string& path);

    nlohmann::json to_json() const;
    std::string fingerprint() const;

    // The architecture implied by the model section at a given horizon.
    UNetConfig model_config(int horizon) const;
};

}  // namespace playgen
