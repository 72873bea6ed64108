#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "playgen/adversary.hpp"
#include "playgen/core.hpp"
#include "playgen/dataset.hpp"
#include "playgen/ingest.hpp"
#include "playgen/planner.hpp"

namespace playgen {

enum class OffenseScript { drive, perimeter_pass, mixed };

const char* offense_script_name(OffenseScript s);
OffenseScript offense_script_from_name(const std::string& name);

// Desk-scale stand-in for a season of tracking data: scripted possessions
// whose trajectories visibly reflect their sampled outcomes.
struct SyntheticSpec {
    std::uint64_t seed = 0;
    int n_possessions = 100;
    int frames_min = 96;
    int frames_max = 128;
    OffenseScript script = OffenseScript::mixed;
    double score_prob_at_rim = 0.85;
    CourtSpec court;
    std::string game_id;  // default: synth-<seed>

    void validate() const;
};

struct SyntheticResult {
    MotionData motion;
    PbpData pbp;
    // possession_ref -> ground-truth offense return, in possession order.
    std::vector<std::pair<std::string, double>> sidecar;
};

SyntheticResult generate_synthetic(const SyntheticSpec& spec);

// Writes <prefix>.motion.json, <prefix>.pbp.csv, <prefix>.sidecar.csv.
void write_synthetic(const std::string& prefix, const SyntheticResult& result);
std::vector<std::pair<std::string, double>> read_sidecar(const std::string& path);

// Naive baseline: independent Gaussian position increments per object,
// clamped to the court, velocities by finite difference.
TrajectoryTensor random_walk(const Frame& initial, std::int64_t offense_team_id, int horizon,
                             std::uint64_t seed, double step_std_ft, const CourtSpec& court);

struct EvalReport {
    std::vector<double> returns;  // one aggregate return per run
    std::vector<double> oob_per_run;
    double avg = 0.0;
    double max = 0.0;
    int n_runs = 0;
    double out_of_bounds_rate = 0.0;
    std::string config_fingerprint;
};

// AVG/MAX arithmetic over per-run returns.
EvalReport report_from_returns(std::vector<double> returns);

// Value-model scoring of trajectory groups (one group per run) at step 0,
// plus the out-of-bounds diagnostic rate over raw position entries.
EvalReport evaluate(const std::vector<std::vector<TrajectoryTensor>>& runs, ValueNet& value,
                    const NormalizationStats& stats, const CourtSpec& court,
                    const std::string& config_fingerprint);

struct SweepConfig {
    std::vector<double> alphas;
    int runs = 5;
    int batch = 8;
    std::uint64_t seed = 0;
    double grad_clip = 100.0;

    void validate() const;
};

struct SweepResult {
    std::vector<double> alphas;
    std::vector<EvalReport> reports;  // one per alpha, identical seeds across alphas
};

// Table-style alpha study: per alpha, `runs` seeded plans conditioned on
// dataset initial states shared across alphas.
SweepResult run_alpha_sweep(TemporalUNet& denoiser, ValueNet& value, const NoiseSchedule& schedule,
                            const NormalizationStats& stats, const CourtSpec& court,
                            const Dataset& init_source, const SweepConfig& config);

void write_eval_csv(const std::string& path, const SweepResult& sweep);
void write_eval_summary(const std::string& path, const SweepResult& sweep,
                        const nlohmann::json& config_echo);

}  // namespace playgen
