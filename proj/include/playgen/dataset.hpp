#pragma once

#include <array>
#include <string>
#include <vector>

#include "playgen/core.hpp"
#include "playgen/ingest.hpp"

namespace playgen {

struct TrainingExample {
    TrajectoryTensor tensor;  // normalized
    double return_target = 0.0;
    std::string possession_ref;
};

// Positions of one frame arranged in channel order: ball, offense players
// 1-5 (ascending player_id), defense players 1-5.
std::array<double, kStateDim> frame_state(const Frame& frame, std::int64_t offense_team_id);

// Finite-difference velocities at 25 fps over already-ordered positions.
// v_t = (p_{t+1} - p_t) * 25; the last entry repeats the penultimate one.
// A single frame yields zero velocities (and sets *warned if provided).
std::vector<std::array<double, kActionDim>> compute_actions(
    const std::vector<std::array<double, kStateDim>>& positions, bool* warned = nullptr);

// Fixed-horizon state||action tensor for one possession. Longer possessions
// keep their final H frames; shorter ones repeat the last row as padding.
TrajectoryTensor build_trajectory(const PossessionRecord& possession,
                                  const std::vector<Frame>& frames, int horizon);

// Undiscounted offense-perspective sum over the possession's reward events.
double return_target(const PossessionRecord& possession);

// Per-feature min/max over valid (unpadded) rows of all examples.
NormalizationStats fit_stats(const std::vector<TrajectoryTensor>& tensors);

struct Dataset {
    int horizon = 0;
    NormalizationStats stats;
    std::vector<TrainingExample> examples;
};

// Possessions -> normalized examples with return targets.
Dataset build_dataset(const std::vector<PossessionRecord>& records,
                      const std::vector<Frame>& frames, int horizon);

struct IngestedGame {
    std::string game_id;
    std::vector<PossessionRecord> records;
    std::vector<Frame> frames;
};

Dataset build_dataset_games(const std::vector<IngestedGame>& games, int horizon);

// Pseudo-frame from a channel-ordered state vector (inverse of frame_state);
// handy for rollouts and baselines seeded from dataset rows.
Frame frame_from_state(const std::array<double, kStateDim>& state,
                       std::int64_t offense_team_id = 1, std::int64_t defense_team_id = 2);

void save_dataset(const std::string& dir, const Dataset& ds);
Dataset load_dataset(const std::string& dir);

}  // namespace playgen
