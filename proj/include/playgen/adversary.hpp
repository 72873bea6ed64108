#pragma once

#include <array>
#include <string>
#include <vector>

#include "playgen/checkpoint.hpp"
#include "playgen/core.hpp"
#include "playgen/planner.hpp"

namespace playgen {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

enum class DefenseKind { man_to_man, zone_2_3 };

const char* defense_kind_name(DefenseKind kind);
DefenseKind defense_kind_from_name(const std::string& name);

struct DefensePolicy {
    DefenseKind kind = DefenseKind::man_to_man;
    double max_speed_ftps = 26.0;
    std::array<Vec2, kPlayersPerTeam> zone_anchors{};  // zone only

    void validate(const CourtSpec& court) const;
};

// Standard 2-3 shape in front of the defended basket: two wings high, three
// across the paint; expressed as court-relative offsets.
std::array<Vec2, kPlayersPerTeam> default_zone_anchors(const CourtSpec& court,
                                                       const Vec2& basket);

// Minimum-total-distance defender-to-attacker assignment (a permutation of
// 0..4, defenders indexing attackers).
std::array<int, kPlayersPerTeam> assign_defenders(
    const std::array<Vec2, kPlayersPerTeam>& def_pos,
    const std::array<Vec2, kPlayersPerTeam>& off_pos);

// Each defender moves toward the point 70% of the way from the basket to its
// assigned attacker, capped at speed * dt.
std::array<Vec2, kPlayersPerTeam> man_to_man_step(
    const std::array<Vec2, kPlayersPerTeam>& def_pos,
    const std::array<Vec2, kPlayersPerTeam>& off_pos, const Vec3& ball, double speed, double dt,
    const CourtSpec& court, const Vec2& basket);

// Each defender moves toward anchor_k + 0.3 * (ball - anchor_k), same cap.
std::array<Vec2, kPlayersPerTeam> zone_2_3_step(
    const std::array<Vec2, kPlayersPerTeam>& def_pos, const Vec3& ball, double speed, double dt,
    const CourtSpec& court, const std::array<Vec2, kPlayersPerTeam>& anchors);

struct AdversarialConfig {
    int segment_len = 25;  // frames planned per iteration
    int total_len = 100;
    DefensePolicy policy;

    void validate() const;
};

// Standalone defensive rollout against a fixed offense/ball sequence.
// out[0] is def0; out[k] steps from out[k-1] reacting to frame k.
std::vector<std::array<Vec2, kPlayersPerTeam>> defense_rollout(
    const DefensePolicy& policy, const std::array<Vec2, kPlayersPerTeam>& def0,
    const std::vector<std::array<Vec2, kPlayersPerTeam>>& off_seq, const std::vector<Vec3>& ball_seq,
    const CourtSpec& court, const Vec2& basket);

struct RolloutResult {
    TrajectoryTensor trajectory;  // denormalized, horizon == total_len
    double predicted_return = 0.0;
    int segments = 0;
};

// Iteratively plans segments, replaces the five defensive channels with the
// heuristic rollout (velocities recomputed by finite difference), and stitches
// the composite trajectory up to total_len.
RolloutResult adversarial_rollout(TemporalUNet& denoiser, ValueNet& value,
                                  const NoiseSchedule& schedule, const NormalizationStats& stats,
                                  const CourtSpec& court, const AdversarialConfig& adv,
                                  const PlanConfig& plan_cfg, const Frame& initial,
                                  std::int64_t offense_team_id, const Vec2& basket);

}  // namespace playgen
