#include "playgen/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "playgen/dataset.hpp"

namespace playgen {

namespace {

constexpr double kFrameDt = 1.0 / 25.0;

Vec2 clamp_to_court(const Vec2& p, const CourtSpec& court) {
    return {std::clamp(p.x, 0.0, court.length_ft), std::clamp(p.y, 0.0, court.width_ft)};
}

Vec2 step_toward(const Vec2& from, const Vec2& target, double max_dist) {
    const double dx = target.x - from.x;
    const double dy = target.y - from.y;
    const double dist = std::hypot(dx, dy);
    if (dist <= max_dist || dist == 0.0) {
        return target;
    }
    const double s = max_dist / dist;
    return {from.x + dx * s, from.y + dy * s};
}

}  // namespace

const char* defense_kind_name(DefenseKind kind) {
    return kind == DefenseKind::man_to_man ? "man_to_man" : "zone_2_3";
}

DefenseKind defense_kind_from_name(const std::string& name) {
    if (name == "man_to_man") {
        return DefenseKind::man_to_man;
    }
    if (name == "zone_2_3") {
        return DefenseKind::zone_2_3;
    }
    throw DataError("unknown defense policy '" + name + "'");
}

void DefensePolicy::validate(const CourtSpec& court) const {
    if (!(max_speed_ftps > 0.0)) {
        throw DataError("defense max speed must be positive");
    }
    if (kind == DefenseKind::zone_2_3) {
        for (const auto& a : zone_anchors) {
            if (a.x < 0.0 || a.x > court.length_ft || a.y < 0.0 || a.y > court.width_ft) {
                throw DataError("zone anchors must lie within the court");
            }
        }
    }
}

std::array<Vec2, kPlayersPerTeam> default_zone_anchors(const CourtSpec& court, const Vec2& basket) {
    // Direction from the defended basket toward midcourt.
    const double sign = basket.x < court.length_ft / 2.0 ? 1.0 : -1.0;
    const double wing_out = 0.16 * court.length_ft;
    const double wing_wide = 0.16 * court.width_ft;
    const double low_out = 0.04 * court.length_ft;
    const double low_wide = 0.20 * court.width_ft;
    const double mid_out = 0.09 * court.length_ft;
    std::array<Vec2, kPlayersPerTeam> anchors = {
        Vec2{basket.x + sign * wing_out, basket.y - wing_wide},
        Vec2{basket.x + sign * wing_out, basket.y + wing_wide},
        Vec2{basket.x + sign * low_out, basket.y - low_wide},
        Vec2{basket.x + sign * mid_out, basket.y},
        Vec2{basket.x + sign * low_out, basket.y + low_wide},
    };
    for (auto& a : anchors) {
        a = clamp_to_court(a, court);
    }
    return anchors;
}

std::array<int, kPlayersPerTeam> assign_defenders(
    const std::array<Vec2, kPlayersPerTeam>& def_pos,
    const std::array<Vec2, kPlayersPerTeam>& off_pos) {
    std::array<int, kPlayersPerTeam> perm;
    std::iota(perm.begin(), perm.end(), 0);
    std::array<int, kPlayersPerTeam> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (int d = 0; d < kPlayersPerTeam; ++d) {
            cost += std::hypot(def_pos[d].x - off_pos[perm[d]].x,
                               def_pos[d].y - off_pos[perm[d]].y);
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

std::array<Vec2, kPlayersPerTeam> man_to_man_step(
    const std::array<Vec2, kPlayersPerTeam>& def_pos,
    const std::array<Vec2, kPlayersPerTeam>& off_pos, const Vec3& /*ball*/, double speed, double dt,
    const CourtSpec& court, const Vec2& basket) {
    std::array<Vec2, kPlayersPerTeam> def;
    std::array<Vec2, kPlayersPerTeam> off;
    for (int i = 0; i < kPlayersPerTeam; ++i) {
        def[i] = clamp_to_court(def_pos[i], court);
        off[i] = clamp_to_court(off_pos[i], court);
    }
    const auto assignment = assign_defenders(def, off);
    const double max_dist = speed * dt;
    std::array<Vec2, kPlayersPerTeam> next;
    for (int d = 0; d < kPlayersPerTeam; ++d) {
        const Vec2& attacker = off[assignment[d]];
        const Vec2 target{basket.x + 0.7 * (attacker.x - basket.x),
                          basket.y + 0.7 * (attacker.y - basket.y)};
        next[d] = clamp_to_court(step_toward(def[d], target, max_dist), court);
    }
    return next;
}

std::array<Vec2, kPlayersPerTeam> zone_2_3_step(
    const std::array<Vec2, kPlayersPerTeam>& def_pos, const Vec3& ball, double speed, double dt,
    const CourtSpec& court, const std::array<Vec2, kPlayersPerTeam>& anchors) {
    const double max_dist = speed * dt;
    std::array<Vec2, kPlayersPerTeam> next;
    for (int d = 0; d < kPlayersPerTeam; ++d) {
        const Vec2 from = clamp_to_court(def_pos[d], court);
        const Vec2 target{anchors[d].x + 0.3 * (ball.x - anchors[d].x),
                          anchors[d].y + 0.3 * (ball.y - anchors[d].y)};
        next[d] = clamp_to_court(step_toward(from, target, max_dist), court);
    }
    return next;
}

void AdversarialConfig::validate() const {
    if (segment_len < 1 || total_len < 1 || segment_len > total_len) {
        throw DataError("adversarial config requires 1 <= segment_len <= total_len");
    }
}

std::vector<std::array<Vec2, kPlayersPerTeam>> defense_rollout(
    const DefensePolicy& policy, const std::array<Vec2, kPlayersPerTeam>& def0,
    const std::vector<std::array<Vec2, kPlayersPerTeam>>& off_seq, const std::vector<Vec3>& ball_seq,
    const CourtSpec& court, const Vec2& basket) {
    if (off_seq.size() != ball_seq.size() || off_seq.empty()) {
        throw DataError("defense_rollout: offense and ball sequences must align");
    }
    std::vector<std::array<Vec2, kPlayersPerTeam>> out(off_seq.size());
    out[0] = def0;
    for (std::size_t k = 1; k < off_seq.size(); ++k) {
        if (policy.kind == DefenseKind::man_to_man) {
            out[k] = man_to_man_step(out[k - 1], off_seq[k], ball_seq[k], policy.max_speed_ftps,
                                     kFrameDt, court, basket);
        } else {
            out[k] = zone_2_3_step(out[k - 1], ball_seq[k], policy.max_speed_ftps, kFrameDt, court,
                                   policy.zone_anchors);
        }
    }
    return out;
}

namespace {

std::array<Vec2, kPlayersPerTeam> defense_of_row(const TrajectoryTensor& traj, int row) {
    std::array<Vec2, kPlayersPerTeam> d;
    for (int i = 0; i < kPlayersPerTeam; ++i) {
        const int obj = 1 + kPlayersPerTeam + i;
        d[i] = {traj.at(row, state_column(obj, 0)), traj.at(row, state_column(obj, 1))};
    }
    return d;
}

std::array<Vec2, kPlayersPerTeam> offense_of_row(const TrajectoryTensor& traj, int row) {
    std::array<Vec2, kPlayersPerTeam> o;
    for (int i = 0; i < kPlayersPerTeam; ++i) {
        const int obj = 1 + i;
        o[i] = {traj.at(row, state_column(obj, 0)), traj.at(row, state_column(obj, 1))};
    }
    return o;
}

}  // namespace

RolloutResult adversarial_rollout(TemporalUNet& denoiser, ValueNet& value,
                                  const NoiseSchedule& schedule, const NormalizationStats& stats,
                                  const CourtSpec& court, const AdversarialConfig& adv,
                                  const PlanConfig& plan_cfg, const Frame& initial,
                                  std::int64_t offense_team_id, const Vec2& basket) {
    adv.validate();
    adv.policy.validate(court);
    const int horizon = denoiser.config().horizon;
    if (adv.segment_len > horizon) {
        throw DataError("adversarial segment length exceeds the checkpoint horizon");
    }

    const auto initial_state = frame_state(initial, offense_team_id);

    TrajectoryTensor composite = TrajectoryTensor::zeros(adv.total_len);
    composite.valid_len = adv.total_len;
    int filled = 0;
    int segments = 0;
    std::array<double, kStateDim> current{};
    std::copy(initial_state.begin(), initial_state.end(), current.begin());

    PlanConfig cfg = plan_cfg;
    cfg.batch = 1;
    const std::uint64_t base_seed = plan_cfg.seed;

    while (filled < adv.total_len) {
        cfg.seed = derive_seed(base_seed, static_cast<std::uint64_t>(segments));
        cfg.initial_state = current;
        const PlanResult planned = plan(denoiser, value, schedule, stats, cfg);
        const TrajectoryTensor& seg = planned.trajectories.front();

        // The planned row 0 re-states the conditioning point; continuation
        // segments start appending from row 1.
        const int from = filled == 0 ? 0 : 1;
        const int want = adv.total_len - filled;
        const int take = std::min(want, adv.segment_len);
        int copied = 0;
        for (int r = from; copied < take && r < seg.horizon; ++r, ++copied) {
            for (int d = 0; d < kFeatureDim; ++d) {
                composite.at(filled + copied, d) = seg.at(r, d);
            }
        }
        if (copied == 0) {
            throw DataError("adversarial rollout made no progress");
        }
        filled += copied;
        ++segments;

        // Replace the defensive channels of everything filled so far with the
        // heuristic rollout, then refresh the continuation state.
        std::vector<std::array<Vec2, kPlayersPerTeam>> off_seq(static_cast<std::size_t>(filled));
        std::vector<Vec3> ball_seq(static_cast<std::size_t>(filled));
        for (int r = 0; r < filled; ++r) {
            off_seq[static_cast<std::size_t>(r)] = offense_of_row(composite, r);
            ball_seq[static_cast<std::size_t>(r)] = {composite.at(r, 0), composite.at(r, 1),
                                                     composite.at(r, 2)};
        }
        const auto def0 = defense_of_row(composite, 0);
        const auto def_seq = defense_rollout(adv.policy, def0, off_seq, ball_seq, court, basket);
        for (int r = 0; r < filled; ++r) {
            for (int i = 0; i < kPlayersPerTeam; ++i) {
                const int obj = 1 + kPlayersPerTeam + i;
                composite.at(r, state_column(obj, 0)) = def_seq[static_cast<std::size_t>(r)][i].x;
                composite.at(r, state_column(obj, 1)) = def_seq[static_cast<std::size_t>(r)][i].y;
            }
        }
        for (int d = 0; d < kStateDim; ++d) {
            current[d] = composite.at(filled - 1, d);
        }
    }

    // Defender velocities recomputed so the tensor stays integrable.
    for (int i = 0; i < kPlayersPerTeam; ++i) {
        const int obj = 1 + kPlayersPerTeam + i;
        for (int axis = 0; axis < 3; ++axis) {
            const int sc = state_column(obj, axis);
            const int ac = action_column(obj, axis);
            for (int r = 0; r + 1 < adv.total_len; ++r) {
                composite.at(r, ac) = (composite.at(r + 1, sc) - composite.at(r, sc)) * 25.0;
            }
            composite.at(adv.total_len - 1, ac) =
                adv.total_len > 1 ? composite.at(adv.total_len - 2, ac) : 0.0;
        }
    }

    // Value estimate on the composite, padded (or truncated) to the model H.
    TrajectoryTensor for_value = TrajectoryTensor::zeros(horizon);
    const int keep = std::min(adv.total_len, horizon);
    const int offset = adv.total_len - keep;
    for_value.valid_len = keep;
    for (int r = 0; r < keep; ++r) {
        for (int d = 0; d < kFeatureDim; ++d) {
            for_value.at(r, d) = composite.at(offset + r, d);
        }
    }
    for (int r = keep; r < horizon; ++r) {
        for (int d = 0; d < kFeatureDim; ++d) {
            for_value.at(r, d) = for_value.at(keep - 1, d);
        }
    }

    RolloutResult result;
    result.trajectory = composite;
    result.segments = segments;
    result.predicted_return = predict_return(value, normalize(for_value, stats), 0);
    return result;
}

}  // namespace playgen
