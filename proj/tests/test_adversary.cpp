#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "playgen/adversary.hpp"
#include "test_helpers.hpp"

using namespace playgen;

namespace {

// Independent assignment oracle: recursive enumeration over all bijections,
// tracking only the optimal cost.
double best_assignment_cost(const std::array<Vec2, 5>& def, const std::array<Vec2, 5>& off) {
    std::array<bool, 5> used{};
    double best = std::numeric_limits<double>::infinity();
    std::function<void(int, double)> go = [&](int d, double cost) {
        if (cost >= best) {
            return;
        }
        if (d == 5) {
            best = cost;
            return;
        }
        for (int a = 0; a < 5; ++a) {
            if (!used[a]) {
                used[a] = true;
                go(d + 1, cost + std::hypot(def[d].x - off[a].x, def[d].y - off[a].y));
                used[a] = false;
            }
        }
    };
    go(0, 0.0);
    return best;
}

std::array<Vec2, 5> random_positions(Rng& rng, const CourtSpec& court) {
    std::array<Vec2, 5> p;
    for (auto& v : p) {
        v = {rng.uniform(0.0, court.length_ft), rng.uniform(0.0, court.width_ft)};
    }
    return p;
}

}  // namespace

TEST_SUITE("adversary") {

TEST_CASE("assignment matches the exhaustive oracle and is a permutation") {
    Rng rng(71);
    CourtSpec court;
    for (int trial = 0; trial < 50; ++trial) {
        const auto def = random_positions(rng, court);
        const auto off = random_positions(rng, court);
        const auto assign = assign_defenders(def, off);

        std::array<bool, 5> hit{};
        double cost = 0.0;
        for (int d = 0; d < 5; ++d) {
            CHECK(assign[d] >= 0);
            CHECK(assign[d] < 5);
            CHECK_FALSE(hit[assign[d]]);
            hit[assign[d]] = true;
            cost += std::hypot(def[d].x - off[assign[d]].x, def[d].y - off[assign[d]].y);
        }
        CHECK(cost == doctest::Approx(best_assignment_cost(def, off)).epsilon(1e-12));
    }
}

TEST_CASE("man-to-man: a distant defender moves exactly speed*dt toward its target") {
    CourtSpec court;
    const Vec2 basket{88.75, 25.0};
    std::array<Vec2, 5> def{};
    std::array<Vec2, 5> off{};
    // Spread the other four pairs far away so the assignment is forced.
    for (int i = 1; i < 5; ++i) {
        def[i] = {10.0 + i * 2.0, 45.0};
        off[i] = {10.0 + i * 2.0, 44.0};
    }
    def[0] = {20.0, 5.0};
    off[0] = {80.0, 5.0};
    const double speed = 20.0;
    const double dt = 0.04;
    const auto next = man_to_man_step(def, off, {47.0, 25.0, 4.0}, speed, dt, court, basket);

    const Vec2 target{basket.x + 0.7 * (off[0].x - basket.x), basket.y + 0.7 * (off[0].y - basket.y)};
    const double step = std::hypot(next[0].x - def[0].x, next[0].y - def[0].y);
    CHECK(step == doctest::Approx(speed * dt).epsilon(1e-9));
    const double along = std::hypot(target.x - def[0].x, target.y - def[0].y);
    const double after = std::hypot(target.x - next[0].x, target.y - next[0].y);
    CHECK(after == doctest::Approx(along - speed * dt).epsilon(1e-9));
}

TEST_CASE("man-to-man: a defender already at its target does not move") {
    CourtSpec court;
    const Vec2 basket{88.75, 25.0};
    std::array<Vec2, 5> off{};
    std::array<Vec2, 5> def{};
    for (int i = 0; i < 5; ++i) {
        off[i] = {40.0 + 3.0 * i, 10.0 + 5.0 * i};
        def[i] = {basket.x + 0.7 * (off[i].x - basket.x), basket.y + 0.7 * (off[i].y - basket.y)};
    }
    const auto next = man_to_man_step(def, off, {47.0, 25.0, 4.0}, 20.0, 0.04, court, basket);
    for (int i = 0; i < 5; ++i) {
        CHECK(next[i].x == doctest::Approx(def[i].x).epsilon(1e-12));
        CHECK(next[i].y == doctest::Approx(def[i].y).epsilon(1e-12));
    }
}

TEST_CASE("zone: ball at an anchor makes that anchor the target") {
    CourtSpec court;
    const Vec2 basket{88.75, 25.0};
    const auto anchors = default_zone_anchors(court, basket);
    std::array<Vec2, 5> def{};
    for (int i = 0; i < 5; ++i) {
        def[i] = anchors[i];
    }
    const Vec3 ball{anchors[2].x, anchors[2].y, 4.0};
    const auto next = zone_2_3_step(def, ball, 20.0, 0.04, court, anchors);
    CHECK(next[2].x == doctest::Approx(anchors[2].x));
    CHECK(next[2].y == doctest::Approx(anchors[2].y));
}

TEST_CASE("zone: defenders converge to their targets under a stationary ball") {
    CourtSpec court;
    const Vec2 basket{88.75, 25.0};
    const auto anchors = default_zone_anchors(court, basket);
    const Vec3 ball{60.0, 30.0, 4.0};
    std::array<Vec2, 5> def{};
    for (int i = 0; i < 5; ++i) {
        def[i] = {5.0 + i, 5.0};
    }
    for (int iter = 0; iter < 400; ++iter) {
        def = zone_2_3_step(def, ball, 20.0, 0.04, court, anchors);
    }
    for (int i = 0; i < 5; ++i) {
        const Vec2 target{anchors[i].x + 0.3 * (ball.x - anchors[i].x),
                          anchors[i].y + 0.3 * (ball.y - anchors[i].y)};
        CHECK(std::hypot(def[i].x - target.x, def[i].y - target.y) <= 0.1);
    }
}

TEST_CASE("per-frame displacement never exceeds max_speed/25") {
    Rng rng(72);
    CourtSpec court;
    const Vec2 basket{88.75, 25.0};
    const auto anchors = default_zone_anchors(court, basket);
    const double speed = 26.0;
    const double dt = 1.0 / 25.0;
    std::array<Vec2, 5> man_def = random_positions(rng, court);
    std::array<Vec2, 5> zone_def = man_def;
    for (int iter = 0; iter < 100; ++iter) {
        const auto off = random_positions(rng, court);
        const Vec3 ball{rng.uniform(0.0, 94.0), rng.uniform(0.0, 50.0), 4.0};
        const auto next_man = man_to_man_step(man_def, off, ball, speed, dt, court, basket);
        const auto next_zone = zone_2_3_step(zone_def, ball, speed, dt, court, anchors);
        for (int i = 0; i < 5; ++i) {
            CHECK(std::hypot(next_man[i].x - man_def[i].x, next_man[i].y - man_def[i].y) <=
                  speed * dt + 1e-9);
            CHECK(std::hypot(next_zone[i].x - zone_def[i].x, next_zone[i].y - zone_def[i].y) <=
                  speed * dt + 1e-9);
        }
        man_def = next_man;
        zone_def = next_zone;
    }
}

TEST_CASE("zone anchors sit inside the court on both ends") {
    CourtSpec court;
    for (const auto& basket_pos : court.basket_positions) {
        const auto anchors = default_zone_anchors(court, {basket_pos.x, basket_pos.y});
        for (const auto& a : anchors) {
            CHECK(a.x >= 0.0);
            CHECK(a.x <= court.length_ft);
            CHECK(a.y >= 0.0);
            CHECK(a.y <= court.width_ft);
        }
    }
}

TEST_CASE("adversarial rollout: single segment when m == total_len, exact overwrite semantics") {
    auto& m = playgen::testing::tiny_trained_models();
    CourtSpec court;
    const Vec2 basket{court.basket_positions[1].x, court.basket_positions[1].y};

    AdversarialConfig adv;
    adv.segment_len = 24;
    adv.total_len = 24;
    adv.policy.kind = DefenseKind::man_to_man;
    adv.policy.max_speed_ftps = 26.0;

    PlanConfig pc;
    pc.alpha = 0.5;
    pc.seed = 314;

    const TrajectoryTensor init = denormalize(m.dataset.examples[0].tensor, m.dataset.stats);
    std::array<double, kStateDim> s{};
    for (int d = 0; d < kStateDim; ++d) {
        s[static_cast<std::size_t>(d)] = init.at(0, d);
    }
    const Frame initial = frame_from_state(s);

    const RolloutResult result = adversarial_rollout(*m.denoiser, *m.value, m.schedule,
                                                     m.dataset.stats, court, adv, pc, initial, 1,
                                                     basket);
    CHECK(result.segments == 1);
    CHECK(result.trajectory.horizon == 24);

    // Defensive channels equal the standalone heuristic rollout bit-exactly.
    std::vector<std::array<Vec2, kPlayersPerTeam>> off_seq(24);
    std::vector<Vec3> ball_seq(24);
    for (int r = 0; r < 24; ++r) {
        for (int i = 0; i < kPlayersPerTeam; ++i) {
            off_seq[static_cast<std::size_t>(r)][i] = {
                result.trajectory.at(r, state_column(1 + i, 0)),
                result.trajectory.at(r, state_column(1 + i, 1))};
        }
        ball_seq[static_cast<std::size_t>(r)] = {result.trajectory.at(r, 0),
                                                 result.trajectory.at(r, 1),
                                                 result.trajectory.at(r, 2)};
    }
    std::array<Vec2, kPlayersPerTeam> def0;
    for (int i = 0; i < kPlayersPerTeam; ++i) {
        def0[i] = {result.trajectory.at(0, state_column(1 + kPlayersPerTeam + i, 0)),
                   result.trajectory.at(0, state_column(1 + kPlayersPerTeam + i, 1))};
    }
    const auto standalone = defense_rollout(adv.policy, def0, off_seq, ball_seq, court, basket);
    for (int r = 0; r < 24; ++r) {
        for (int i = 0; i < kPlayersPerTeam; ++i) {
            const int obj = 1 + kPlayersPerTeam + i;
            CHECK(result.trajectory.at(r, state_column(obj, 0)) ==
                  standalone[static_cast<std::size_t>(r)][i].x);
            CHECK(result.trajectory.at(r, state_column(obj, 1)) ==
                  standalone[static_cast<std::size_t>(r)][i].y);
        }
    }

    // Channel purity: the ball and offense channels are exactly what the
    // planner produced for the same seed (segment 0 uses derive_seed(seed, 0)).
    PlanConfig seg_cfg = pc;
    seg_cfg.batch = 1;
    seg_cfg.seed = derive_seed(pc.seed, 0);
    for (int d = 0; d < kStateDim; ++d) {
        seg_cfg.initial_state[static_cast<std::size_t>(d)] = s[static_cast<std::size_t>(d)];
    }
    const PlanResult pure = plan(*m.denoiser, *m.value, m.schedule, m.dataset.stats, seg_cfg);
    for (int r = 0; r < 24; ++r) {
        for (int i = 0; i <= kPlayersPerTeam; ++i) {  // ball + offense objects
            for (int axis = 0; axis < 3; ++axis) {
                CHECK(result.trajectory.at(r, state_column(i, axis)) ==
                      pure.trajectories[0].at(r, state_column(i, axis)));
            }
        }
    }

    // Recomputed defender velocities stay integrable.
    for (int r = 0; r + 1 < 24; ++r) {
        for (int i = 0; i < kPlayersPerTeam; ++i) {
            const int obj = 1 + kPlayersPerTeam + i;
            for (int axis = 0; axis < 2; ++axis) {
                const double integrated =
                    result.trajectory.at(r, state_column(obj, axis)) +
                    result.trajectory.at(r, action_column(obj, axis)) / 25.0;
                CHECK(integrated ==
                      doctest::Approx(result.trajectory.at(r + 1, state_column(obj, axis)))
                          .epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("adversarial rollout stitches multiple segments to total_len") {
    auto& m = playgen::testing::tiny_trained_models();
    CourtSpec court;
    const Vec2 basket{court.basket_positions[1].x, court.basket_positions[1].y};

    AdversarialConfig adv;
    adv.segment_len = 10;
    adv.total_len = 28;
    adv.policy.kind = DefenseKind::zone_2_3;
    adv.policy.max_speed_ftps = 26.0;
    adv.policy.zone_anchors = default_zone_anchors(court, basket);

    PlanConfig pc;
    pc.alpha = 0.2;
    pc.seed = 2718;

    const TrajectoryTensor init = denormalize(m.dataset.examples[1].tensor, m.dataset.stats);
    std::array<double, kStateDim> s{};
    for (int d = 0; d < kStateDim; ++d) {
        s[static_cast<std::size_t>(d)] = init.at(0, d);
    }
    const RolloutResult result =
        adversarial_rollout(*m.denoiser, *m.value, m.schedule, m.dataset.stats, court, adv, pc,
                            frame_from_state(s), 1, basket);
    CHECK(result.trajectory.horizon == 28);
    CHECK(result.segments == 3);  // 10 + 10 + 8
    CHECK(std::isfinite(result.predicted_return));

    AdversarialConfig bad = adv;
    bad.segment_len = 99;
    bad.total_len = 50;
    CHECK_THROWS_AS(adversarial_rollout(*m.denoiser, *m.value, m.schedule, m.dataset.stats, court,
                                        bad, pc, frame_from_state(s), 1, basket),
                    DataError);
}

}
