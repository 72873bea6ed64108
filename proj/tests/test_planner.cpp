#include <doctest.h>

#include <cmath>

#include "playgen/planner.hpp"
#include "test_helpers.hpp"

using namespace playgen;
using playgen::testing::tiny_arch;

namespace {

std::array<double, kStateDim> center_state() {
    std::array<double, kStateDim> s{};
    for (int obj = 0; obj < kObjects; ++obj) {
        s[static_cast<std::size_t>(state_column(obj, 0))] = 47.0 + obj;
        s[static_cast<std::size_t>(state_column(obj, 1))] = 20.0 + obj;
        s[static_cast<std::size_t>(state_column(obj, 2))] = obj == 0 ? 5.0 : 0.0;
    }
    return s;
}

}  // namespace

TEST_SUITE("planner") {

TEST_CASE("perturbed mean arithmetic is exact") {
    // mu = 0, sigma = 0.04, unit gradient, alpha = 0.1 -> entries of 0.004.
    const std::vector<double> mu(8, 0.0);
    const std::vector<double> g(8, 1.0);
    const auto out = perturbed_mean(mu, 0.04, g, 0.1);
    for (double v : out) {
        CHECK(v == 0.1 * 0.04 * 1.0);
    }

    Rng rng(61);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> m(5), gr(5);
        for (int i = 0; i < 5; ++i) {
            m[static_cast<std::size_t>(i)] = rng.normal();
            gr[static_cast<std::size_t>(i)] = rng.normal();
        }
        const double sigma = rng.uniform(0.0, 2.0);
        const double alpha = rng.uniform(0.0, 10.0);
        const auto p = perturbed_mean(m, sigma, gr, alpha);
        for (int i = 0; i < 5; ++i) {
            CHECK(p[static_cast<std::size_t>(i)] ==
                  m[static_cast<std::size_t>(i)] + alpha * sigma * gr[static_cast<std::size_t>(i)]);
        }
    }
}

TEST_CASE("gradient clipping caps the L2 norm and reports when it fires") {
    std::vector<double> g = {3.0, 4.0};  // norm 5
    CHECK(clip_gradient(g, 10.0) == false);
    CHECK(g[0] == 3.0);
    CHECK(clip_gradient(g, 1.0) == true);
    CHECK(std::hypot(g[0], g[1]) == doctest::Approx(1.0));
}

TEST_CASE("condition_initial_state is an idempotent row-0 overwrite") {
    Rng rng(62);
    TrajectoryTensor tau = TrajectoryTensor::zeros(8);
    tau.normalized = true;
    for (auto& v : tau.values) {
        v = rng.uniform(-1.0, 1.0);
    }
    std::array<double, kStateDim> s{};
    for (auto& v : s) {
        v = rng.uniform(-1.0, 1.0);
    }

    const TrajectoryTensor once = condition_initial_state(tau, s);
    const TrajectoryTensor twice = condition_initial_state(once, s);
    CHECK(once.values == twice.values);  // idempotent
    for (int d = 0; d < kStateDim; ++d) {
        CHECK(once.at(0, d) == s[static_cast<std::size_t>(d)]);
    }
    // Action columns of row 0 and all later rows are untouched.
    for (int d = kStateDim; d < kFeatureDim; ++d) {
        CHECK(once.at(0, d) == tau.at(0, d));
    }
    for (int r = 1; r < 8; ++r) {
        for (int d = 0; d < kFeatureDim; ++d) {
            CHECK(once.at(r, d) == tau.at(r, d));
        }
    }

    // Fixed point: conditioning on the existing row 0 changes nothing.
    std::array<double, kStateDim> same{};
    for (int d = 0; d < kStateDim; ++d) {
        same[static_cast<std::size_t>(d)] = tau.at(0, d);
    }
    CHECK(condition_initial_state(tau, same).values == tau.values);
}

TEST_CASE("alpha=0 plans are element-identical to the unguided sampler") {
    const auto& m = playgen::testing::tiny_trained_models();

    PlanConfig cfg;
    cfg.alpha = 0.0;
    cfg.batch = 2;
    cfg.seed = 404;
    cfg.initial_state = center_state();

    const PlanResult guided = plan(*m.denoiser, *m.value, m.schedule, m.dataset.stats, cfg);
    const PlanResult reference =
        plan_unguided(*m.denoiser, *m.value, m.schedule, m.dataset.stats, cfg);
    REQUIRE(guided.trajectories.size() == reference.trajectories.size());
    for (std::size_t b = 0; b < guided.trajectories.size(); ++b) {
        for (std::size_t k = 0; k < guided.trajectories[b].values.size(); ++k) {
            CHECK(guided.normalized_trajectories[b].values[k] ==
                  reference.normalized_trajectories[b].values[k]);
        }
        CHECK(guided.predicted_returns[b] == reference.predicted_returns[b]);
    }
}

TEST_CASE("a constant value net leaves the guided chain identical to unguided") {
    const auto& m = playgen::testing::tiny_trained_models();
    ValueNet zero_value(m.arch, 999);  // zero head: constant output, zero gradient

    PlanConfig cfg;
    cfg.alpha = 1.0;
    cfg.batch = 1;
    cfg.seed = 17;
    cfg.initial_state = center_state();

    const PlanResult guided = plan(*m.denoiser, zero_value, m.schedule, m.dataset.stats, cfg);
    const PlanResult reference =
        plan_unguided(*m.denoiser, zero_value, m.schedule, m.dataset.stats, cfg);
    CHECK(guided.normalized_trajectories[0].values ==
          reference.normalized_trajectories[0].values);
}

TEST_CASE("plans are reproducible per seed and distinct across batch elements") {
    const auto& m = playgen::testing::tiny_trained_models();

    PlanConfig cfg;
    cfg.alpha = 0.3;
    cfg.batch = 2;
    cfg.seed = 7;
    cfg.initial_state = center_state();

    const PlanResult a = plan(*m.denoiser, *m.value, m.schedule, m.dataset.stats, cfg);
    const PlanResult b = plan(*m.denoiser, *m.value, m.schedule, m.dataset.stats, cfg);
    CHECK(a.normalized_trajectories[0].values == b.normalized_trajectories[0].values);
    CHECK(a.normalized_trajectories[1].values == b.normalized_trajectories[1].values);
    CHECK(a.predicted_returns == b.predicted_returns);
    CHECK(a.normalized_trajectories[0].values != a.normalized_trajectories[1].values);
}

TEST_CASE("row 0 of every planned batch element equals the conditioned state bit-exactly") {
    const auto& m = playgen::testing::tiny_trained_models();

    PlanConfig cfg;
    cfg.batch = 3;
    cfg.seed = 29;
    cfg.initial_state = center_state();

    for (double alpha : {0.0, 0.1, 1.0}) {
        cfg.alpha = alpha;
        const PlanResult result = plan(*m.denoiser, *m.value, m.schedule, m.dataset.stats, cfg);
        // Recompute the normalized conditioning vector the same way plan does.
        for (const auto& traj : result.normalized_trajectories) {
            for (int d = 0; d < kStateDim; ++d) {
                double expected;
                if (m.dataset.stats.is_constant(d)) {
                    expected = 0.0;
                } else {
                    const double span = m.dataset.stats.max_v[static_cast<std::size_t>(d)] -
                                        m.dataset.stats.min_v[static_cast<std::size_t>(d)];
                    expected = 2.0 *
                                   (cfg.initial_state[static_cast<std::size_t>(d)] -
                                    m.dataset.stats.min_v[static_cast<std::size_t>(d)]) /
                                   span -
                               1.0;
                }
                CHECK(traj.at(0, d) == expected);
            }
        }
    }
}

TEST_CASE("guided_step rejects bad steps and non-normalized input") {
    const auto& m = playgen::testing::tiny_trained_models();
    Rng rng(63);
    TrajectoryTensor tau = TrajectoryTensor::zeros(m.arch.horizon);
    tau.normalized = true;
    for (auto& v : tau.values) {
        v = rng.normal();
    }
    CHECK_THROWS_AS(
        guided_step(*m.denoiser, *m.value, m.schedule, tau, -1, 0.1, 100.0, rng, nullptr),
        DataError);
    tau.normalized = false;
    CHECK_THROWS_AS(
        guided_step(*m.denoiser, *m.value, m.schedule, tau, 1, 0.1, 100.0, rng, nullptr),
        DataError);
}

TEST_CASE("receding horizon executes one action per step and re-plans from env feedback") {
    const auto& m = playgen::testing::tiny_trained_models();

    PlanConfig cfg;
    cfg.alpha = 0.2;
    cfg.seed = 55;
    cfg.initial_state = center_state();

    int env_calls = 0;
    const EnvStep identity = [&](const std::array<double, kStateDim>& state,
                                 const std::array<double, kActionDim>&) {
        ++env_calls;
        return state;
    };
    const auto one = receding_horizon(*m.denoiser, *m.value, m.schedule, m.dataset.stats, cfg,
                                      identity, 1);
    CHECK(one.size() == 1);
    CHECK(env_calls == 1);

    env_calls = 0;
    const auto several = receding_horizon(*m.denoiser, *m.value, m.schedule, m.dataset.stats, cfg,
                                          identity, 4);
    CHECK(several.size() == 4);
    CHECK(env_calls == 4);
    // The identity environment keeps the planned initial state fixed.
    for (const auto& step : several) {
        for (int d = 0; d < kStateDim; ++d) {
            CHECK(step.state[static_cast<std::size_t>(d)] ==
                  doctest::Approx(several[0].state[static_cast<std::size_t>(d)]).epsilon(1e-12));
        }
    }

    const EnvStep failing = [&](const std::array<double, kStateDim>&,
                                const std::array<double, kActionDim>&)
        -> std::array<double, kStateDim> { throw std::runtime_error("sensor offline"); };
    try {
        receding_horizon(*m.denoiser, *m.value, m.schedule, m.dataset.stats, cfg, failing, 3);
        FAIL("expected propagation");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("step 0") != std::string::npos);
        CHECK(msg.find("sensor offline") != std::string::npos);
    }
}

TEST_CASE("integrator dynamics: planned actions outscore a random walk under the value model") {
    auto& m = playgen::testing::tiny_trained_models();

    PlanConfig cfg;
    cfg.alpha = 1.0;
    cfg.seed = 81;
    const TrajectoryTensor init0 = denormalize(m.dataset.examples[0].tensor, m.dataset.stats);
    for (int d = 0; d < kStateDim; ++d) {
        cfg.initial_state[static_cast<std::size_t>(d)] = init0.at(0, d);
    }

    // Synthetic dynamics: integrate the chosen action at 25 fps.
    const EnvStep integrator = [](const std::array<double, kStateDim>& state,
                                  const std::array<double, kActionDim>& action) {
        std::array<double, kStateDim> next{};
        for (int d = 0; d < kStateDim; ++d) {
            next[static_cast<std::size_t>(d)] =
                state[static_cast<std::size_t>(d)] + action[static_cast<std::size_t>(d)] / 25.0;
        }
        return next;
    };
    const int steps = m.arch.horizon;
    const auto executed = receding_horizon(*m.denoiser, *m.value, m.schedule, m.dataset.stats, cfg,
                                           integrator, steps);

    TrajectoryTensor exec_traj = TrajectoryTensor::zeros(m.arch.horizon);
    exec_traj.valid_len = m.arch.horizon;
    for (int t = 0; t < m.arch.horizon; ++t) {
        for (int d = 0; d < kStateDim; ++d) {
            exec_traj.at(t, d) = executed[static_cast<std::size_t>(t)].state[static_cast<std::size_t>(d)];
            exec_traj.at(t, kStateDim + d) =
                executed[static_cast<std::size_t>(t)].action[static_cast<std::size_t>(d)];
        }
    }

    CourtSpec court;
    const Frame init_frame = frame_from_state(cfg.initial_state);
    const TrajectoryTensor walk = random_walk(init_frame, 1, m.arch.horizon, 81, 0.5, court);

    const double planned_score =
        predict_return(*m.value, normalize(exec_traj, m.dataset.stats), 0);
    const double walk_score = predict_return(*m.value, normalize(walk, m.dataset.stats), 0);
    CHECK(planned_score >= walk_score);
}

}
