#include <doctest.h>

#include <cmath>

#include "playgen/rng.hpp"
#include "playgen/schedule.hpp"

using namespace playgen;

namespace {

// Independent recomputation of the cosine schedule straight from the
// squared-cosine definition, kept free of the production code path.
std::vector<double> cosine_alpha_bar_oracle(int steps) {
    const double s = 0.008;
    auto f = [&](double t) {
        const double x = (t + s) / (1.0 + s) * M_PI / 2.0;
        return std::cos(x) * std::cos(x);
    };
    std::vector<double> abar(steps);
    double prev = 1.0;
    for (int i = 0; i < steps; ++i) {
        double a = f(static_cast<double>(i + 1) / steps) / f(0.0) /
                   (i == 0 ? 1.0 : f(static_cast<double>(i) / steps) / f(0.0));
        a = std::max(a, 0.001);
        prev *= a;
        abar[i] = prev;
    }
    return abar;
}

TrajectoryTensor random_normalized(int horizon, Rng& rng) {
    TrajectoryTensor t = TrajectoryTensor::zeros(horizon);
    t.normalized = true;
    for (auto& v : t.values) {
        v = rng.uniform(-1.0, 1.0);
    }
    return t;
}

}  // namespace

TEST_SUITE("schedule") {

TEST_CASE("degenerate one-step schedule ends below 0.05") {
    for (auto kind : {ScheduleKind::cosine, ScheduleKind::linear}) {
        const NoiseSchedule s = make_schedule(1, kind);
        CHECK(s.alpha_bar.size() == 1);
        CHECK(s.alpha_bar[0] <= 0.05);
    }
}

TEST_CASE("N=20 cosine: strictly decreasing, 20 entries, near-1 head") {
    const NoiseSchedule s = make_schedule(20, ScheduleKind::cosine);
    CHECK(s.alpha_bar.size() == 20);
    CHECK(s.alpha_bar[0] >= 0.99);
    CHECK(s.alpha_bar[19] <= 0.05);
    for (int i = 1; i < 20; ++i) {
        CHECK(s.alpha_bar[i] < s.alpha_bar[i - 1]);
    }
    for (int i = 0; i < 20; ++i) {
        CHECK(s.alpha[i] > 0.0);
        CHECK(s.alpha[i] <= 1.0);
        CHECK(s.posterior_var[i] >= 0.0);
    }
}

TEST_CASE("cosine schedule matches the closed-form oracle") {
    for (int steps : {5, 20, 100}) {
        const NoiseSchedule s = make_schedule(steps, ScheduleKind::cosine);
        const auto oracle = cosine_alpha_bar_oracle(steps);
        for (int i = 0; i < steps; ++i) {
            CHECK(s.alpha_bar[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("linear schedule obeys the same invariants") {
    const NoiseSchedule s = make_schedule(20, ScheduleKind::linear);
    CHECK(s.alpha_bar[0] >= 0.99);
    CHECK(s.alpha_bar[19] <= 0.05);
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("make_schedule is deterministic and rejects N < 1") {
    const NoiseSchedule a = make_schedule(20, ScheduleKind::cosine);
    const NoiseSchedule b = make_schedule(20, ScheduleKind::cosine);
    CHECK(a == b);
    CHECK_THROWS_AS(make_schedule(0, ScheduleKind::cosine), DataError);
}

TEST_CASE("q_sample with zero noise scales by sqrt(alpha_bar)") {
    Rng rng(3);
    const NoiseSchedule s = make_schedule(20, ScheduleKind::cosine);
    const TrajectoryTensor tau0 = random_normalized(4, rng);
    const std::vector<double> eps(tau0.values.size(), 0.0);
    const int step = 7;
    const TrajectoryTensor out = q_sample(tau0, s, step, eps);
    const double scale = std::sqrt(s.alpha_bar[step]);
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        CHECK(out.values[k] == tau0.values[k] * scale);
    }
}

TEST_CASE("q_sample with alpha_bar == 1 is the identity") {
    NoiseSchedule s;
    s.steps = 1;
    s.kind = ScheduleKind::cosine;
    s.alpha = {1.0};
    s.alpha_bar = {1.0};
    s.posterior_var = {0.0};
    Rng rng(5);
    const TrajectoryTensor tau0 = random_normalized(2, rng);
    std::vector<double> eps(tau0.values.size());
    for (auto& e : eps) {
        e = rng.normal();
    }
    const TrajectoryTensor out = q_sample(tau0, s, 0, eps);
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        CHECK(out.values[k] == tau0.values[k]);
    }
}

TEST_CASE("q_sample rejects out-of-range steps and shape mismatches") {
    Rng rng(1);
    const NoiseSchedule s = make_schedule(4, ScheduleKind::cosine);
    const TrajectoryTensor tau0 = random_normalized(2, rng);
    const std::vector<double> eps(tau0.values.size(), 0.0);
    CHECK_THROWS_AS(q_sample(tau0, s, -1, eps), DataError);
    CHECK_THROWS_AS(q_sample(tau0, s, 4, eps), DataError);
    const std::vector<double> bad(tau0.values.size() - 1, 0.0);
    CHECK_THROWS_AS(q_sample(tau0, s, 0, bad), DataError);
}

TEST_CASE("q_sample Monte-Carlo mean matches sqrt(alpha_bar) * tau0") {
    Rng rng(11);
    const NoiseSchedule s = make_schedule(20, ScheduleKind::cosine);
    const int step = 10;
    TrajectoryTensor tau0 = random_normalized(1, rng);
    const int draws = 10000;
    std::vector<double> mean(tau0.values.size(), 0.0);
    std::vector<double> sq(tau0.values.size(), 0.0);
    std::vector<double> eps(tau0.values.size());
    for (int d = 0; d < draws; ++d) {
        for (auto& e : eps) {
            e = rng.normal();
        }
        const TrajectoryTensor out = q_sample(tau0, s, step, eps);
        for (std::size_t k = 0; k < out.values.size(); ++k) {
            const double centered = out.values[k] - std::sqrt(s.alpha_bar[step]) * tau0.values[k];
            mean[k] += out.values[k];
            sq[k] += centered * centered;
        }
    }
    const double sigma = std::sqrt(1.0 - s.alpha_bar[step]);
    const double bound = 4.0 * sigma / std::sqrt(static_cast<double>(draws));
    for (std::size_t k = 0; k < mean.size(); ++k) {
        mean[k] /= draws;
        CHECK(std::fabs(mean[k] - std::sqrt(s.alpha_bar[step]) * tau0.values[k]) <= bound);
        // Marginal variance within 5% of (1 - alpha_bar).
        const double var = sq[k] / draws;
        CHECK(var == doctest::Approx(1.0 - s.alpha_bar[step]).epsilon(0.05));
    }
}

TEST_CASE("posterior mean reduces to tau / sqrt(alpha) when eps_hat is zero") {
    const NoiseSchedule s = make_schedule(20, ScheduleKind::cosine);
    const int step = 5;
    const std::vector<double> tau = {0.3, -0.7, 1.1};
    const std::vector<double> eps_hat(3, 0.0);
    const auto mean = posterior_mean(s, tau, eps_hat, step);
    for (std::size_t k = 0; k < tau.size(); ++k) {
        CHECK(mean[k] == doctest::Approx(tau[k] / std::sqrt(s.alpha[step])).epsilon(1e-15));
    }
}

TEST_CASE("posterior mean with alpha == 1 is the identity") {
    NoiseSchedule s;
    s.steps = 1;
    s.alpha = {1.0};
    s.alpha_bar = {0.5};
    s.posterior_var = {0.0};
    const std::vector<double> tau = {0.25, -0.5};
    const std::vector<double> eps_hat = {3.0, -2.0};
    const auto mean = posterior_mean(s, tau, eps_hat, 0);
    CHECK(mean[0] == tau[0]);
    CHECK(mean[1] == tau[1]);
}

TEST_CASE("posterior mean matches the q-posterior algebraic route") {
    // Independent route: reconstruct x0_hat, then apply the q(tau_{i-1} |
    // tau_i, x0) posterior coefficients.
    Rng rng(17);
    const NoiseSchedule s = make_schedule(20, ScheduleKind::cosine);
    for (int trial = 0; trial < 50; ++trial) {
        const int step = static_cast<int>(rng.below(20));
        const double tau = rng.uniform(-2.0, 2.0);
        const double eps_hat = rng.uniform(-2.0, 2.0);

        const double abar = s.alpha_bar[step];
        const double abar_prev = step == 0 ? 1.0 : s.alpha_bar[step - 1];
        const double alpha = s.alpha[step];
        const double beta = 1.0 - alpha;
        const double x0_hat = (tau - std::sqrt(1.0 - abar) * eps_hat) / std::sqrt(abar);
        const double oracle = std::sqrt(abar_prev) * beta / (1.0 - abar) * x0_hat +
                              std::sqrt(alpha) * (1.0 - abar_prev) / (1.0 - abar) * tau;

        const auto mean = posterior_mean(s, {tau}, {eps_hat}, step);
        CHECK(std::fabs(mean[0] - oracle) <= 1e-12 * std::max(1.0, std::fabs(oracle)));
    }
}

TEST_CASE("posterior variance is the standard q-posterior variance") {
    const NoiseSchedule s = make_schedule(20, ScheduleKind::cosine);
    CHECK(s.posterior_var[0] == 0.0);  // no noise at the final reverse step
    for (int i = 1; i < 20; ++i) {
        const double beta = 1.0 - s.alpha[i];
        const double oracle = beta * (1.0 - s.alpha_bar[i - 1]) / (1.0 - s.alpha_bar[i]);
        CHECK(s.posterior_var[i] == doctest::Approx(oracle).epsilon(1e-14));
    }
}

}
