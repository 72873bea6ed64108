#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "test_helpers.hpp"

using namespace playgen;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE("evalkit") {

TEST_CASE("one drive possession with certain scoring emits exactly one 2 pointer made") {
    SyntheticSpec spec;
    spec.seed = 5;
    spec.n_possessions = 1;
    spec.frames_min = 40;
    spec.frames_max = 48;
    spec.script = OffenseScript::drive;
    spec.score_prob_at_rim = 1.0;
    const SyntheticResult result = generate_synthetic(spec);

    int scoring = 0;
    int other_reward = 0;
    for (const auto& ev : result.pbp.events) {
        if (ev.event_type == EventType::two_pointer_made) {
            ++scoring;
        } else if (is_reward_bearing(ev.event_type)) {
            ++other_reward;
        }
    }
    CHECK(scoring == 1);
    CHECK(other_reward == 0);
    REQUIRE(result.sidecar.size() == 1);
    CHECK(result.sidecar[0].second == 2.0);
}

TEST_CASE("generated files round-trip through the parsers losslessly") {
    SyntheticSpec spec;
    spec.seed = 9;
    spec.n_possessions = 12;
    spec.frames_min = 40;
    spec.frames_max = 56;
    const SyntheticResult gen = generate_synthetic(spec);

    const std::string dir = "/tmp/playgen_test_evalkit";
    std::filesystem::create_directories(dir);
    write_synthetic(dir + "/game", gen);

    const MotionData motion = parse_motion_file(dir + "/game.motion.json");
    const PbpData pbp = parse_pbp_file(dir + "/game.pbp.csv");
    CHECK(motion.skipped_moments == 0);
    CHECK(motion.game_id == gen.motion.game_id);
    CHECK(pbp.events.size() == gen.pbp.events.size());

    const auto orig_frames = gen.motion.all_frames();
    const auto back_frames = motion.all_frames();
    REQUIRE(orig_frames.size() == back_frames.size());
    for (std::size_t i = 0; i < orig_frames.size(); i += 37) {
        CHECK(back_frames[i].game_clock_s == orig_frames[i].game_clock_s);
        CHECK(back_frames[i].ball.x == orig_frames[i].ball.x);
        CHECK(back_frames[i].players[7].y == orig_frames[i].players[7].y);
    }
    for (std::size_t i = 0; i < pbp.events.size(); ++i) {
        CHECK(pbp.events[i].event_type == gen.pbp.events[i].event_type);
        CHECK(pbp.events[i].game_clock_s == gen.pbp.events[i].game_clock_s);
    }

    const auto sidecar = read_sidecar(dir + "/game.sidecar.csv");
    REQUIRE(sidecar.size() == gen.sidecar.size());
    for (std::size_t i = 0; i < sidecar.size(); ++i) {
        CHECK(sidecar[i].first == gen.sidecar[i].first);
        CHECK(sidecar[i].second == gen.sidecar[i].second);
    }
}

TEST_CASE("segmentation of a generated game matches the sidecar returns") {
    SyntheticSpec spec;
    spec.seed = 33;
    spec.n_possessions = 30;
    spec.frames_min = 40;
    spec.frames_max = 56;
    const SyntheticResult gen = generate_synthetic(spec);
    const auto frames = gen.motion.all_frames();
    const auto records = segment_possessions(gen.motion.game_id, frames, gen.pbp.events);
    REQUIRE(records.size() == gen.sidecar.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(return_target(records[i]) == doctest::Approx(gen.sidecar[i].second));
    }
}

TEST_CASE("identical specs produce byte-identical files") {
    SyntheticSpec spec;
    spec.seed = 77;
    spec.n_possessions = 6;
    spec.frames_min = 40;
    spec.frames_max = 48;
    const std::string dir = "/tmp/playgen_test_evalkit";
    std::filesystem::create_directories(dir);
    write_synthetic(dir + "/det_a", generate_synthetic(spec));
    write_synthetic(dir + "/det_b", generate_synthetic(spec));
    CHECK(slurp(dir + "/det_a.motion.json") == slurp(dir + "/det_b.motion.json"));
    CHECK(slurp(dir + "/det_a.pbp.csv") == slurp(dir + "/det_b.pbp.csv"));
    CHECK(slurp(dir + "/det_a.sidecar.csv") == slurp(dir + "/det_b.sidecar.csv"));
}

TEST_CASE("empirical scoring rate over 1000 drive possessions is within 3 sigma") {
    SyntheticSpec spec;
    spec.seed = 101;
    spec.n_possessions = 1000;
    spec.frames_min = 24;
    spec.frames_max = 32;
    spec.script = OffenseScript::drive;
    spec.score_prob_at_rim = 0.8;
    const SyntheticResult gen = generate_synthetic(spec);
    int scored = 0;
    for (const auto& [ref, ret] : gen.sidecar) {
        if (ret == 2.0) {
            ++scored;
        }
    }
    const double rate = scored / 1000.0;
    const double sigma = std::sqrt(0.8 * 0.2 / 1000.0);
    CHECK(std::fabs(rate - 0.8) <= 3.0 * sigma);
}

TEST_CASE("random walk: zero step keeps the trajectory stationary") {
    CourtSpec court;
    std::array<double, kStateDim> s{};
    for (int obj = 0; obj < kObjects; ++obj) {
        s[static_cast<std::size_t>(state_column(obj, 0))] = 40.0 + obj;
        s[static_cast<std::size_t>(state_column(obj, 1))] = 20.0;
    }
    const Frame f = frame_from_state(s);
    const TrajectoryTensor walk = random_walk(f, 1, 32, 5, 0.0, court);
    for (int t = 0; t < 32; ++t) {
        for (int d = 0; d < kStateDim; ++d) {
            CHECK(walk.at(t, d) == walk.at(0, d));
        }
        for (int d = kStateDim; d < kFeatureDim; ++d) {
            CHECK(walk.at(t, d) == 0.0);
        }
    }
}

TEST_CASE("random walk stays in bounds for 10000 steps and is seed-deterministic") {
    CourtSpec court;
    std::array<double, kStateDim> s{};
    for (int obj = 0; obj < kObjects; ++obj) {
        s[static_cast<std::size_t>(state_column(obj, 0))] = 47.0;
        s[static_cast<std::size_t>(state_column(obj, 1))] = 25.0;
    }
    const Frame f = frame_from_state(s);
    const TrajectoryTensor walk = random_walk(f, 1, 10000, 9, 1.0, court);
    for (int t = 0; t < walk.horizon; ++t) {
        for (int obj = 0; obj < kObjects; ++obj) {
            const double x = walk.at(t, state_column(obj, 0));
            const double y = walk.at(t, state_column(obj, 1));
            const double z = walk.at(t, state_column(obj, 2));
            CHECK(x >= 0.0);
            CHECK(x <= court.length_ft);
            CHECK(y >= 0.0);
            CHECK(y <= court.width_ft);
            CHECK(z >= 0.0);
            CHECK(z <= court.max_height_ft);
        }
    }
    const TrajectoryTensor again = random_walk(f, 1, 10000, 9, 1.0, court);
    CHECK(walk.values == again.values);
}

TEST_CASE("report arithmetic: AVG is the mean, MAX the maximum") {
    const EvalReport r = report_from_returns({1.0, 2.0, 3.0});
    CHECK(r.avg == 2.0);
    CHECK(r.max == 3.0);
    CHECK(r.n_runs == 3);

    const EvalReport single = report_from_returns({0.7});
    CHECK(single.avg == single.max);

    Rng rng(55);
    std::vector<double> returns;
    for (int i = 0; i < 17; ++i) {
        returns.push_back(rng.normal());
    }
    const EvalReport rep = report_from_returns(returns);
    double mean = 0.0;
    double mx = returns[0];
    for (double v : returns) {
        mean += v;
        mx = std::max(mx, v);
    }
    CHECK(rep.avg == doctest::Approx(mean / 17.0).epsilon(1e-15));
    CHECK(rep.max == mx);
}

TEST_CASE("evaluate scores trajectory groups and flags out-of-bounds entries") {
    auto& m = playgen::testing::tiny_trained_models();
    CourtSpec court;

    const TrajectoryTensor gt = denormalize(m.dataset.examples[0].tensor, m.dataset.stats);
    TrajectoryTensor oob = gt;
    for (int t = 0; t < oob.horizon; ++t) {
        oob.at(t, state_column(0, 0)) = -25.0;  // ball far out of bounds
    }
    const EvalReport rep = evaluate({{gt}, {oob}}, *m.value, m.dataset.stats, court, "fp");
    CHECK(rep.n_runs == 2);
    CHECK(rep.oob_per_run[0] == 0.0);
    CHECK(rep.oob_per_run[1] > 0.0);
    CHECK(rep.config_fingerprint == "fp");

    TrajectoryTensor wrong_h = TrajectoryTensor::zeros(m.arch.horizon * 2);
    CHECK_THROWS_AS(evaluate({{wrong_h}}, *m.value, m.dataset.stats, court, "fp"), DataError);
}

TEST_CASE("alpha sweep shares seeds across alphas; a zero value net makes all reports equal") {
    auto& m = playgen::testing::tiny_trained_models();
    ValueNet zero_value(m.arch, 4242);  // constant output, zero gradient
    CourtSpec court;

    SweepConfig cfg;
    cfg.alphas = {0.0, 0.01, 0.1, 1.0, 10.0};
    cfg.runs = 2;
    cfg.batch = 2;
    cfg.seed = 99;

    const SweepResult sweep = run_alpha_sweep(*m.denoiser, zero_value, m.schedule, m.dataset.stats,
                                              court, m.dataset, cfg);
    REQUIRE(sweep.reports.size() == 5);
    for (std::size_t a = 1; a < sweep.reports.size(); ++a) {
        CHECK(sweep.reports[a].returns == sweep.reports[0].returns);
        CHECK(sweep.reports[a].oob_per_run == sweep.reports[0].oob_per_run);
    }

    SweepConfig one;
    one.alphas = {0.0};
    one.runs = 2;
    one.batch = 2;
    one.seed = 99;
    const SweepResult solo = run_alpha_sweep(*m.denoiser, zero_value, m.schedule, m.dataset.stats,
                                             court, m.dataset, one);
    REQUIRE(solo.reports.size() == 1);
    CHECK(solo.reports[0].returns == sweep.reports[0].returns);
}

TEST_CASE("sweep CSV and summary files carry one row per run") {
    auto& m = playgen::testing::tiny_trained_models();
    CourtSpec court;
    SweepConfig cfg;
    cfg.alphas = {0.0, 1.0};
    cfg.runs = 2;
    cfg.batch = 1;
    cfg.seed = 7;
    const SweepResult sweep = run_alpha_sweep(*m.denoiser, *m.value, m.schedule, m.dataset.stats,
                                              court, m.dataset, cfg);
    const std::string dir = "/tmp/playgen_test_evalkit";
    std::filesystem::create_directories(dir);
    write_eval_csv(dir + "/sweep.csv", sweep);
    write_eval_summary(dir + "/sweep.summary.json", sweep, {{"note", "test"}});

    std::ifstream in(dir + "/sweep.csv");
    std::string line;
    int rows = 0;
    std::getline(in, line);
    CHECK(line == "alpha,run,return,oob_rate");
    while (std::getline(in, line)) {
        ++rows;
    }
    CHECK(rows == 4);

    std::ifstream sm(dir + "/sweep.summary.json");
    nlohmann::json doc;
    sm >> doc;
    CHECK(doc.at("reports").size() == 2);
    CHECK(doc.at("config").at("note") == "test");
}

}
