#include "playgen/evalkit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "playgen/rng.hpp"
#include "playgen/value_net.hpp"

namespace playgen {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::int64_t kTeamA = 10;
constexpr std::int64_t kTeamB = 20;
constexpr double kDefenseSpeedFtps = 18.0;

double smoothstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

struct Outcome {
    EventType terminal;
    std::int64_t terminal_team = 0;
    int points = 0;
    int free_throws = 0;  // by the opposing team, after a foul
    double offense_return = 0.0;
};

}  // namespace

const char* offense_script_name(OffenseScript s) {
    switch (s) {
        case OffenseScript::drive: return "drive";
        case OffenseScript::perimeter_pass: return "perimeter_pass";
        default: return "mixed";
    }
}

OffenseScript offense_script_from_name(const std::string& name) {
    if (name == "drive") {
        return OffenseScript::drive;
    }
    if (name == "perimeter_pass") {
        return OffenseScript::perimeter_pass;
    }
    if (name == "mixed") {
        return OffenseScript::mixed;
    }
    throw DataError("unknown offense script '" + name + "'");
}

void SyntheticSpec::validate() const {
    if (n_possessions < 1) {
        throw DataError("synthetic spec needs n_possessions >= 1");
    }
    if (frames_min < 8 || frames_max < frames_min) {
        throw DataError("synthetic spec needs 8 <= frames_min <= frames_max");
    }
    if (score_prob_at_rim < 0.0 || score_prob_at_rim > 1.0) {
        throw DataError("score_prob_at_rim must lie in [0, 1]");
    }
    court.validate();
}

SyntheticResult generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(derive_seed(spec.seed, 0xabcdull));
    const std::string game_id =
        spec.game_id.empty() ? "synth-" + std::to_string(spec.seed) : spec.game_id;
    const CourtSpec& court = spec.court;
    const Vec3 basket = court.basket_positions[1];  // every possession attacks right
    const Vec2 basket_xy{basket.x, basket.y};

    SyntheticResult result;
    result.motion.game_id = game_id;
    result.pbp.game_id = game_id;

    int quarter = 1;
    double clock = 720.0;
    std::int64_t wall = 1450000000000ll;

    auto push_event = [&](EventType type, std::int64_t team, int points) {
        PbpEvent ev;
        ev.quarter = quarter;
        ev.game_clock_s = clock;
        ev.wall_time_ms = wall;
        ev.event_type = type;
        ev.acting_team_id = team;
        ev.points = points;
        result.pbp.events.push_back(ev);
    };

    push_event(EventType::start_of_period, 0, 0);

    for (int poss = 0; poss < spec.n_possessions; ++poss) {
        const int n = spec.frames_min +
                      static_cast<int>(rng.below(static_cast<std::uint64_t>(
                          spec.frames_max - spec.frames_min + 1)));
        const double duration = n / 25.0;
        if (clock < duration + 40.0) {
            push_event(EventType::end_of_period, 0, 0);
            ++quarter;
            clock = 720.0;
            wall += 120000;
            push_event(EventType::start_of_period, 0, 0);
        }

        const std::int64_t offense = poss % 2 == 0 ? kTeamA : kTeamB;
        const std::int64_t defense = offense == kTeamA ? kTeamB : kTeamA;
        OffenseScript script = spec.script;
        if (script == OffenseScript::mixed) {
            script = rng.uniform() < 0.7 ? OffenseScript::drive : OffenseScript::perimeter_pass;
        }

        // Perimeter spots fanned around the attacked basket.
        std::array<Vec2, kPlayersPerTeam> spots;
        for (int i = 0; i < kPlayersPerTeam; ++i) {
            const double angle = (-60.0 + 30.0 * i + rng.uniform(-8.0, 8.0)) * kPi / 180.0;
            const double radius = rng.uniform(21.0, 25.0);
            spots[i] = {basket.x - radius * std::cos(angle), basket.y + radius * std::sin(angle)};
            spots[i].x = std::clamp(spots[i].x, 2.0, court.length_ft - 2.0);
            spots[i].y = std::clamp(spots[i].y, 2.0, court.width_ft - 2.0);
        }
        std::array<Vec2, kPlayersPerTeam> def0;
        for (int i = 0; i < kPlayersPerTeam; ++i) {
            def0[i] = {basket.x + 0.55 * (spots[i].x - basket.x) + rng.uniform(-1.0, 1.0),
                       basket.y + 0.55 * (spots[i].y - basket.y) + rng.uniform(-1.0, 1.0)};
        }
        std::array<double, kPlayersPerTeam> sway_phase;
        std::array<double, kPlayersPerTeam> sway_freq;
        for (int i = 0; i < kPlayersPerTeam; ++i) {
            sway_phase[i] = rng.uniform(0.0, 2.0 * kPi);
            sway_freq[i] = rng.uniform(0.2, 0.45);
        }

        const int handler = static_cast<int>(rng.below(kPlayersPerTeam));
        const Vec2 drive_target{basket.x + rng.uniform(-1.0, 1.0), basket.y + rng.uniform(-1.0, 1.0)};

        // Outcome first; the trajectory is rendered to match it.
        Outcome out;
        const int n_fly = 10;
        bool drive_stalls = false;
        double stall_progress = 1.0;
        if (script == OffenseScript::drive) {
            const double dist = std::hypot(drive_target.x - basket.x, drive_target.y - basket.y);
            const double p = spec.score_prob_at_rim * std::exp(-std::max(0.0, dist - 2.0) / 30.0);
            if (rng.uniform() < p) {
                out = {EventType::two_pointer_made, offense, 2, 0, 2.0};
            } else {
                const double v = rng.uniform();
                if (v < 0.30) {
                    const int ft = 1 + static_cast<int>(rng.below(2));
                    out = {EventType::foul, offense, 0, ft, -0.25 - ft};
                    drive_stalls = true;
                    stall_progress = rng.uniform(0.5, 0.7);
                } else if (v < 0.55) {
                    const std::int64_t team = rng.below(2) == 0 ? offense : defense;
                    out = {EventType::rebound, team, 0, 0, 0.25};
                } else {
                    out = {EventType::turnover, offense, 0, 0, -1.0};
                }
            }
        } else {
            const Vec2& spot = spots[handler];
            const double dist = std::hypot(spot.x - basket.x, spot.y - basket.y);
            const double p = spec.score_prob_at_rim * std::exp(-std::max(0.0, dist - 2.0) / 30.0);
            if (rng.uniform() < p) {
                out = {EventType::three_pointer_made, offense, 3, 0, 3.0};
            } else {
                out = {EventType::turnover, offense, 0, 0, -1.0};
            }
        }

        // Rebound bounce destination and turnover thief, drawn up front so the
        // frame loop stays deterministic.
        const double bounce_angle = rng.uniform(0.0, 2.0 * kPi);
        const double bounce_dist = rng.uniform(4.0, 8.0);

        const int n_hold = std::max(4, n / 4);
        const int n_shot = n - n_fly;  // flight starts here for shooting outcomes
        const bool has_flight = out.terminal == EventType::two_pointer_made ||
                                out.terminal == EventType::three_pointer_made ||
                                out.terminal == EventType::rebound;

        // Defense rollout needs offense first; build offense + ball, then defense.
        std::vector<std::array<Vec2, kPlayersPerTeam>> off_seq(static_cast<std::size_t>(n));
        std::vector<Vec3> ball_seq(static_cast<std::size_t>(n));

        int pass_leg_from = handler;
        int pass_leg_to = handler;
        int pass_leg_start = 0;
        const int pass_leg_len = 18;

        for (int t = 0; t < n; ++t) {
            std::array<Vec2, kPlayersPerTeam> off;
            for (int i = 0; i < kPlayersPerTeam; ++i) {
                const double sway = std::sin(2.0 * kPi * sway_freq[i] * t / 25.0 + sway_phase[i]);
                off[i] = {spots[i].x + 1.2 * sway, spots[i].y + 1.2 * std::cos(
                              2.0 * kPi * sway_freq[i] * t / 25.0 + 2.0 * sway_phase[i])};
            }
            Vec2 ball_xy;
            double ball_z;
            if (script == OffenseScript::drive) {
                double progress = 0.0;
                if (t > n_hold) {
                    progress = smoothstep(static_cast<double>(t - n_hold) /
                                          std::max(1, (has_flight ? n_shot : n - 1) - n_hold));
                }
                if (drive_stalls) {
                    progress = std::min(progress, stall_progress);
                }
                const Vec2 start = spots[handler];
                off[handler] = {start.x + progress * (drive_target.x - start.x),
                                start.y + progress * (drive_target.y - start.y)};
                ball_xy = off[handler];
                ball_z = 2.2 + 1.4 * std::fabs(std::sin(2.0 * kPi * 1.8 * t / 25.0));
            } else {
                // Ball hops around the perimeter between teammates.
                if (t - pass_leg_start >= pass_leg_len) {
                    pass_leg_from = pass_leg_to;
                    pass_leg_to = (pass_leg_to + 1 + t % 3) % kPlayersPerTeam;
                    pass_leg_start = t;
                }
                const double u = std::min(1.0, static_cast<double>(t - pass_leg_start) /
                                                   (pass_leg_len * 0.6));
                const Vec2 a = off[pass_leg_from];
                const Vec2 b = off[pass_leg_to];
                ball_xy = {a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)};
                ball_z = 4.0 + 2.0 * u * (1.0 - u);
                if (t >= n_shot) {
                    off[handler] = spots[handler];
                    ball_xy = off[handler];
                    ball_z = 5.0;
                }
            }

            // Outcome-specific ball flight over the final frames.
            if (t >= n_shot) {
                const double u = static_cast<double>(t - n_shot) / (n_fly - 1);
                const Vec2 from = script == OffenseScript::drive
                                      ? (drive_stalls ? off[handler] : Vec2{off[handler].x,
                                                                            off[handler].y})
                                      : spots[handler];
                switch (out.terminal) {
                    case EventType::two_pointer_made:
                    case EventType::three_pointer_made: {
                        ball_xy = {from.x + u * (basket.x - from.x),
                                   from.y + u * (basket.y - from.y)};
                        const double apex =
                            out.terminal == EventType::three_pointer_made ? 16.0 : 13.0;
                        ball_z = (1.0 - u) * 6.0 + u * basket.z + 4.0 * (apex - 8.0) * u * (1.0 - u);
                        break;
                    }
                    case EventType::rebound: {
                        if (u < 0.6) {
                            const double w = u / 0.6;
                            ball_xy = {from.x + w * (basket.x - from.x),
                                       from.y + w * (basket.y - from.y)};
                            ball_z = (1.0 - w) * 6.0 + w * basket.z + 5.0 * w * (1.0 - w);
                        } else {
                            const double w = (u - 0.6) / 0.4;
                            ball_xy = {basket.x + w * bounce_dist * std::cos(bounce_angle),
                                       basket.y + w * bounce_dist * std::sin(bounce_angle)};
                            ball_z = basket.z - w * 5.0;
                        }
                        break;
                    }
                    case EventType::turnover: {
                        // Picked off: the ball diverts to the nearest defender spot.
                        const Vec2 thief = def0[handler];
                        ball_xy = {from.x + u * (thief.x - from.x), from.y + u * (thief.y - from.y)};
                        ball_z = 4.0 - 1.0 * u;
                        break;
                    }
                    default:
                        ball_xy = off[handler];
                        ball_z = 2.0;
                        break;
                }
            }

            for (auto& p : off) {
                p.x = std::clamp(p.x, 0.0, court.length_ft);
                p.y = std::clamp(p.y, 0.0, court.width_ft);
            }
            ball_xy.x = std::clamp(ball_xy.x, 0.0, court.length_ft);
            ball_xy.y = std::clamp(ball_xy.y, 0.0, court.width_ft);
            ball_z = std::clamp(ball_z, 0.0, court.max_height_ft);

            off_seq[static_cast<std::size_t>(t)] = off;
            ball_seq[static_cast<std::size_t>(t)] = {ball_xy.x, ball_xy.y, ball_z};
        }

        DefensePolicy man;
        man.kind = DefenseKind::man_to_man;
        man.max_speed_ftps = kDefenseSpeedFtps;
        const auto def_seq = defense_rollout(man, def0, off_seq, ball_seq, court, basket_xy);

        // Emit frames.
        MotionEvent ev;
        ev.event_id = std::to_string(poss);
        const double start_clock = clock;
        for (int t = 0; t < n; ++t) {
            Frame f;
            f.quarter = quarter;
            f.wall_time_ms = wall;
            f.game_clock_s = start_clock - t / 25.0;
            f.has_shot_clock = true;
            f.shot_clock_s = std::max(0.0, 24.0 - t / 25.0);
            f.ball = ball_seq[static_cast<std::size_t>(t)];
            for (int i = 0; i < kPlayersPerTeam; ++i) {
                f.players.push_back({offense, offense * 10 + i + 1,
                                     off_seq[static_cast<std::size_t>(t)][i].x,
                                     off_seq[static_cast<std::size_t>(t)][i].y, 0.0});
            }
            for (int i = 0; i < kPlayersPerTeam; ++i) {
                f.players.push_back({defense, defense * 10 + i + 1,
                                     def_seq[static_cast<std::size_t>(t)][i].x,
                                     def_seq[static_cast<std::size_t>(t)][i].y, 0.0});
            }
            ev.frames.push_back(std::move(f));
            wall += 40;
        }
        result.motion.events.push_back(std::move(ev));
        clock = start_clock - (n - 1) / 25.0;

        push_event(out.terminal, out.terminal_team, out.points);
        for (int ft = 0; ft < out.free_throws; ++ft) {
            wall += 1500;
            push_event(EventType::free_throw_made, defense, 1);
        }
        result.sidecar.emplace_back(game_id + "#" + std::to_string(poss), out.offense_return);

        // Dead time between possessions; occasional stoppages.
        wall += 1500;
        clock -= 1.0;
        if (rng.uniform() < 0.05) {
            push_event(EventType::timeout, 0, 0);
            wall += 60000;
        } else if (rng.uniform() < 0.05) {
            push_event(EventType::substitution, 0, 0);
            wall += 15000;
        }
        clock -= 0.5;
    }
    push_event(EventType::end_of_period, 0, 0);
    return result;
}

void write_synthetic(const std::string& prefix, const SyntheticResult& result) {
    write_motion_file(prefix + ".motion.json", result.motion);
    write_pbp_file(prefix + ".pbp.csv", result.pbp);
    std::ofstream side(prefix + ".sidecar.csv", std::ios::trunc);
    if (!side) {
        throw DataError("cannot write sidecar: " + prefix + ".sidecar.csv");
    }
    side << "possession_id,true_return\n";
    char buf[64];
    for (const auto& [ref, ret] : result.sidecar) {
        auto res = std::to_chars(buf, buf + sizeof(buf), ret);
        side << ref << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf))
             << '\n';
    }
}

std::vector<std::pair<std::string, double>> read_sidecar(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open sidecar: " + path);
    }
    std::vector<std::pair<std::string, double>> rows;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto comma = line.rfind(',');
        if (comma == std::string::npos) {
            throw DataError("malformed sidecar row: " + line);
        }
        rows.emplace_back(line.substr(0, comma), std::stod(line.substr(comma + 1)));
    }
    return rows;
}

TrajectoryTensor random_walk(const Frame& initial, std::int64_t offense_team_id, int horizon,
                             std::uint64_t seed, double step_std_ft, const CourtSpec& court) {
    if (horizon < 1) {
        throw DataError("random_walk: horizon must be >= 1");
    }
    if (step_std_ft < 0.0) {
        throw DataError("random_walk: step_std_ft must be nonnegative");
    }
    Rng rng(derive_seed(seed, 0x77a1ull));
    const auto start = frame_state(initial, offense_team_id);

    TrajectoryTensor traj = TrajectoryTensor::zeros(horizon);
    traj.valid_len = horizon;
    std::array<double, kStateDim> pos = start;
    for (int t = 0; t < horizon; ++t) {
        if (t > 0) {
            for (int obj = 0; obj < kObjects; ++obj) {
                pos[state_column(obj, 0)] = std::clamp(
                    pos[state_column(obj, 0)] + step_std_ft * rng.normal(), 0.0, court.length_ft);
                pos[state_column(obj, 1)] = std::clamp(
                    pos[state_column(obj, 1)] + step_std_ft * rng.normal(), 0.0, court.width_ft);
                if (obj == 0) {
                    pos[state_column(obj, 2)] =
                        std::clamp(pos[state_column(obj, 2)] + step_std_ft * rng.normal(), 0.0,
                                   court.max_height_ft);
                }
            }
        }
        for (int d = 0; d < kStateDim; ++d) {
            traj.at(t, d) = pos[d];
        }
    }
    for (int t = 0; t < horizon; ++t) {
        for (int d = 0; d < kStateDim; ++d) {
            const double v = t + 1 < horizon
                                 ? (traj.at(t + 1, d) - traj.at(t, d)) * 25.0
                                 : (horizon > 1 ? traj.at(t - 1, kStateDim + d) : 0.0);
            traj.at(t, kStateDim + d) = v;
        }
    }
    return traj;
}

EvalReport report_from_returns(std::vector<double> returns) {
    if (returns.empty()) {
        throw DataError("a report needs at least one run");
    }
    EvalReport report;
    report.returns = std::move(returns);
    report.n_runs = static_cast<int>(report.returns.size());
    report.avg = 0.0;
    report.max = report.returns.front();
    for (double r : report.returns) {
        report.avg += r;
        report.max = std::max(report.max, r);
    }
    report.avg /= report.n_runs;
    return report;
}

namespace {

double oob_fraction(const std::vector<TrajectoryTensor>& trajs, const CourtSpec& court) {
    std::int64_t outside = 0;
    std::int64_t total = 0;
    for (const auto& t : trajs) {
        for (int r = 0; r < t.valid_len; ++r) {
            for (int obj = 0; obj < kObjects; ++obj) {
                const double x = t.at(r, state_column(obj, 0));
                const double y = t.at(r, state_column(obj, 1));
                const double z = t.at(r, state_column(obj, 2));
                total += 3;
                if (x < 0.0 || x > court.length_ft) {
                    ++outside;
                }
                if (y < 0.0 || y > court.width_ft) {
                    ++outside;
                }
                if (z < 0.0 || z > court.max_height_ft) {
                    ++outside;
                }
            }
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(outside) / static_cast<double>(total);
}

}  // namespace

EvalReport evaluate(const std::vector<std::vector<TrajectoryTensor>>& runs, ValueNet& value,
                    const NormalizationStats& stats, const CourtSpec& court,
                    const std::string& config_fingerprint) {
    if (runs.empty()) {
        throw DataError("evaluate: at least one run required");
    }
    std::vector<double> per_run;
    std::vector<double> oob_runs;
    for (const auto& group : runs) {
        if (group.empty()) {
            throw DataError("evaluate: empty run group");
        }
        double sum = 0.0;
        for (const auto& traj : group) {
            if (traj.horizon != value.config().horizon) {
                throw DataError("evaluate: trajectory horizon incompatible with value checkpoint");
            }
            const TrajectoryTensor normed = traj.normalized ? traj : normalize(traj, stats);
            sum += predict_return(value, normed, 0);
        }
        per_run.push_back(sum / static_cast<double>(group.size()));

        std::vector<TrajectoryTensor> denormed;
        for (const auto& traj : group) {
            denormed.push_back(traj.normalized ? denormalize(traj, stats) : traj);
        }
        oob_runs.push_back(oob_fraction(denormed, court));
    }
    EvalReport report = report_from_returns(per_run);
    report.oob_per_run = oob_runs;
    double oob_avg = 0.0;
    for (double f : oob_runs) {
        oob_avg += f;
    }
    report.out_of_bounds_rate = oob_avg / static_cast<double>(oob_runs.size());
    report.config_fingerprint = config_fingerprint;
    return report;
}

void SweepConfig::validate() const {
    if (alphas.empty()) {
        throw DataError("alpha sweep requires at least one alpha");
    }
    if (runs < 1 || batch < 1) {
        throw DataError("alpha sweep requires runs >= 1 and batch >= 1");
    }
    for (double a : alphas) {
        if (!std::isfinite(a) || a < 0.0) {
            throw DataError("alpha values must be finite and nonnegative");
        }
    }
}

SweepResult run_alpha_sweep(TemporalUNet& denoiser, ValueNet& value, const NoiseSchedule& schedule,
                            const NormalizationStats& stats, const CourtSpec& court,
                            const Dataset& init_source, const SweepConfig& config) {
    config.validate();
    if (init_source.examples.empty()) {
        throw DataError("alpha sweep needs dataset examples for initial states");
    }

    const int n = static_cast<int>(init_source.examples.size());
    SweepResult sweep;
    sweep.alphas = config.alphas;
    for (double alpha : config.alphas) {
        std::vector<std::vector<TrajectoryTensor>> groups;
        for (int r = 0; r < config.runs; ++r) {
            PlanConfig pc;
            pc.alpha = alpha;
            pc.batch = config.batch;
            pc.grad_clip = config.grad_clip;
            pc.seed = derive_seed(config.seed, static_cast<std::uint64_t>(r));

            const TrajectoryTensor init =
                denormalize(init_source.examples[static_cast<std::size_t>(r % n)].tensor,
                            init_source.stats);
            for (int d = 0; d < kStateDim; ++d) {
                pc.initial_state[static_cast<std::size_t>(d)] = init.at(0, d);
            }
            PlanResult planned = plan(denoiser, value, schedule, stats, pc);
            groups.push_back(std::move(planned.trajectories));
        }
        char fp_buf[64];
        std::snprintf(fp_buf, sizeof(fp_buf), "alpha=%.6g;seed=%llu", alpha,
                      static_cast<unsigned long long>(config.seed));
        sweep.reports.push_back(evaluate(groups, value, stats, court,
                                         fingerprint_hex(fnv1a64(fp_buf, std::strlen(fp_buf)))));
    }
    return sweep;
}

namespace {

std::string format_double_csv(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_eval_csv(const std::string& path, const SweepResult& sweep) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError("cannot write eval csv: " + path);
    }
    out << "alpha,run,return,oob_rate\n";
    for (std::size_t a = 0; a < sweep.alphas.size(); ++a) {
        const EvalReport& rep = sweep.reports[a];
        for (int r = 0; r < rep.n_runs; ++r) {
            out << format_double_csv(sweep.alphas[a]) << ',' << r << ','
                << format_double_csv(rep.returns[static_cast<std::size_t>(r)]) << ','
                << format_double_csv(rep.oob_per_run[static_cast<std::size_t>(r)]) << '\n';
        }
    }
}

void write_eval_summary(const std::string& path, const SweepResult& sweep,
                        const nlohmann::json& config_echo) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t a = 0; a < sweep.alphas.size(); ++a) {
        const EvalReport& rep = sweep.reports[a];
        rows.push_back({
            {"alpha", sweep.alphas[a]},
            {"avg", rep.avg},
            {"max", rep.max},
            {"n_runs", rep.n_runs},
            {"out_of_bounds_rate", rep.out_of_bounds_rate},
            {"returns", rep.returns},
            {"fingerprint", rep.config_fingerprint},
        });
    }
    nlohmann::json doc = {{"config", config_echo}, {"reports", rows}};
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError("cannot write eval summary: " + path);
    }
    out << doc.dump(2) << '\n';
}

}  // namespace playgen
