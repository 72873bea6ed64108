#include "playgen/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "playgen/container.hpp"

namespace playgen {

namespace {
constexpr double kFps = 25.0;
}

std::array<double, kStateDim> frame_state(const Frame& frame, std::int64_t offense_team_id) {
    frame.validate();
    std::array<double, kStateDim> s{};
    s[0] = frame.ball.x;
    s[1] = frame.ball.y;
    s[2] = frame.ball.z;

    std::vector<PlayerPos> offense;
    std::vector<PlayerPos> defense;
    for (const auto& p : frame.players) {
        (p.team_id == offense_team_id ? offense : defense).push_back(p);
    }
    if (offense.size() != kPlayersPerTeam || defense.size() != kPlayersPerTeam) {
        throw DataError("offense team id does not match frame teams");
    }
    auto by_player = [](const PlayerPos& a, const PlayerPos& b) { return a.player_id < b.player_id; };
    std::sort(offense.begin(), offense.end(), by_player);
    std::sort(defense.begin(), defense.end(), by_player);

    for (int i = 0; i < kPlayersPerTeam; ++i) {
        const int obj_off = 1 + i;
        s[state_column(obj_off, 0)] = offense[i].x;
        s[state_column(obj_off, 1)] = offense[i].y;
        s[state_column(obj_off, 2)] = offense[i].z;
        const int obj_def = 1 + kPlayersPerTeam + i;
        s[state_column(obj_def, 0)] = defense[i].x;
        s[state_column(obj_def, 1)] = defense[i].y;
        s[state_column(obj_def, 2)] = defense[i].z;
    }
    return s;
}

std::vector<std::array<double, kActionDim>> compute_actions(
    const std::vector<std::array<double, kStateDim>>& positions, bool* warned) {
    if (positions.empty()) {
        throw DataError("compute_actions requires at least one frame");
    }
    std::vector<std::array<double, kActionDim>> actions(positions.size());
    if (positions.size() == 1) {
        actions[0].fill(0.0);
        if (warned) {
            *warned = true;
        }
        return actions;
    }
    if (warned) {
        *warned = false;
    }
    for (std::size_t t = 0; t + 1 < positions.size(); ++t) {
        for (int d = 0; d < kStateDim; ++d) {
            actions[t][d] = (positions[t + 1][d] - positions[t][d]) * kFps;
        }
    }
    actions.back() = actions[actions.size() - 2];
    return actions;
}

TrajectoryTensor build_trajectory(const PossessionRecord& possession,
                                  const std::vector<Frame>& frames, int horizon) {
    if (horizon < 1) {
        throw DataError("build_trajectory: horizon must be >= 1");
    }
    if (possession.start_frame_idx < 0 || possession.end_frame_idx > static_cast<int>(frames.size()) ||
        possession.start_frame_idx >= possession.end_frame_idx) {
        throw DataError("build_trajectory: possession span is empty or out of range");
    }

    int first = possession.start_frame_idx;
    const int last = possession.end_frame_idx;  // exclusive
    const int span = last - first;
    if (span > horizon) {
        first = last - horizon;  // the terminal event defines the reward
    }
    const int valid = last - first;

    std::vector<std::array<double, kStateDim>> positions;
    positions.reserve(valid);
    for (int f = first; f < last; ++f) {
        positions.push_back(frame_state(frames[f], possession.offense_team_id));
    }
    const auto actions = compute_actions(positions);

    TrajectoryTensor traj = TrajectoryTensor::zeros(horizon);
    traj.valid_len = valid;
    for (int t = 0; t < valid; ++t) {
        for (int d = 0; d < kStateDim; ++d) {
            traj.at(t, d) = positions[t][d];
            traj.at(t, kStateDim + d) = actions[t][d];
        }
    }
    for (int t = valid; t < horizon; ++t) {
        for (int d = 0; d < kFeatureDim; ++d) {
            traj.at(t, d) = traj.at(valid - 1, d);
        }
    }
    return traj;
}

double return_target(const PossessionRecord& possession) {
    double total = 0.0;
    for (const auto& ev : possession.attached_events) {
        total += label_reward(ev, possession.offense_team_id);
    }
    return total;
}

NormalizationStats fit_stats(const std::vector<TrajectoryTensor>& tensors) {
    if (tensors.empty()) {
        throw DataError("fit_stats requires at least one example");
    }
    NormalizationStats stats;
    stats.min_v.assign(kFeatureDim, std::numeric_limits<double>::infinity());
    stats.max_v.assign(kFeatureDim, -std::numeric_limits<double>::infinity());
    for (const auto& t : tensors) {
        t.validate();
        if (t.normalized) {
            throw DataError("fit_stats expects raw (non-normalized) tensors");
        }
        for (int r = 0; r < t.valid_len; ++r) {
            for (int f = 0; f < kFeatureDim; ++f) {
                stats.min_v[f] = std::min(stats.min_v[f], t.at(r, f));
                stats.max_v[f] = std::max(stats.max_v[f], t.at(r, f));
            }
        }
    }
    return stats;
}

Dataset build_dataset(const std::vector<PossessionRecord>& records,
                      const std::vector<Frame>& frames, int horizon) {
    if (records.empty()) {
        throw DataError("build_dataset requires at least one possession");
    }
    IngestedGame game;
    game.game_id = records.front().game_id;
    game.records = records;
    game.frames = frames;
    return build_dataset_games({game}, horizon);
}

Dataset build_dataset_games(const std::vector<IngestedGame>& games, int horizon) {
    std::vector<TrajectoryTensor> raw;
    std::vector<double> targets;
    std::vector<std::string> refs;
    for (const auto& game : games) {
        for (std::size_t i = 0; i < game.records.size(); ++i) {
            raw.push_back(build_trajectory(game.records[i], game.frames, horizon));
            targets.push_back(return_target(game.records[i]));
            refs.push_back(game.game_id + "#" + std::to_string(i));
        }
    }
    if (raw.empty()) {
        throw DataError("build_dataset requires at least one possession");
    }

    Dataset ds;
    ds.horizon = horizon;
    ds.stats = fit_stats(raw);
    ds.examples.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        TrainingExample ex;
        ex.tensor = normalize(raw[i], ds.stats);
        ex.return_target = targets[i];
        ex.possession_ref = refs[i];
        ds.examples.push_back(std::move(ex));
    }
    return ds;
}

Frame frame_from_state(const std::array<double, kStateDim>& state, std::int64_t offense_team_id,
                       std::int64_t defense_team_id) {
    Frame f;
    f.ball = {state[0], state[1], state[2]};
    for (int i = 0; i < kPlayersPerTeam; ++i) {
        const int obj = 1 + i;
        f.players.push_back({offense_team_id, offense_team_id * 10 + i + 1,
                             state[static_cast<std::size_t>(state_column(obj, 0))],
                             state[static_cast<std::size_t>(state_column(obj, 1))], 0.0});
    }
    for (int i = 0; i < kPlayersPerTeam; ++i) {
        const int obj = 1 + kPlayersPerTeam + i;
        f.players.push_back({defense_team_id, defense_team_id * 10 + i + 1,
                             state[static_cast<std::size_t>(state_column(obj, 0))],
                             state[static_cast<std::size_t>(state_column(obj, 1))], 0.0});
    }
    return f;
}

void save_dataset(const std::string& dir, const Dataset& ds) {
    std::filesystem::create_directories(dir);

    nlohmann::json stats_doc = {
        {"layout_version", kLayoutVersion},
        {"horizon", ds.horizon},
        {"min", ds.stats.min_v},
        {"max", ds.stats.max_v},
    };
    std::ofstream stats_out(dir + "/stats.json", std::ios::trunc);
    if (!stats_out) {
        throw DataError("cannot write dataset stats: " + dir);
    }
    stats_out << stats_doc.dump(2) << '\n';

    Container c;
    c.header = {{"kind", "examples"},
                {"horizon", ds.horizon},
                {"feature_dim", kFeatureDim},
                {"layout_version", kLayoutVersion},
                {"count", static_cast<std::int64_t>(ds.examples.size())}};
    ArrayBlob values;
    values.name = "values";
    values.shape = {static_cast<std::int64_t>(ds.examples.size()), ds.horizon, kFeatureDim};
    ArrayBlob targets;
    targets.name = "return_target";
    targets.shape = {static_cast<std::int64_t>(ds.examples.size())};
    ArrayBlob valid_lens;
    valid_lens.name = "valid_len";
    valid_lens.shape = {static_cast<std::int64_t>(ds.examples.size())};
    for (const auto& ex : ds.examples) {
        values.data.insert(values.data.end(), ex.tensor.values.begin(), ex.tensor.values.end());
        targets.data.push_back(ex.return_target);
        valid_lens.data.push_back(static_cast<double>(ex.tensor.valid_len));
    }
    c.arrays.push_back(std::move(values));
    c.arrays.push_back(std::move(targets));
    c.arrays.push_back(std::move(valid_lens));
    save_container(dir + "/examples.bin", c);

    std::ofstream index_out(dir + "/index.csv", std::ios::trunc);
    if (!index_out) {
        throw DataError("cannot write dataset index: " + dir);
    }
    index_out << "example,possession_ref\n";
    for (std::size_t i = 0; i < ds.examples.size(); ++i) {
        index_out << i << ',' << ds.examples[i].possession_ref << '\n';
    }
}

Dataset load_dataset(const std::string& dir) {
    std::ifstream stats_in(dir + "/stats.json");
    if (!stats_in) {
        throw DataError("cannot open dataset stats: " + dir + "/stats.json");
    }
    nlohmann::json stats_doc;
    try {
        stats_doc = nlohmann::json::parse(stats_in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("dataset stats parse error: " + std::string(e.what()));
    }
    if (stats_doc.at("layout_version").get<int>() != kLayoutVersion) {
        throw DataError("dataset layout version mismatch");
    }

    Dataset ds;
    ds.horizon = stats_doc.at("horizon").get<int>();
    ds.stats.min_v = stats_doc.at("min").get<std::vector<double>>();
    ds.stats.max_v = stats_doc.at("max").get<std::vector<double>>();
    ds.stats.validate();

    const Container c = load_container(dir + "/examples.bin");
    if (c.header.value("kind", std::string{}) != "examples" ||
        c.header.at("layout_version").get<int>() != kLayoutVersion) {
        throw DataError("bad examples shard in: " + dir);
    }
    const auto count = c.header.at("count").get<std::int64_t>();
    const auto& values = c.array("values");
    const auto& targets = c.array("return_target");
    const auto& valid_lens = c.array("valid_len");

    std::vector<std::string> refs(static_cast<std::size_t>(count));
    std::ifstream index_in(dir + "/index.csv");
    if (index_in) {
        std::string line;
        std::getline(index_in, line);  // header
        while (std::getline(index_in, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) {
                continue;
            }
            const auto idx = static_cast<std::size_t>(std::stoll(line.substr(0, comma)));
            if (idx < refs.size()) {
                refs[idx] = line.substr(comma + 1);
            }
        }
    }

    const std::size_t per_example = static_cast<std::size_t>(ds.horizon) * kFeatureDim;
    for (std::int64_t i = 0; i < count; ++i) {
        TrainingExample ex;
        ex.tensor.horizon = ds.horizon;
        ex.tensor.normalized = true;
        ex.tensor.valid_len = static_cast<int>(valid_lens.data[static_cast<std::size_t>(i)]);
        ex.tensor.values.assign(values.data.begin() + static_cast<std::ptrdiff_t>(i * per_example),
                                values.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * per_example));
        ex.return_target = targets.data[static_cast<std::size_t>(i)];
        ex.possession_ref = refs[static_cast<std::size_t>(i)];
        ds.examples.push_back(std::move(ex));
    }
    return ds;
}

}  // namespace playgen
