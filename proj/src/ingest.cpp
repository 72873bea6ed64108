#include "playgen/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "playgen/container.hpp"

namespace playgen {

namespace {

constexpr double kClockEps = 1e-6;
constexpr double kAlignToleranceS = 2.0;

struct EventTableRow {
    EventType type;
    const char* name;
    double reward;
};

constexpr EventTableRow kEventTable[] = {
    {EventType::start_of_period, "start of period", 0.0},
    {EventType::jump_ball, "jump ball", 0.0},
    {EventType::rebound, "rebound", 0.25},
    {EventType::foul, "foul", -0.25},
    {EventType::turnover, "turnover", -1.0},
    {EventType::timeout, "timeout", 0.0},
    {EventType::substitution, "substitution", 0.0},
    {EventType::end_of_period, "end of period", 0.0},
    {EventType::violation, "violation", -0.25},
    {EventType::three_pointer_made, "3 pointer made", 3.0},
    {EventType::two_pointer_made, "2 pointer made", 2.0},
    {EventType::free_throw_made, "free-throw made", 1.0},
};

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

const char* event_type_name(EventType type) {
    for (const auto& row : kEventTable) {
        if (row.type == type) {
            return row.name;
        }
    }
    throw DataError("unknown event type enum value");
}

EventType event_type_from_name(const std::string& name) {
    for (const auto& row : kEventTable) {
        if (name == row.name) {
            return row.type;
        }
    }
    throw DataError("unknown event type '" + name + "'");
}

double reward_value(EventType type) {
    for (const auto& row : kEventTable) {
        if (row.type == type) {
            return row.reward;
        }
    }
    throw DataError("unknown event type enum value");
}

bool is_reward_bearing(EventType type) {
    return reward_value(type) != 0.0;
}

bool is_pause_event(EventType type) {
    return type == EventType::timeout || type == EventType::substitution;
}

double label_reward(const PbpEvent& event, std::int64_t perspective_team_id) {
    const double base = reward_value(event.event_type);
    if (base == 0.0) {
        return 0.0;
    }
    return event.acting_team_id == perspective_team_id ? base : -base;
}

std::vector<Frame> MotionData::all_frames() const {
    std::vector<Frame> frames;
    for (const auto& ev : events) {
        frames.insert(frames.end(), ev.frames.begin(), ev.frames.end());
    }
    std::stable_sort(frames.begin(), frames.end(),
                     [](const Frame& a, const Frame& b) { return a.wall_time_ms < b.wall_time_ms; });
    return frames;
}

// ---------------------------------------------------------------------------
// Motion JSON
// ---------------------------------------------------------------------------

namespace {

// Moment layout: [quarter, wall_time_ms, game_clock_s, shot_clock_s|null,
// null, [[team_id, player_id, x, y, z] x 11, ball first with team_id -1]].
bool parse_moment(const nlohmann::json& moment, Frame& frame) {
    if (!moment.is_array() || moment.size() < 6) {
        return false;
    }
    const auto& rows = moment[5];
    if (!moment[0].is_number_integer() || !moment[1].is_number() || !moment[2].is_number() ||
        !rows.is_array() || rows.size() != kObjects) {
        return false;
    }
    frame.quarter = moment[0].get<int>();
    frame.wall_time_ms = moment[1].get<std::int64_t>();
    frame.game_clock_s = moment[2].get<double>();
    if (moment[3].is_null()) {
        frame.has_shot_clock = false;
        frame.shot_clock_s = 0.0;
    } else if (moment[3].is_number()) {
        frame.has_shot_clock = true;
        frame.shot_clock_s = moment[3].get<double>();
    } else {
        return false;
    }

    frame.players.clear();
    frame.players.reserve(2 * kPlayersPerTeam);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (!row.is_array() || row.size() != 5 || !row[0].is_number_integer() ||
            !row[1].is_number_integer() || !row[2].is_number() || !row[3].is_number() ||
            !row[4].is_number()) {
            return false;
        }
        const auto team = row[0].get<std::int64_t>();
        if (r == 0) {
            if (team != -1) {
                return false;
            }
            frame.ball = {row[2].get<double>(), row[3].get<double>(), row[4].get<double>()};
        } else {
            PlayerPos p;
            p.team_id = team;
            p.player_id = row[1].get<std::int64_t>();
            p.x = row[2].get<double>();
            p.y = row[3].get<double>();
            p.z = 0.0;  // tracking data is planar for players
            frame.players.push_back(p);
        }
    }
    try {
        frame.validate();
    } catch (const DataError&) {
        return false;
    }
    return true;
}

}  // namespace

MotionData parse_motion(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("motion file parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("gameid") || !doc.contains("events") ||
        !doc["events"].is_array()) {
        throw DataError("motion file must be an object with 'gameid' and 'events'");
    }

    MotionData motion;
    motion.game_id = doc["gameid"].get<std::string>();
    for (const auto& ev : doc["events"]) {
        if (!ev.is_object() || !ev.contains("moments") || !ev["moments"].is_array()) {
            throw DataError("motion event missing 'moments' array");
        }
        MotionEvent out_ev;
        out_ev.event_id = ev.value("eventId", std::string{});
        for (const auto& moment : ev["moments"]) {
            Frame frame;
            if (parse_moment(moment, frame)) {
                out_ev.frames.push_back(std::move(frame));
            } else {
                ++motion.skipped_moments;
            }
        }
        motion.events.push_back(std::move(out_ev));
    }
    return motion;
}

MotionData parse_motion_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open motion file: " + path);
    }
    return parse_motion(in);
}

void write_motion(std::ostream& out, const MotionData& motion) {
    nlohmann::json doc;
    doc["gameid"] = motion.game_id;
    auto events = nlohmann::json::array();
    for (const auto& ev : motion.events) {
        nlohmann::json je;
        je["eventId"] = ev.event_id;
        auto moments = nlohmann::json::array();
        for (const auto& f : ev.frames) {
            auto rows = nlohmann::json::array();
            rows.push_back({-1, -1, f.ball.x, f.ball.y, f.ball.z});
            for (const auto& p : f.players) {
                rows.push_back({p.team_id, p.player_id, p.x, p.y, p.z});
            }
            nlohmann::json moment = nlohmann::json::array();
            moment.push_back(f.quarter);
            moment.push_back(f.wall_time_ms);
            moment.push_back(f.game_clock_s);
            if (f.has_shot_clock) {
                moment.push_back(f.shot_clock_s);
            } else {
                moment.push_back(nullptr);
            }
            moment.push_back(nullptr);
            moment.push_back(rows);
            moments.push_back(std::move(moment));
        }
        je["moments"] = std::move(moments);
        events.push_back(std::move(je));
    }
    doc["events"] = std::move(events);
    out << doc.dump() << '\n';
}

void write_motion_file(const std::string& path, const MotionData& motion) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError("cannot open motion file for writing: " + path);
    }
    write_motion(out, motion);
}

// ---------------------------------------------------------------------------
// Play-by-play CSV
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kPbpHeader = "game_id,quarter,game_clock_s,wall_time_ms,event_type,acting_team_id,points";

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

}  // namespace

PbpData parse_pbp(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("play-by-play file is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kPbpHeader) {
        throw DataError("play-by-play header mismatch, expected: " + std::string(kPbpHeader));
    }

    PbpData pbp;
    int row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != 7) {
            throw DataError("play-by-play row " + std::to_string(row_no) + ": expected 7 fields");
        }
        try {
            PbpEvent ev;
            if (pbp.game_id.empty()) {
                pbp.game_id = cells[0];
            }
            ev.quarter = std::stoi(cells[1]);
            ev.game_clock_s = std::stod(cells[2]);
            ev.wall_time_ms = std::stoll(cells[3]);
            ev.event_type = event_type_from_name(cells[4]);
            ev.acting_team_id = std::stoll(cells[5]);
            ev.points = std::stoi(cells[6]);
            if (ev.points < 0) {
                throw DataError("negative points");
            }
            pbp.events.push_back(ev);
        } catch (const DataError& e) {
            throw DataError("play-by-play row " + std::to_string(row_no) + ": " + e.what());
        } catch (const std::exception& e) {
            throw DataError("play-by-play row " + std::to_string(row_no) + ": bad field (" + e.what() + ")");
        }
    }
    std::stable_sort(pbp.events.begin(), pbp.events.end(), [](const PbpEvent& a, const PbpEvent& b) {
        if (a.quarter != b.quarter) {
            return a.quarter < b.quarter;
        }
        return a.game_clock_s > b.game_clock_s;
    });
    return pbp;
}

PbpData parse_pbp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open play-by-play file: " + path);
    }
    return parse_pbp(in);
}

void write_pbp(std::ostream& out, const PbpData& pbp) {
    out << kPbpHeader << '\n';
    for (const auto& ev : pbp.events) {
        out << pbp.game_id << ',' << ev.quarter << ',' << format_double(ev.game_clock_s) << ','
            << ev.wall_time_ms << ',' << event_type_name(ev.event_type) << ',' << ev.acting_team_id
            << ',' << ev.points << '\n';
    }
}

void write_pbp_file(const std::string& path, const PbpData& pbp) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError("cannot open play-by-play file for writing: " + path);
    }
    write_pbp(out, pbp);
}

// ---------------------------------------------------------------------------
// Possession segmentation
// ---------------------------------------------------------------------------

std::vector<PossessionRecord> segment_possessions(const std::string& game_id,
                                                  const std::vector<Frame>& frames,
                                                  const std::vector<PbpEvent>& events) {
    std::vector<PossessionRecord> records;
    if (events.empty()) {
        return records;
    }
    for (std::size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].wall_time_ms < frames[i - 1].wall_time_ms) {
            throw DataError("frames are not ordered by wall time");
        }
    }

    std::vector<PbpEvent> sorted = events;
    std::stable_sort(sorted.begin(), sorted.end(), [](const PbpEvent& a, const PbpEvent& b) {
        if (a.quarter != b.quarter) {
            return a.quarter < b.quarter;
        }
        return a.game_clock_s > b.game_clock_s;
    });

    // Frame index range per quarter.
    auto quarter_range = [&frames](int q) {
        int lo = -1;
        int hi = -1;
        for (std::size_t i = 0; i < frames.size(); ++i) {
            if (frames[i].quarter == q) {
                if (lo < 0) {
                    lo = static_cast<int>(i);
                }
                hi = static_cast<int>(i) + 1;
            }
        }
        return std::pair<int, int>{lo, hi};
    };

    std::size_t ei = 0;
    while (ei < sorted.size()) {
        const int q = sorted[ei].quarter;
        auto [q_lo, q_hi] = quarter_range(q);
        int cursor = q_lo;

        std::size_t k = ei;
        while (k < sorted.size() && sorted[k].quarter == q) {
            const PbpEvent& ev = sorted[k];
            if (!is_reward_bearing(ev.event_type)) {
                ++k;
                continue;
            }
            // Terminal event plus any free throws awarded at the same stoppage.
            std::vector<PbpEvent> group = {ev};
            std::size_t j = k + 1;
            while (j < sorted.size() && sorted[j].quarter == q &&
                   sorted[j].event_type == EventType::free_throw_made) {
                group.push_back(sorted[j]);
                ++j;
            }

            if (q_lo < 0 || cursor >= q_hi) {
                // No frames left in this quarter for the event to land on.
                throw DataError("clock alignment failed for event '" +
                                std::string(event_type_name(ev.event_type)) + "' at quarter " +
                                std::to_string(q) + " clock " + format_double(ev.game_clock_s) +
                                ": no frames available");
            }

            // End frame: first frame at or past the event clock.
            int end_incl = -1;
            for (int f = cursor; f < q_hi; ++f) {
                if (frames[f].game_clock_s <= ev.game_clock_s + kClockEps) {
                    end_incl = f;
                    break;
                }
            }
            if (end_incl < 0) {
                // Play stopped short of the event clock; accept the last frame
                // if it is within tolerance.
                end_incl = q_hi - 1;
                if (frames[end_incl].game_clock_s - ev.game_clock_s > kAlignToleranceS) {
                    throw DataError("clock alignment failed for event '" +
                                    std::string(event_type_name(ev.event_type)) + "' at clock " +
                                    format_double(ev.game_clock_s) + ": nearest frame clock " +
                                    format_double(frames[end_incl].game_clock_s));
                }
            } else if (ev.game_clock_s - frames[end_incl].game_clock_s > kAlignToleranceS) {
                throw DataError("clock alignment failed for event '" +
                                std::string(event_type_name(ev.event_type)) + "' at clock " +
                                format_double(ev.game_clock_s) + ": nearest frame clock " +
                                format_double(frames[end_incl].game_clock_s));
            }
            const int end_excl = end_incl + 1;

            // Frames sitting under a paused clock belong to no possession; the
            // span restarts after the pause clears.
            int start = cursor;
            for (std::size_t p = ei; p < sorted.size() && sorted[p].quarter == q; ++p) {
                const PbpEvent& pe = sorted[p];
                if (!is_pause_event(pe.event_type)) {
                    continue;
                }
                int f = start;
                while (f < end_excl &&
                       !(frames[f].wall_time_ms >= pe.wall_time_ms &&
                         frames[f].game_clock_s >= pe.game_clock_s - kClockEps)) {
                    ++f;
                }
                while (f < end_excl && frames[f].game_clock_s >= pe.game_clock_s - kClockEps) {
                    ++f;
                    start = f;
                }
            }

            if (start < end_excl) {
                PossessionRecord rec;
                rec.game_id = game_id;
                rec.start_frame_idx = start;
                rec.end_frame_idx = end_excl;
                rec.offense_team_id = ev.acting_team_id;
                rec.terminal_event = ev;
                rec.attached_events = group;
                rec.reward_offense = 0.0;
                for (const auto& ge : group) {
                    rec.reward_offense += label_reward(ge, rec.offense_team_id);
                }
                rec.reward_defense = -rec.reward_offense;
                records.push_back(std::move(rec));
            }
            cursor = end_excl;
            k = j;
        }
        // Advance to the next quarter's events.
        while (ei < sorted.size() && sorted[ei].quarter == q) {
            ++ei;
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// Ingest output files
// ---------------------------------------------------------------------------

namespace {

nlohmann::json event_to_json(const PbpEvent& ev) {
    return {
        {"wall_time_ms", ev.wall_time_ms}, {"quarter", ev.quarter},
        {"game_clock_s", ev.game_clock_s}, {"event_type", event_type_name(ev.event_type)},
        {"acting_team_id", ev.acting_team_id}, {"points", ev.points},
    };
}

PbpEvent event_from_json(const nlohmann::json& j) {
    PbpEvent ev;
    ev.wall_time_ms = j.at("wall_time_ms").get<std::int64_t>();
    ev.quarter = j.at("quarter").get<int>();
    ev.game_clock_s = j.at("game_clock_s").get<double>();
    ev.event_type = event_type_from_name(j.at("event_type").get<std::string>());
    ev.acting_team_id = j.at("acting_team_id").get<std::int64_t>();
    ev.points = j.at("points").get<int>();
    return ev;
}

constexpr int kFrameRowWidth = 4 + 3 + 10 * 5;  // quarter, wall, clock, shot, ball, players

}  // namespace

void write_possession_index(const std::string& path, const std::vector<PossessionRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rec : records) {
        nlohmann::json attached = nlohmann::json::array();
        for (const auto& ev : rec.attached_events) {
            attached.push_back(event_to_json(ev));
        }
        arr.push_back({
            {"game_id", rec.game_id},
            {"start_frame_idx", rec.start_frame_idx},
            {"end_frame_idx", rec.end_frame_idx},
            {"offense_team_id", rec.offense_team_id},
            {"terminal_event", event_to_json(rec.terminal_event)},
            {"attached_events", attached},
            {"reward_offense", rec.reward_offense},
            {"reward_defense", rec.reward_defense},
        });
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError("cannot open possession index for writing: " + path);
    }
    out << arr.dump(2) << '\n';
}

std::vector<PossessionRecord> read_possession_index(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open possession index: " + path);
    }
    nlohmann::json arr;
    try {
        arr = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("possession index parse error: " + std::string(e.what()));
    }
    std::vector<PossessionRecord> records;
    for (const auto& j : arr) {
        PossessionRecord rec;
        rec.game_id = j.at("game_id").get<std::string>();
        rec.start_frame_idx = j.at("start_frame_idx").get<int>();
        rec.end_frame_idx = j.at("end_frame_idx").get<int>();
        rec.offense_team_id = j.at("offense_team_id").get<std::int64_t>();
        rec.terminal_event = event_from_json(j.at("terminal_event"));
        for (const auto& je : j.at("attached_events")) {
            rec.attached_events.push_back(event_from_json(je));
        }
        rec.reward_offense = j.at("reward_offense").get<double>();
        rec.reward_defense = j.at("reward_defense").get<double>();
        records.push_back(std::move(rec));
    }
    return records;
}

void write_frame_store(const std::string& path, const std::string& game_id,
                       const std::vector<Frame>& frames) {
    Container c;
    c.header = {{"kind", "frame_store"}, {"game_id", game_id},
                {"frame_count", static_cast<std::int64_t>(frames.size())}};
    ArrayBlob blob;
    blob.name = "frames";
    blob.shape = {static_cast<std::int64_t>(frames.size()), kFrameRowWidth};
    blob.data.reserve(frames.size() * kFrameRowWidth);
    for (const auto& f : frames) {
        blob.data.push_back(static_cast<double>(f.quarter));
        blob.data.push_back(static_cast<double>(f.wall_time_ms));
        blob.data.push_back(f.game_clock_s);
        blob.data.push_back(f.has_shot_clock ? f.shot_clock_s : std::nan(""));
        blob.data.push_back(f.ball.x);
        blob.data.push_back(f.ball.y);
        blob.data.push_back(f.ball.z);
        for (const auto& p : f.players) {
            blob.data.push_back(static_cast<double>(p.team_id));
            blob.data.push_back(static_cast<double>(p.player_id));
            blob.data.push_back(p.x);
            blob.data.push_back(p.y);
            blob.data.push_back(p.z);
        }
    }
    c.arrays.push_back(std::move(blob));
    save_container(path, c);
}

std::vector<Frame> read_frame_store(const std::string& path, std::string* game_id_out) {
    const Container c = load_container(path);
    if (c.header.value("kind", std::string{}) != "frame_store") {
        throw DataError("not a frame store: " + path);
    }
    if (game_id_out) {
        *game_id_out = c.header.value("game_id", std::string{});
    }
    const auto& blob = c.array("frames");
    if (blob.shape.size() != 2 || blob.shape[1] != kFrameRowWidth) {
        throw DataError("frame store has unexpected row width: " + path);
    }
    std::vector<Frame> frames;
    frames.reserve(static_cast<std::size_t>(blob.shape[0]));
    const double* row = blob.data.data();
    for (std::int64_t i = 0; i < blob.shape[0]; ++i, row += kFrameRowWidth) {
        Frame f;
        f.quarter = static_cast<int>(row[0]);
        f.wall_time_ms = static_cast<std::int64_t>(row[1]);
        f.game_clock_s = row[2];
        f.has_shot_clock = !std::isnan(row[3]);
        f.shot_clock_s = f.has_shot_clock ? row[3] : 0.0;
        f.ball = {row[4], row[5], row[6]};
        for (int p = 0; p < 2 * kPlayersPerTeam; ++p) {
            const double* pr = row + 7 + p * 5;
            PlayerPos pos;
            pos.team_id = static_cast<std::int64_t>(pr[0]);
            pos.player_id = static_cast<std::int64_t>(pr[1]);
            pos.x = pr[2];
            pos.y = pr[3];
            pos.z = pr[4];
            f.players.push_back(pos);
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

}  // namespace playgen
