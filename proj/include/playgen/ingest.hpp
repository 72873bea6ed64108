#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "playgen/core.hpp"

namespace playgen {

enum class EventType {
    start_of_period,
    jump_ball,
    rebound,
    foul,
    turnover,
    timeout,
    substitution,
    end_of_period,
    violation,
    three_pointer_made,
    two_pointer_made,
    free_throw_made,
};

// Exact event strings as they appear in play-by-play files.
const char* event_type_name(EventType type);
EventType event_type_from_name(const std::string& name);  // throws DataError

// Base reward of an event for the acting team.
double reward_value(EventType type);
bool is_reward_bearing(EventType type);
// Pause events suspend play; frames under a frozen clock belong to no possession.
bool is_pause_event(EventType type);

struct PbpEvent {
    std::int64_t wall_time_ms = 0;
    int quarter = 1;
    double game_clock_s = 0.0;
    EventType event_type = EventType::start_of_period;
    std::int64_t acting_team_id = 0;
    int points = 0;
};

// Reward from `perspective_team_id`'s point of view: the Table value when the
// acting team matches, its negation otherwise.
double label_reward(const PbpEvent& event, std::int64_t perspective_team_id);

struct PossessionRecord {
    std::string game_id;
    int start_frame_idx = 0;
    int end_frame_idx = 0;  // exclusive
    std::int64_t offense_team_id = 0;
    PbpEvent terminal_event;
    // Terminal event first, then any free throws awarded at the same stoppage.
    std::vector<PbpEvent> attached_events;
    double reward_offense = 0.0;
    double reward_defense = 0.0;
};

struct MotionEvent {
    std::string event_id;
    std::vector<Frame> frames;
};

struct MotionData {
    std::string game_id;
    std::vector<MotionEvent> events;
    int skipped_moments = 0;  // malformed moments dropped with a warning

    // All frames flattened, sorted nondecreasing by wall_time_ms.
    std::vector<Frame> all_frames() const;
};

struct PbpData {
    std::string game_id;
    std::vector<PbpEvent> events;   // ordered by (quarter asc, game_clock desc)
};

MotionData parse_motion(std::istream& in);
MotionData parse_motion_file(const std::string& path);
PbpData parse_pbp(std::istream& in);
PbpData parse_pbp_file(const std::string& path);

// Inverse serializers; generated fixtures round-trip through these.
void write_motion(std::ostream& out, const MotionData& motion);
void write_motion_file(const std::string& path, const MotionData& motion);
void write_pbp(std::ostream& out, const PbpData& pbp);
void write_pbp_file(const std::string& path, const PbpData& pbp);

// Cuts a game into nonoverlapping possession spans. Each span ends at the
// frame whose clock matches the first reward-bearing event at or after it
// (2 s alignment tolerance); consecutive free throws attach to the same
// possession; frames under a paused clock are excluded.
std::vector<PossessionRecord> segment_possessions(const std::string& game_id,
                                                  const std::vector<Frame>& frames,
                                                  const std::vector<PbpEvent>& events);

// Ingest output: per-game possession index (JSON) + frame store (binary).
void write_possession_index(const std::string& path, const std::vector<PossessionRecord>& records);
std::vector<PossessionRecord> read_possession_index(const std::string& path);
void write_frame_store(const std::string& path, const std::string& game_id,
                       const std::vector<Frame>& frames);
std::vector<Frame> read_frame_store(const std::string& path, std::string* game_id_out = nullptr);

}  // namespace playgen
