#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace playgen {

// Error categories map onto CLI exit codes: usage 1, data 2, numeric 3.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int kPlayersPerTeam = 5;
constexpr int kObjects = 11;           // ball + 10 players
constexpr int kStateDim = 33;          // 11 objects x (x, y, z)
constexpr int kActionDim = 33;         // per-object velocity, ft/s
constexpr int kFeatureDim = kStateDim + kActionDim;
constexpr int kLayoutVersion = 1;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct CourtSpec {
    double length_ft = 94.0;
    double width_ft = 50.0;
    double max_height_ft = 20.0;
    std::array<Vec3, 2> basket_positions = {
        Vec3{5.25, 25.0, 10.0},
        Vec3{88.75, 25.0, 10.0},
    };

    void validate() const;
};

struct PlayerPos {
    std::int64_t team_id = 0;
    std::int64_t player_id = 0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// One 25 Hz tracking snapshot: ball plus exactly ten players, five per team.
struct Frame {
    double game_clock_s = 0.0;  // counts down within a quarter
    bool has_shot_clock = false;
    double shot_clock_s = 0.0;
    int quarter = 1;
    std::int64_t wall_time_ms = 0;
    Vec3 ball;
    std::vector<PlayerPos> players;  // exactly 10

    void validate() const;
};

// Column layout of one trajectory row, fixed across the whole artifact:
//   state:  [ball xyz | offense players 1-5 xyz | defense players 1-5 xyz]
//   action: same object order, velocities, starting at kStateDim.
// Object index 0 is the ball, 1..5 offense, 6..10 defense.
int state_column(int object_idx, int axis);
int action_column(int object_idx, int axis);

// H x (state+action) trajectory over the planning horizon. Rows beyond
// valid_len repeat the last valid row (stationary padding).
struct TrajectoryTensor {
    int horizon = 0;
    int valid_len = 0;
    bool normalized = false;
    std::vector<double> values;  // horizon x kFeatureDim, row-major

    static TrajectoryTensor zeros(int horizon);

    double& at(int row, int col) { return values[static_cast<std::size_t>(row) * kFeatureDim + col]; }
    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * kFeatureDim + col]; }

    void validate() const;
};

// Per-feature min/max over the training set; constant features map to 0.
struct NormalizationStats {
    std::vector<double> min_v;  // kFeatureDim
    std::vector<double> max_v;  // kFeatureDim

    bool is_constant(int feature) const { return max_v[feature] <= min_v[feature]; }
    void validate() const;
    bool operator==(const NormalizationStats& other) const = default;
};

// Affine map of every feature from [min, max] to [-1, 1].
TrajectoryTensor normalize(const TrajectoryTensor& traj, const NormalizationStats& stats);
// Inverse of normalize; constant features recover their min value.
TrajectoryTensor denormalize(const TrajectoryTensor& traj, const NormalizationStats& stats);

// FNV-1a 64-bit, used for checkpoint/config fingerprints.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::string fingerprint_hex(std::uint64_t h);
std::uint64_t file_fingerprint(const std::string& path);

}  // namespace playgen
