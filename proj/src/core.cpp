#include "playgen/core.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace playgen {

void CourtSpec::validate() const {
    if (!(length_ft > 0.0) || !(width_ft > 0.0) || !(max_height_ft > 0.0)) {
        throw DataError("court dimensions must be positive");
    }
    for (const auto& basket : basket_positions) {
        if (basket.x < 0.0 || basket.x > length_ft) {
            throw DataError("basket x coordinate outside court length");
        }
    }
}

void Frame::validate() const {
    if (players.size() != static_cast<std::size_t>(2 * kPlayersPerTeam)) {
        throw DataError("frame must carry exactly 10 player entries");
    }
    std::int64_t team_a = players.front().team_id;
    int count_a = 0;
    int count_b = 0;
    for (const auto& p : players) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
            throw DataError("non-finite player coordinate");
        }
        if (p.team_id == team_a) {
            ++count_a;
        } else {
            ++count_b;
        }
    }
    if (count_a != kPlayersPerTeam || count_b != kPlayersPerTeam) {
        throw DataError("frame must have five players per team");
    }
    if (!std::isfinite(ball.x) || !std::isfinite(ball.y) || !std::isfinite(ball.z)) {
        throw DataError("non-finite ball coordinate");
    }
}

int state_column(int object_idx, int axis) {
    return object_idx * 3 + axis;
}

int action_column(int object_idx, int axis) {
    return kStateDim + object_idx * 3 + axis;
}

TrajectoryTensor TrajectoryTensor::zeros(int horizon) {
    if (horizon < 1) {
        throw DataError("trajectory horizon must be >= 1");
    }
    TrajectoryTensor t;
    t.horizon = horizon;
    t.valid_len = horizon;
    t.values.assign(static_cast<std::size_t>(horizon) * kFeatureDim, 0.0);
    return t;
}

void TrajectoryTensor::validate() const {
    if (horizon < 1 || valid_len < 1 || valid_len > horizon) {
        throw DataError("trajectory valid_len must be in [1, horizon]");
    }
    if (values.size() != static_cast<std::size_t>(horizon) * kFeatureDim) {
        throw DataError("trajectory buffer size does not match horizon");
    }
}

void NormalizationStats::validate() const {
    if (min_v.size() != kFeatureDim || max_v.size() != kFeatureDim) {
        throw DataError("normalization stats must carry one min/max per feature");
    }
    for (int f = 0; f < kFeatureDim; ++f) {
        if (max_v[f] < min_v[f]) {
            throw DataError("normalization stats require max >= min per feature");
        }
    }
}

TrajectoryTensor normalize(const TrajectoryTensor& traj, const NormalizationStats& stats) {
    if (traj.normalized) {
        throw DataError("normalize: trajectory is already normalized");
    }
    stats.validate();
    traj.validate();
    TrajectoryTensor out = traj;
    out.normalized = true;
    for (int r = 0; r < traj.horizon; ++r) {
        for (int f = 0; f < kFeatureDim; ++f) {
            if (stats.is_constant(f)) {
                out.at(r, f) = 0.0;
            } else {
                const double span = stats.max_v[f] - stats.min_v[f];
                out.at(r, f) = 2.0 * (traj.at(r, f) - stats.min_v[f]) / span - 1.0;
            }
        }
    }
    return out;
}

TrajectoryTensor denormalize(const TrajectoryTensor& traj, const NormalizationStats& stats) {
    if (!traj.normalized) {
        throw DataError("denormalize: trajectory is not normalized");
    }
    stats.validate();
    traj.validate();
    TrajectoryTensor out = traj;
    out.normalized = false;
    for (int r = 0; r < traj.horizon; ++r) {
        for (int f = 0; f < kFeatureDim; ++f) {
            if (stats.is_constant(f)) {
                out.at(r, f) = stats.min_v[f];
            } else {
                const double span = stats.max_v[f] - stats.min_v[f];
                out.at(r, f) = stats.min_v[f] + (traj.at(r, f) + 1.0) * 0.5 * span;
            }
        }
    }
    return out;
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fingerprint_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::uint64_t file_fingerprint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open file for fingerprinting: " + path);
    }
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

}  // namespace playgen
