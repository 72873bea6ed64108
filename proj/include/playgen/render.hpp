#pragma once

#include <optional>
#include <string>

#include "playgen/core.hpp"

namespace playgen {

struct RenderStyle {
    std::string offense_color = "#1f6fd0";
    std::string defense_color = "#222222";
    std::string ball_color = "#f28522";
    std::string highlight_color = "#d62728";
    std::string oob_tint = "#cc2bd4";
    std::optional<int> highlight_player_idx;  // object index 1..10
    int width_px = 940;
    int height_px = 560;

    void validate() const;
};

// Writes an SVG court diagram: 11 polyline traces with start circles and end
// diamonds, grouped into layers named court/traces/markers. Out-of-bounds
// segments are re-drawn in the tint color rather than clipped.
void render_possession(const TrajectoryTensor& traj, const CourtSpec& court,
                       const RenderStyle& style, const std::string& out_path);

}  // namespace playgen
