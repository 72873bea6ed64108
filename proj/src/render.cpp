#include "playgen/render.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace playgen {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
}

}  // namespace

void RenderStyle::validate() const {
    if (width_px < 100 || height_px < 100) {
        throw DataError("render size must be at least 100x100 pixels");
    }
    if (offense_color == defense_color || offense_color == ball_color ||
        defense_color == ball_color) {
        throw DataError("render colors must be distinct");
    }
    if (highlight_player_idx && (*highlight_player_idx < 1 || *highlight_player_idx >= kObjects)) {
        throw DataError("highlight player index must name a player object (1..10)");
    }
}

void render_possession(const TrajectoryTensor& traj, const CourtSpec& court,
                       const RenderStyle& style, const std::string& out_path) {
    if (traj.normalized) {
        throw DataError("render_possession expects a denormalized trajectory");
    }
    traj.validate();
    style.validate();
    court.validate();

    for (int r = 0; r < traj.valid_len; ++r) {
        for (int obj = 0; obj < kObjects; ++obj) {
            for (int axis = 0; axis < 3; ++axis) {
                if (std::isnan(traj.at(r, state_column(obj, axis)))) {
                    throw DataError("render_possession: NaN coordinate at row " +
                                    std::to_string(r) + ", object " + std::to_string(obj));
                }
            }
        }
    }

    const double margin = 20.0;
    const double sx = (style.width_px - 2.0 * margin) / court.length_ft;
    const double sy = (style.height_px - 2.0 * margin) / court.width_ft;
    auto px = [&](double x) { return margin + x * sx; };
    // SVG y grows downward; court y grows upward.
    auto py = [&](double y) { return style.height_px - margin - y * sy; };

    auto object_color = [&](int obj) -> const std::string& {
        if (obj == 0) {
            return style.ball_color;
        }
        return obj <= kPlayersPerTeam ? style.offense_color : style.defense_color;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width_px << "\" height=\""
        << style.height_px << "\" viewBox=\"0 0 " << style.width_px << ' ' << style.height_px
        << "\">\n";

    // Court layer: outline, halfcourt line, baskets.
    svg << "<g id=\"court\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1.5\">\n";
    svg << "  <rect x=\"" << fmt(px(0)) << "\" y=\"" << fmt(py(court.width_ft)) << "\" width=\""
        << fmt(court.length_ft * sx) << "\" height=\"" << fmt(court.width_ft * sy) << "\"/>\n";
    svg << "  <line x1=\"" << fmt(px(court.length_ft / 2)) << "\" y1=\"" << fmt(py(0)) << "\" x2=\""
        << fmt(px(court.length_ft / 2)) << "\" y2=\"" << fmt(py(court.width_ft)) << "\"/>\n";
    for (const auto& basket : court.basket_positions) {
        svg << "  <circle cx=\"" << fmt(px(basket.x)) << "\" cy=\"" << fmt(py(basket.y))
            << "\" r=\"6\"/>\n";
    }
    svg << "</g>\n";

    // Trace layer: one polyline per object; out-of-bounds hops re-drawn tinted.
    svg << "<g id=\"traces\" fill=\"none\" stroke-width=\"1.8\">\n";
    std::ostringstream oob;
    for (int obj = 0; obj < kObjects; ++obj) {
        svg << "  <polyline stroke=\"" << object_color(obj) << "\" points=\"";
        for (int r = 0; r < traj.valid_len; ++r) {
            if (r > 0) {
                svg << ' ';
            }
            svg << fmt(px(traj.at(r, state_column(obj, 0)))) << ','
                << fmt(py(traj.at(r, state_column(obj, 1))));
        }
        svg << "\"/>\n";
        for (int r = 0; r + 1 < traj.valid_len; ++r) {
            auto outside = [&](int row) {
                const double x = traj.at(row, state_column(obj, 0));
                const double y = traj.at(row, state_column(obj, 1));
                return x < 0.0 || x > court.length_ft || y < 0.0 || y > court.width_ft;
            };
            if (outside(r) || outside(r + 1)) {
                oob << "  <line stroke=\"" << style.oob_tint << "\" x1=\""
                    << fmt(px(traj.at(r, state_column(obj, 0)))) << "\" y1=\""
                    << fmt(py(traj.at(r, state_column(obj, 1)))) << "\" x2=\""
                    << fmt(px(traj.at(r + 1, state_column(obj, 0)))) << "\" y2=\""
                    << fmt(py(traj.at(r + 1, state_column(obj, 1)))) << "\"/>\n";
            }
        }
    }
    svg << oob.str();
    svg << "</g>\n";

    // Marker layer: start circles, end diamonds.
    svg << "<g id=\"markers\" stroke=\"none\">\n";
    for (int obj = 0; obj < kObjects; ++obj) {
        const bool highlighted = style.highlight_player_idx && *style.highlight_player_idx == obj;
        const std::string& color = highlighted ? style.highlight_color : object_color(obj);
        const double x0 = px(traj.at(0, state_column(obj, 0)));
        const double y0 = py(traj.at(0, state_column(obj, 1)));
        svg << "  <circle fill=\"" << color << "\" cx=\"" << fmt(x0) << "\" cy=\"" << fmt(y0)
            << "\" r=\"3\"/>\n";
        const int last = traj.valid_len - 1;
        const double x1 = px(traj.at(last, state_column(obj, 0)));
        const double y1 = py(traj.at(last, state_column(obj, 1)));
        const double d = highlighted ? 6.0 : 4.5;
        svg << "  <path fill=\"" << color << "\" d=\"M" << fmt(x1) << ' ' << fmt(y1 - d) << " L"
            << fmt(x1 + d) << ' ' << fmt(y1) << " L" << fmt(x1) << ' ' << fmt(y1 + d) << " L"
            << fmt(x1 - d) << ' ' << fmt(y1) << " Z\"/>\n";
    }
    svg << "</g>\n</svg>\n";

    std::ofstream out(out_path, std::ios::trunc);
    if (!out) {
        throw DataError("cannot open render output: " + out_path);
    }
    out << svg.str();
    if (!out) {
        throw DataError("write failure on render output: " + out_path);
    }
}

}  // namespace playgen
