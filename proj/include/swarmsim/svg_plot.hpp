/** Self-contained SVG renderings of traces: line charts and swarm layouts. */
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swarmsim/geometry.hpp"

namespace swarmsim {

enum class PlotKind { Convergence, Layout, Objective };

std::optional<PlotKind> parse_plot_kind(std::string_view name);
const char* plot_kind_name(PlotKind k);

struct Series {
    std::string name;
    std::vector<Vec2> points;
};

// Generic line chart; empty data yields a valid SVG with a "no data" note.
std::string render_chart(const std::string& title, const std::string& x_label,
                         const std::string& y_label, const std::vector<Series>& series);

struct LayoutUav {
    int id = 0;
    Vec2 pos;
    double coverage_radius_m = 0.0;
    double ground_link_quality = 0.0;
};

struct LayoutCoalition {
    int id = 0;
    std::vector<int> members;
    int ground_leader = -1;
    int task_leader = -1;
    int channel = 0;
    bool emergency = false;
};

// Swarm snapshot: coverage disks, one hull group per coalition
// (class="hull"), leader markers, id labels.
std::string render_layout(const Rect& area, const std::vector<LayoutUav>& uavs,
                          const std::vector<LayoutCoalition>& coalitions,
                          const std::string& title);

// Renders a trace artifact by content: metrics CSV (convergence/objective),
// comparison convergence CSV (algo,iteration,objective), or final-state JSON
// (layout). Throws ParseError when the input does not fit the kind.
std::string emit_plot(const std::string& input_text, PlotKind kind);

// Andrew's monotone chain; returns hull vertices in counter-clockwise order.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

}  // namespace swarmsim
