#include "swarmsim/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "swarmsim/csv.hpp"
#include "swarmsim/errors.hpp"

namespace swarmsim {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
constexpr int kPaletteSize = 10;

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c; break;
        }
    }
    return out;
}

}  // namespace

std::optional<PlotKind> parse_plot_kind(std::string_view name) {
    if (name == "convergence") return PlotKind::Convergence;
    if (name == "layout") return PlotKind::Layout;
    if (name == "objective") return PlotKind::Objective;
    return std::nullopt;
}

const char* plot_kind_name(PlotKind k) {
    switch (k) {
        case PlotKind::Convergence: return "convergence";
        case PlotKind::Layout: return "layout";
        case PlotKind::Objective: return "objective";
    }
    return "unknown";
}

std::string render_chart(const std::string& title, const std::string& x_label,
                         const std::string& y_label, const std::vector<Series>& series) {
    constexpr double W = 860, H = 520;
    constexpr double L = 70, R = 700, T = 48, B = 470;  // plot box edges

    bool any = false;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            if (!any) {
                x_min = x_max = p.x;
                y_min = y_max = p.y;
                any = true;
            } else {
                x_min = std::min(x_min, p.x);
                x_max = std::max(x_max, p.x);
                y_min = std::min(y_min, p.y);
                y_max = std::max(y_max, p.y);
            }
        }
    }
    if (x_max - x_min < 1e-12) x_max = x_min + 1;
    if (y_max - y_min < 1e-12) {
        y_min -= 1;
        y_max += 1;
    } else {
        const double pad = 0.05 * (y_max - y_min);
        y_min -= pad;
        y_max += pad;
    }
    auto sx = [&](double x) { return L + (x - x_min) / (x_max - x_min) * (R - L); };
    auto sy = [&](double y) { return B - (y - y_min) / (y_max - y_min) * (B - T); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\" font-family=\"sans-serif\">\n"
        << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
        << "<text x=\"" << (L + R) / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << xml_escape(title) << "</text>\n";

    for (int i = 0; i <= 4; ++i) {
        const double fx = x_min + (x_max - x_min) * i / 4.0;
        const double fy = y_min + (y_max - y_min) * i / 4.0;
        svg << "<line x1=\"" << px(sx(fx)) << "\" y1=\"" << B << "\" x2=\"" << px(sx(fx))
            << "\" y2=\"" << T << "\" stroke=\"#e0e0e0\"/>\n"
            << "<line x1=\"" << L << "\" y1=\"" << px(sy(fy)) << "\" x2=\"" << R << "\" y2=\""
            << px(sy(fy)) << "\" stroke=\"#e0e0e0\"/>\n"
            << "<text x=\"" << px(sx(fx)) << "\" y=\"" << B + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(fx) << "</text>\n"
            << "<text x=\"" << L - 8 << "\" y=\"" << px(sy(fy) + 4)
            << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(fy) << "</text>\n";
    }
    svg << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << R - L << "\" height=\""
        << B - T << "\" fill=\"none\" stroke=\"#333\"/>\n"
        << "<text x=\"" << (L + R) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(x_label) << "</text>\n"
        << "<text x=\"20\" y=\"" << (T + B) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 "
        << (T + B) / 2 << ")\">" << xml_escape(y_label) << "</text>\n";

    int color = 0;
    double legend_y = T + 10;
    for (const auto& s : series) {
        const char* c = kPalette[color % kPaletteSize];
        ++color;
        if (!s.points.empty()) {
            svg << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.8\" points=\"";
            for (const auto& p : s.points) svg << px(sx(p.x)) << ',' << px(sy(p.y)) << ' ';
            svg << "\"/>\n";
        }
        svg << "<line x1=\"" << R + 16 << "\" y1=\"" << px(legend_y) << "\" x2=\"" << R + 44
            << "\" y2=\"" << px(legend_y) << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << R + 50 << "\" y=\"" << px(legend_y + 4) << "\" font-size=\"12\">"
            << xml_escape(s.name) << "</text>\n";
        legend_y += 20;
    }
    if (!any) {
        svg << "<text x=\"" << (L + R) / 2 << "\" y=\"" << (T + B) / 2
            << "\" text-anchor=\"middle\" font-size=\"15\" fill=\"#888\">no data</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::vector<Vec2> convex_hull(std::vector<Vec2> points) {
    std::sort(points.begin(), points.end(), [](const Vec2& a, const Vec2& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    points.erase(std::unique(points.begin(), points.end(),
                             [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
                 points.end());
    const std::size_t n = points.size();
    if (n < 3) return points;
    auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<Vec2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
        hull[k++] = points[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
        hull[k++] = points[i];
    }
    hull.resize(k - 1);
    return hull;
}

std::string render_layout(const Rect& area, const std::vector<LayoutUav>& uavs,
                          const std::vector<LayoutCoalition>& coalitions,
                          const std::string& title) {
    constexpr double box = 640, margin = 60;
    const double scale = box / std::max(area.width_m, area.height_m);
    const double W = area.width_m * scale + 2 * margin;
    const double H = area.height_m * scale + 2 * margin + 20;
    auto sx = [&](double x) { return margin + x * scale; };
    auto sy = [&](double y) { return H - margin - y * scale; };  // world y points up

    std::map<int, const LayoutUav*> by_id;
    for (const auto& u : uavs) by_id[u.id] = &u;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(W) << "\" height=\""
        << px(H) << "\" viewBox=\"0 0 " << px(W) << ' ' << px(H)
        << "\" font-family=\"sans-serif\">\n"
        << "<rect width=\"" << px(W) << "\" height=\"" << px(H) << "\" fill=\"white\"/>\n"
        << "<text x=\"" << px(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << xml_escape(title) << "</text>\n"
        << "<rect x=\"" << px(sx(0)) << "\" y=\"" << px(sy(area.height_m)) << "\" width=\""
        << px(area.width_m * scale) << "\" height=\"" << px(area.height_m * scale)
        << "\" fill=\"#fafafa\" stroke=\"#333\"/>\n";

    for (const auto& u : uavs) {
        svg << "<circle cx=\"" << px(sx(u.pos.x)) << "\" cy=\"" << px(sy(u.pos.y)) << "\" r=\""
            << px(u.coverage_radius_m * scale)
            << "\" fill=\"#4a90d9\" fill-opacity=\"0.06\" stroke=\"#4a90d9\" "
               "stroke-opacity=\"0.25\"/>\n";
    }

    int color = 0;
    for (const auto& c : coalitions) {
        const char* col = kPalette[color % kPaletteSize];
        ++color;
        std::vector<Vec2> pts;
        for (int m : c.members) {
            auto it = by_id.find(m);
            if (it != by_id.end()) pts.push_back(it->second->pos);
        }
        svg << "<g class=\"hull\" stroke=\"" << col << "\" fill=\"" << col << "\">\n";
        const std::vector<Vec2> hull = convex_hull(pts);
        if (hull.size() >= 3) {
            svg << "  <polygon fill-opacity=\"0.12\" points=\"";
            for (const auto& p : hull) svg << px(sx(p.x)) << ',' << px(sy(p.y)) << ' ';
            svg << "\"/>\n";
        } else if (hull.size() == 2) {
            svg << "  <line stroke-width=\"2\" x1=\"" << px(sx(hull[0].x)) << "\" y1=\""
                << px(sy(hull[0].y)) << "\" x2=\"" << px(sx(hull[1].x)) << "\" y2=\""
                << px(sy(hull[1].y)) << "\"/>\n";
        } else if (hull.size() == 1) {
            svg << "  <circle fill-opacity=\"0.12\" cx=\"" << px(sx(hull[0].x)) << "\" cy=\""
                << px(sy(hull[0].y)) << "\" r=\"14\"/>\n";
        }
        if (!pts.empty()) {
            Vec2 centroid{0, 0};
            for (const auto& p : pts) {
                centroid.x += p.x;
                centroid.y += p.y;
            }
            centroid.x /= static_cast<double>(pts.size());
            centroid.y /= static_cast<double>(pts.size());
            svg << "  <text stroke=\"none\" x=\"" << px(sx(centroid.x)) << "\" y=\""
                << px(sy(centroid.y) - 8) << "\" font-size=\"11\" text-anchor=\"middle\">c"
                << c.id << (c.emergency ? "!" : "") << " ch" << c.channel << "</text>\n";
        }
        svg << "</g>\n";
    }

    for (const auto& c : coalitions) {
        for (int role = 0; role < 2; ++role) {
            const int leader = role == 0 ? c.ground_leader : c.task_leader;
            auto it = by_id.find(leader);
            if (it == by_id.end()) continue;
            const double x = sx(it->second->pos.x), y = sy(it->second->pos.y);
            if (role == 0) {
                svg << "<rect x=\"" << px(x - 6) << "\" y=\"" << px(y - 6)
                    << "\" width=\"12\" height=\"12\" fill=\"none\" stroke=\"#111\" "
                       "stroke-width=\"1.5\"/>\n";
            } else {
                svg << "<polygon fill=\"none\" stroke=\"#111\" stroke-width=\"1.5\" points=\""
                    << px(x) << ',' << px(y - 8) << ' ' << px(x + 8) << ',' << px(y) << ' '
                    << px(x) << ',' << px(y + 8) << ' ' << px(x - 8) << ',' << px(y) << "\"/>\n";
            }
        }
    }
    for (const auto& u : uavs) {
        svg << "<circle cx=\"" << px(sx(u.pos.x)) << "\" cy=\"" << px(sy(u.pos.y))
            << "\" r=\"3.5\" fill=\"" << (u.ground_link_quality > 0 ? "#111" : "#777")
            << "\"/>\n"
            << "<text x=\"" << px(sx(u.pos.x) + 6) << "\" y=\"" << px(sy(u.pos.y) - 5)
            << "\" font-size=\"10\" fill=\"#444\">" << u.id << "</text>\n";
    }
    if (uavs.empty()) {
        svg << "<text x=\"" << px(W / 2) << "\" y=\"" << px(H / 2)
            << "\" text-anchor=\"middle\" font-size=\"15\" fill=\"#888\">no data</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

namespace {

double to_double(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw ParseError(std::string(what) + ": bad number '" + s + "'");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError(std::string(what) + ": bad number '" + s + "'");
    }
}

std::string chart_from_metrics(const std::vector<std::vector<std::string>>& rows, PlotKind kind) {
    // columns: step(0) coverage(1) overhead(2) objective(3) ...
    std::vector<Series> series;
    if (kind == PlotKind::Convergence) {
        series.push_back({"objective", {}});
    } else {
        series.push_back({"coverage", {}});
        series.push_back({"overhead", {}});
        series.push_back({"objective", {}});
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() < 4) throw ParseError("metrics row " + std::to_string(i) + ": too short");
        const double step = to_double(r[0], "metrics.step");
        if (kind == PlotKind::Convergence) {
            series[0].points.push_back({step, to_double(r[3], "metrics.objective")});
        } else {
            series[0].points.push_back({step, to_double(r[1], "metrics.coverage")});
            series[1].points.push_back({step, to_double(r[2], "metrics.overhead")});
            series[2].points.push_back({step, to_double(r[3], "metrics.objective")});
        }
    }
    const bool convergence = kind == PlotKind::Convergence;
    return render_chart(convergence ? "Objective convergence" : "Task indices over time", "step",
                        convergence ? "global objective" : "value", series);
}

std::string chart_from_convergence(const std::vector<std::vector<std::string>>& rows) {
    // columns: algo(0) iteration(1) objective(2); one series per algo
    std::vector<Series> series;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() < 3) throw ParseError("convergence row " + std::to_string(i) + ": too short");
        auto [it, fresh] = index.try_emplace(r[0], series.size());
        if (fresh) series.push_back({r[0], {}});
        series[it->second].points.push_back(
            {to_double(r[1], "iteration"), to_double(r[2], "objective")});
    }
    return render_chart("Objective convergence by algorithm", "iteration", "global objective",
                        series);
}

std::string layout_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("final state: ") + e.what());
    }
    try {
        Rect area{j.at("area").at("width_m").get<double>(),
                  j.at("area").at("height_m").get<double>()};
        std::vector<LayoutUav> uavs;
        for (const auto& u : j.at("uavs")) {
            uavs.push_back({u.at("id").get<int>(),
                            {u.at("x").get<double>(), u.at("y").get<double>()},
                            u.at("coverage_radius_m").get<double>(),
                            u.at("ground_link_quality").get<double>()});
        }
        std::vector<LayoutCoalition> coalitions;
        for (const auto& c : j.at("coalitions")) {
            coalitions.push_back({c.at("id").get<int>(), c.at("members").get<std::vector<int>>(),
                                  c.at("ground_leader").get<int>(), c.at("task_leader").get<int>(),
                                  c.at("channel").get<int>(), c.at("emergency").get<bool>()});
        }
        const int step = j.at("step").get<int>();
        return render_layout(area, uavs, coalitions,
                             "Swarm layout at step " + std::to_string(step));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("final state: ") + e.what());
    }
}

}  // namespace

std::string emit_plot(const std::string& input_text, PlotKind kind) {
    const std::size_t first = input_text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && input_text[first] == '{') {
        if (kind != PlotKind::Layout) {
            throw ParseError("JSON input renders only the layout kind");
        }
        return layout_from_json(input_text);
    }
    if (kind == PlotKind::Layout) {
        throw ParseError("layout needs the final-state JSON as input");
    }
    const auto rows = parse_csv(input_text);
    if (rows.empty() || rows[0].empty()) throw ParseError("empty plot input");
    if (rows[0][0] == "step") return chart_from_metrics(rows, kind);
    if (rows[0][0] == "algo" && kind == PlotKind::Convergence) {
        return chart_from_convergence(rows);
    }
    throw ParseError("unrecognized plot input header '" + rows[0][0] + "'");
}

}  // namespace swarmsim
