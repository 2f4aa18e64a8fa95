#include "swarmsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "swarmsim/errors.hpp"

namespace swarmsim {

using ordered_json = nlohmann::ordered_json;

const UavSpec& Scenario::uav(int id) const {
    auto it = uav_index_.find(id);
    if (it == uav_index_.end()) {
        throw ValidationError("uavs: unknown UAV id " + std::to_string(id));
    }
    return uavs[it->second];
}

std::vector<int> Scenario::uav_ids() const {
    std::vector<int> ids;
    ids.reserve(uavs.size());
    for (const auto& [id, idx] : uav_index_) ids.push_back(id);
    return ids;
}

void Scenario::reindex() {
    uav_index_.clear();
    for (size_t i = 0; i < uavs.size(); ++i) uav_index_[uavs[i].id] = i;
}

double importance_at(const std::vector<ImportanceField>& fields, Vec2 p) {
    double best = 0.0;
    for (const auto& f : fields) {
        const double d2 = distance_sq(p, f.center);
        const double w = f.peak * std::exp(-d2 / (2.0 * f.sigma_m * f.sigma_m));
        if (w > best) best = w;
    }
    return best;
}

std::optional<std::pair<int, int>> ImportanceGrid::cell_of(Vec2 p) const {
    if (cell_size_m <= 0.0) return std::nullopt;
    int ix = static_cast<int>(std::floor(p.x / cell_size_m));
    int iy = static_cast<int>(std::floor(p.y / cell_size_m));
    // Points on the high edge of the gridded region map to the last cell.
    if (ix == nx && p.x <= nx * cell_size_m) ix = nx - 1;
    if (iy == ny && p.y <= ny * cell_size_m) iy = ny - 1;
    if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return std::nullopt;
    return std::make_pair(ix, iy);
}

ImportanceGrid importance_grid(const Rect& area, double cell_size_m,
                               const std::vector<ImportanceField>& fields) {
    ImportanceGrid g;
    g.cell_size_m = cell_size_m;
    g.nx = static_cast<int>(std::floor(area.width_m / cell_size_m));
    g.ny = static_cast<int>(std::floor(area.height_m / cell_size_m));
    g.weights.assign(static_cast<size_t>(g.nx) * g.ny, 0.0);
    g.total = 0.0;
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const double w = importance_at(fields, g.cell_center(ix, iy));
            g.weights[static_cast<size_t>(iy) * g.nx + ix] = w;
            g.total += w;
        }
    }
    return g;
}

ImportanceGrid importance_grid(const Scenario& scenario) {
    return importance_grid(scenario.area, scenario.cell_size_m, scenario.fields);
}

namespace {

double require_number(const ordered_json& j, const std::string& key) {
    if (!j.contains(key)) throw ValidationError(key + ": missing");
    if (!j.at(key).is_number()) throw ValidationError(key + ": expected a number");
    return j.at(key).get<double>();
}

double number_or(const ordered_json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ValidationError(key + ": expected a number");
    return j.at(key).get<double>();
}

Vec2 parse_point(const ordered_json& j, const std::string& key) {
    if (!j.contains(key)) throw ValidationError(key + ": missing");
    const auto& p = j.at(key);
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw ValidationError(key + ": expected [x, y] in meters");
    }
    return {p[0].get<double>(), p[1].get<double>()};
}

ImportanceField parse_field(const ordered_json& j, const std::string& where) {
    ImportanceField f;
    f.center = parse_point(j, "center");
    f.sigma_m = require_number(j, "sigma_m");
    f.peak = require_number(j, "peak");
    if (f.sigma_m <= 0.0) throw ValidationError(where + ".sigma_m: must be > 0");
    if (!(f.peak > 0.0 && f.peak <= 1.0)) throw ValidationError(where + ".peak: must be in (0, 1]");
    return f;
}

TaskDirective parse_directive(const ordered_json& j, const std::string& where) {
    TaskDirective d;
    if (!j.contains("step") || !j.at("step").is_number_integer()) {
        throw ValidationError(where + ".step: expected an integer");
    }
    d.step = j.at("step").get<int>();
    if (d.step < 0) throw ValidationError(where + ".step: must be >= 0");
    const std::string kind = j.value("kind", "");
    if (kind == "add_field") {
        d.kind = DirectiveKind::AddField;
        if (!j.contains("field")) throw ValidationError(where + ".field: missing");
        d.field = parse_field(j.at("field"), where + ".field");
    } else if (kind == "remove_field") {
        d.kind = DirectiveKind::RemoveField;
        d.field_index = static_cast<int>(require_number(j, "index"));
    } else if (kind == "force_split") {
        d.kind = DirectiveKind::ForceSplit;
        d.coalition = static_cast<int>(require_number(j, "coalition"));
        if (!j.contains("members") || !j.at("members").is_array() || j.at("members").empty()) {
            throw ValidationError(where + ".members: expected a non-empty id array");
        }
        for (const auto& m : j.at("members")) d.members.push_back(m.get<int>());
    } else if (kind == "force_merge") {
        d.kind = DirectiveKind::ForceMerge;
        d.merge_a = static_cast<int>(require_number(j, "a"));
        d.merge_b = static_cast<int>(require_number(j, "b"));
    } else {
        throw ValidationError(where + ".kind: unknown directive kind \"" + kind + "\"");
    }
    return d;
}

ordered_json point_json(Vec2 p) { return ordered_json::array({p.x, p.y}); }

ordered_json field_json(const ImportanceField& f) {
    ordered_json j;
    j["center"] = point_json(f.center);
    j["sigma_m"] = f.sigma_m;
    j["peak"] = f.peak;
    return j;
}

ordered_json directive_json(const TaskDirective& d) {
    ordered_json j;
    j["step"] = d.step;
    switch (d.kind) {
        case DirectiveKind::AddField:
            j["kind"] = "add_field";
            j["field"] = field_json(d.field);
            break;
        case DirectiveKind::RemoveField:
            j["kind"] = "remove_field";
            j["index"] = d.field_index;
            break;
        case DirectiveKind::ForceSplit:
            j["kind"] = "force_split";
            j["coalition"] = d.coalition;
            j["members"] = d.members;
            break;
        case DirectiveKind::ForceMerge:
            j["kind"] = "force_merge";
            j["a"] = d.merge_a;
            j["b"] = d.merge_b;
            break;
    }
    return j;
}

}  // namespace

void validate_scenario(const Scenario& s) {
    if (s.area.width_m <= 0.0 || s.area.height_m <= 0.0) {
        throw ValidationError("area: width and height must be > 0");
    }
    if (s.cell_size_m <= 0.0) throw ValidationError("cell_size_m: must be > 0");
    if (s.max_steps < 0) throw ValidationError("max_steps: must be >= 0");
    if (s.channels < 1) throw ValidationError("channels: must be >= 1");
    if (s.uavs.empty()) throw ValidationError("uavs: at least one UAV required");
    if (s.weights.w_cov < 0.0) throw ValidationError("weights.w_cov: must be >= 0");
    if (s.weights.w_ovh < 0.0) throw ValidationError("weights.w_ovh: must be >= 0");
    if (s.weights.w_cov + s.weights.w_ovh <= 0.0) {
        throw ValidationError("weights: w_cov + w_ovh must be > 0");
    }
    if (s.weights.overhead_ref_m <= 0.0) throw ValidationError("weights.overhead_ref_m: must be > 0");
    if (s.weights.path_loss_exp < 1.0) throw ValidationError("weights.path_loss_exp: must be >= 1");
    if (s.weights.p_unreach < 0.0) throw ValidationError("weights.p_unreach: must be >= 0");
    if (!(s.emergency_theta >= 0.0 && s.emergency_theta <= 1.0)) {
        throw ValidationError("emergency_theta: must be in [0, 1]");
    }
    if (static_cast<int>(std::floor(s.area.width_m / s.cell_size_m)) < 1 ||
        static_cast<int>(std::floor(s.area.height_m / s.cell_size_m)) < 1) {
        throw ValidationError("cell_size_m: larger than the area");
    }

    std::set<int> seen_ids;
    for (size_t i = 0; i < s.uavs.size(); ++i) {
        const auto& u = s.uavs[i];
        const std::string where = "uavs[" + std::to_string(i) + "]";
        if (u.id < 0) throw ValidationError(where + ".id: must be >= 0");
        if (!seen_ids.insert(u.id).second) {
            throw ValidationError(where + ".id: duplicate id " + std::to_string(u.id));
        }
        if (!s.area.contains(u.start_pos)) {
            throw ValidationError(where + ".start_pos: outside area bounds");
        }
        if (u.coverage_radius_m <= 0.0) throw ValidationError(where + ".coverage_radius_m: must be > 0");
        if (u.comm_range_m <= 0.0) throw ValidationError(where + ".comm_range_m: must be > 0");
        if (u.transceivers < 1) throw ValidationError(where + ".transceivers: must be >= 1");
        if (!(u.ground_link_quality >= 0.0 && u.ground_link_quality <= 1.0)) {
            throw ValidationError(where + ".ground_link_quality: must be in [0, 1]");
        }
        if (u.relay_quota < 0) throw ValidationError(where + ".relay_quota: must be >= 0");
        if (u.max_move_m < 0.0) throw ValidationError(where + ".max_move_m: must be >= 0");
    }

    for (size_t i = 0; i < s.fields.size(); ++i) {
        const auto& f = s.fields[i];
        const std::string where = "fields[" + std::to_string(i) + "]";
        if (f.sigma_m <= 0.0) throw ValidationError(where + ".sigma_m: must be > 0");
        if (!(f.peak > 0.0 && f.peak <= 1.0)) throw ValidationError(where + ".peak: must be in (0, 1]");
    }

    for (size_t i = 0; i < s.directives.size(); ++i) {
        const auto& d = s.directives[i];
        const std::string where = "directives[" + std::to_string(i) + "]";
        if (d.step > s.max_steps) {
            throw ValidationError(where + ".step: exceeds max_steps");
        }
        if (i > 0 && s.directives[i - 1].step > d.step) {
            throw ValidationError(where + ".step: directives must be ordered by step");
        }
        if (d.kind == DirectiveKind::ForceSplit && d.members.empty()) {
            throw ValidationError(where + ".members: must be non-empty");
        }
    }
}

Scenario scenario_from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("scenario: top level must be an object");

    Scenario s;
    try {
        if (!j.contains("area")) throw ValidationError("area: missing");
        s.area.width_m = require_number(j.at("area"), "width_m");
        s.area.height_m = require_number(j.at("area"), "height_m");
        s.cell_size_m = require_number(j, "cell_size_m");
        if (!j.contains("max_steps") || !j.at("max_steps").is_number_integer()) {
            throw ValidationError("max_steps: expected an integer");
        }
        s.max_steps = j.at("max_steps").get<int>();
        if (!j.contains("seed") || !j.at("seed").is_number_unsigned()) {
            throw ValidationError("seed: expected a non-negative integer");
        }
        s.seed = j.at("seed").get<uint64_t>();
        s.channels = static_cast<int>(require_number(j, "channels"));
        s.emergency_theta = number_or(j, "emergency_theta", 0.1);

        if (!j.contains("weights")) throw ValidationError("weights: missing");
        const auto& w = j.at("weights");
        s.weights.w_cov = require_number(w, "w_cov");
        s.weights.w_ovh = require_number(w, "w_ovh");
        s.weights.overhead_ref_m = require_number(w, "overhead_ref_m");
        s.weights.path_loss_exp = require_number(w, "path_loss_exp");
        s.weights.p_unreach = number_or(w, "p_unreach", 10.0);

        s.fields.clear();
        for (size_t i = 0; j.contains("fields") && i < j.at("fields").size(); ++i) {
            s.fields.push_back(parse_field(j.at("fields")[i], "fields[" + std::to_string(i) + "]"));
        }

        if (!j.contains("uavs") || !j.at("uavs").is_array()) {
            throw ValidationError("uavs: expected an array");
        }
        for (size_t i = 0; i < j.at("uavs").size(); ++i) {
            const auto& uj = j.at("uavs")[i];
            const std::string where = "uavs[" + std::to_string(i) + "]";
            UavSpec u;
            u.id = static_cast<int>(require_number(uj, "id"));
            u.start_pos = parse_point(uj, "start_pos");
            u.coverage_radius_m = require_number(uj, "coverage_radius_m");
            u.comm_range_m = require_number(uj, "comm_range_m");
            u.transceivers = static_cast<int>(require_number(uj, "transceivers"));
            u.ground_link_quality = require_number(uj, "ground_link_quality");
            u.relay_quota = static_cast<int>(number_or(uj, "relay_quota", 2.0));
            u.max_move_m = number_or(uj, "max_move_m", 250.0);
            s.uavs.push_back(u);
        }

        for (size_t i = 0; j.contains("directives") && i < j.at("directives").size(); ++i) {
            s.directives.push_back(
                parse_directive(j.at("directives")[i], "directives[" + std::to_string(i) + "]"));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }

    validate_scenario(s);
    s.reindex();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("scenario: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return scenario_from_json_text(buf.str());
}

std::string scenario_to_json_text(const Scenario& s) {
    ordered_json j;
    j["area"] = {{"width_m", s.area.width_m}, {"height_m", s.area.height_m}};
    j["cell_size_m"] = s.cell_size_m;
    j["max_steps"] = s.max_steps;
    j["seed"] = s.seed;
    j["channels"] = s.channels;
    j["emergency_theta"] = s.emergency_theta;
    j["weights"] = {{"w_cov", s.weights.w_cov},
                    {"w_ovh", s.weights.w_ovh},
                    {"overhead_ref_m", s.weights.overhead_ref_m},
                    {"path_loss_exp", s.weights.path_loss_exp},
                    {"p_unreach", s.weights.p_unreach}};
    j["fields"] = ordered_json::array();
    for (const auto& f : s.fields) j["fields"].push_back(field_json(f));
    j["uavs"] = ordered_json::array();
    for (const auto& u : s.uavs) {
        ordered_json uj;
        uj["id"] = u.id;
        uj["start_pos"] = point_json(u.start_pos);
        uj["coverage_radius_m"] = u.coverage_radius_m;
        uj["comm_range_m"] = u.comm_range_m;
        uj["transceivers"] = u.transceivers;
        uj["ground_link_quality"] = u.ground_link_quality;
        uj["relay_quota"] = u.relay_quota;
        uj["max_move_m"] = u.max_move_m;
        j["uavs"].push_back(uj);
    }
    j["directives"] = ordered_json::array();
    for (const auto& d : s.directives) j["directives"].push_back(directive_json(d));
    return j.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("scenario: cannot write " + path);
    out << scenario_to_json_text(s);
}

}  // namespace swarmsim
