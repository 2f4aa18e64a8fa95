#include "swarmsim/trace_io.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "swarmsim/csv.hpp"
#include "swarmsim/errors.hpp"

namespace swarmsim {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string join_ids(const std::vector<int>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(ids[i]);
    }
    return out;
}

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string metrics_csv(const std::vector<MetricsRecord>& metrics) {
    std::string out =
        "step,coverage,overhead,objective,n_coalitions,safety_msgs,fusion_msgs,inter_msgs,"
        "emergencies,accepted_moves\n";
    for (const auto& m : metrics) {
        out += std::to_string(m.step) + ',' + format_double(m.coverage) + ',' +
               format_double(m.overhead) + ',' + format_double(m.objective) + ',' +
               std::to_string(m.n_coalitions) + ',' + format_double(m.safety_msgs) + ',' +
               format_double(m.fusion_msgs) + ',' + format_double(m.inter_msgs) + ',' +
               std::to_string(m.emergencies) + ',' + std::to_string(m.accepted_moves) + '\n';
    }
    return out;
}

std::string events_csv(const std::vector<TraceEvent>& events) {
    std::string out = "step,kind,coalitions,uavs,note\n";
    for (const auto& e : events) {
        out += std::to_string(e.step) + ',' + event_kind_name(e.kind) + ',' +
               join_ids(e.coalitions) + ',' + join_ids(e.uavs) + ',' + csv_escape(e.note) + '\n';
    }
    return out;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::string out =
        "algo,seed,converged_at,final_objective,final_coverage,final_overhead,iterations_run\n";
    for (const auto& r : rows) {
        out += r.algo + ',' + std::to_string(r.seed) + ',' + std::to_string(r.converged_at) +
               ',' + format_double(r.final_objective) + ',' + format_double(r.final_coverage) +
               ',' + format_double(r.final_overhead) + ',' + std::to_string(r.iterations_run) +
               '\n';
    }
    return out;
}

std::string convergence_csv(
    const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    std::string out = "algo,iteration,objective\n";
    for (const auto& [algo, values] : series) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            out += algo + ',' + std::to_string(i) + ',' + format_double(values[i]) + '\n';
        }
    }
    return out;
}

std::string final_state_json(const WorldState& state, const Scenario& scenario) {
    ordered_json j;
    j["step"] = state.step;
    j["area"] = {{"width_m", scenario.area.width_m}, {"height_m", scenario.area.height_m}};
    j["uavs"] = ordered_json::array();
    for (const auto& [id, pos] : state.positions) {
        const UavSpec& spec = scenario.uav(id);
        j["uavs"].push_back({{"id", id},
                             {"x", pos.x},
                             {"y", pos.y},
                             {"coverage_radius_m", spec.coverage_radius_m},
                             {"ground_link_quality", spec.ground_link_quality}});
    }
    j["coalitions"] = ordered_json::array();
    for (const auto& [cid, c] : state.partition.coalitions) {
        j["coalitions"].push_back({{"id", cid},
                                   {"members", c.members},
                                   {"ground_leader", c.ground_leader},
                                   {"task_leader", c.task_leader},
                                   {"channel", c.channel},
                                   {"emergency", c.emergency}});
    }
    ordered_json primaries = ordered_json::object();
    for (const auto& [uav, cid] : state.partition.primary_of) {
        primaries[std::to_string(uav)] = cid;
    }
    j["primary_of"] = primaries;
    return j.dump(2) + "\n";
}

std::string run_manifest(const ManifestInfo& info) {
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(info.scenario_hash));
    const ActionOptions& o = info.config.options;
    std::ostringstream out;
    out << "artifact: swarmsim " << kArtifactVersion << '\n'
        << "command: " << info.command << '\n'
        << "scenario: " << info.scenario_name << '\n'
        << "scenario_hash: " << hash_hex << '\n'
        << "algo: " << info.algo << '\n'
        << "seed: " << info.seed << '\n'
        << "config: temperature0=" << format_double(info.config.temperature0)
        << " anneal_rate=" << format_double(info.config.anneal_rate)
        << " epsilon0=" << format_double(info.config.epsilon0)
        << " epsilon_decay=" << format_double(info.config.epsilon_decay)
        << " alpha=" << format_double(info.config.alpha)
        << " gamma=" << format_double(info.config.gamma)
        << " conv_window=" << info.config.conv_window
        << " conv_eps=" << format_double(info.config.conv_eps)
        << " moves=" << (o.allow_moves ? "on" : "off")
        << " new_coalition=" << (o.allow_new_coalition ? "on" : "off")
        << " overlap=" << (o.allow_overlap ? "on" : "off") << '\n'
        << "iterations_run: " << info.iterations_run << '\n'
        << "converged_at: " << info.converged_at << '\n';
    out << "files:";
    for (const auto& f : info.files) out << ' ' << f;
    out << '\n' << kTimestampPrefix << ' ' << utc_now() << '\n';
    return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ParseError("cannot write " + tmp.string());
        f << content;
        if (!f.good()) throw ParseError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace swarmsim
