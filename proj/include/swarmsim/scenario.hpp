/**
 * World description: mission area, radial importance fields, UAV roster,
 * scripted ground-controller directives, and game weights. A Scenario is
 * immutable after load and shared read-only across runs.
 */
#ifndef SWARMSIM_SCENARIO_HPP
#define SWARMSIM_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swarmsim/geometry.hpp"

namespace swarmsim {

// Isotropic Gaussian importance bump: peak at center, decaying radially.
struct ImportanceField {
    Vec2 center;
    double sigma_m = 2500.0;
    double peak = 1.0;

    friend bool operator==(const ImportanceField& a, const ImportanceField& b) {
        return a.center == b.center && a.sigma_m == b.sigma_m && a.peak == b.peak;
    }
};

struct UavSpec {
    int id = 0;
    Vec2 start_pos;
    double coverage_radius_m = 1500.0;
    double comm_range_m = 3000.0;
    int transceivers = 2;               // max simultaneous coalition memberships
    double ground_link_quality = 0.0;   // 0 = no backhaul hardware
    int relay_quota = 2;
    double max_move_m = 250.0;          // per-step move distance, 0 disables movement

    friend bool operator==(const UavSpec& a, const UavSpec& b) {
        return a.id == b.id && a.start_pos == b.start_pos &&
               a.coverage_radius_m == b.coverage_radius_m && a.comm_range_m == b.comm_range_m &&
               a.transceivers == b.transceivers && a.ground_link_quality == b.ground_link_quality &&
               a.relay_quota == b.relay_quota && a.max_move_m == b.max_move_m;
    }
};

enum class DirectiveKind { AddField, RemoveField, ForceSplit, ForceMerge };

struct TaskDirective {
    int step = 0;
    DirectiveKind kind = DirectiveKind::AddField;

    ImportanceField field;          // AddField
    int field_index = 0;            // RemoveField: index into the active field list
    int coalition = 0;              // ForceSplit
    std::vector<int> members;       // ForceSplit: the splitting subset
    int merge_a = 0, merge_b = 0;   // ForceMerge

    friend bool operator==(const TaskDirective& a, const TaskDirective& b) {
        return a.step == b.step && a.kind == b.kind && a.field == b.field &&
               a.field_index == b.field_index && a.coalition == b.coalition &&
               a.members == b.members && a.merge_a == b.merge_a && a.merge_b == b.merge_b;
    }
};

struct GameWeights {
    double w_cov = 1.0;
    double w_ovh = 0.1;
    double overhead_ref_m = 1000.0;  // normalizing distance for hop costs and link quality
    double path_loss_exp = 2.0;
    double p_unreach = 10.0;         // penalty for a member whose data cannot reach ground

    friend bool operator==(const GameWeights& a, const GameWeights& b) {
        return a.w_cov == b.w_cov && a.w_ovh == b.w_ovh && a.overhead_ref_m == b.overhead_ref_m &&
               a.path_loss_exp == b.path_loss_exp && a.p_unreach == b.p_unreach;
    }
};

struct Scenario {
    Rect area{10000.0, 10000.0};
    std::vector<ImportanceField> fields;
    std::vector<UavSpec> uavs;
    std::vector<TaskDirective> directives;   // ordered by step
    GameWeights weights;
    int channels = 3;
    double cell_size_m = 250.0;
    int max_steps = 400;
    uint64_t seed = 0;
    double emergency_theta = 0.1;

    const UavSpec& uav(int id) const;
    bool has_uav(int id) const { return uav_index_.count(id) != 0; }
    std::vector<int> uav_ids() const;

    // Rebuilds the id lookup; called by the loader and after programmatic edits.
    void reindex();

    friend bool operator==(const Scenario& a, const Scenario& b) {
        return a.area == b.area && a.fields == b.fields && a.uavs == b.uavs &&
               a.directives == b.directives && a.weights == b.weights &&
               a.channels == b.channels && a.cell_size_m == b.cell_size_m &&
               a.max_steps == b.max_steps && a.seed == b.seed &&
               a.emergency_theta == b.emergency_theta;
    }

private:
    std::map<int, size_t> uav_index_;
};

// One weight per cell, row-major, evaluated at cell centers. Final partial
// cells beyond floor(area/cell_size) are dropped.
struct ImportanceGrid {
    int nx = 0;
    int ny = 0;
    double cell_size_m = 0.0;
    std::vector<double> weights;  // nx * ny, index = iy * nx + ix
    double total = 0.0;

    double at(int ix, int iy) const { return weights[static_cast<size_t>(iy) * nx + ix]; }
    Vec2 cell_center(int ix, int iy) const {
        return {(ix + 0.5) * cell_size_m, (iy + 0.5) * cell_size_m};
    }
    std::optional<std::pair<int, int>> cell_of(Vec2 p) const;
};

// Max over fields of peak * exp(-|p-center|^2 / (2 sigma^2)); 0 for an empty set.
double importance_at(const std::vector<ImportanceField>& fields, Vec2 p);

ImportanceGrid importance_grid(const Rect& area, double cell_size_m,
                               const std::vector<ImportanceField>& fields);
ImportanceGrid importance_grid(const Scenario& scenario);

// Throws ParseError on malformed files, ValidationError (naming the field) on
// invariant violations.
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text);

// Canonical JSON rendering; load(save(s)) round-trips to an identical Scenario.
std::string scenario_to_json_text(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

void validate_scenario(const Scenario& s);

}  // namespace swarmsim

#endif  // SWARMSIM_SCENARIO_HPP
