/**
 * Deterministic time-stepped simulation loop: scripted directives, emergency
 * handling, one learning iteration and channel round per step, traffic
 * accounting, and trace collection.
 */
#pragma once

#include <optional>
#include <vector>

#include "swarmsim/learning.hpp"

namespace swarmsim {

struct WorldState {
    int step = 0;
    PositionMap positions;
    PartitionState partition;
    std::vector<ImportanceField> fields;  // active set; directives mutate it
    ImportanceGrid grid;                  // rebuilt whenever fields change
    LearnerState learner;
    Rng rng;
    std::size_t next_directive = 0;
};

struct MetricsRecord {
    int step = 0;
    double coverage = 0.0;
    double overhead = 0.0;
    double objective = 0.0;
    int n_coalitions = 0;
    double safety_msgs = 0.0;
    double fusion_msgs = 0.0;
    double inter_msgs = 0.0;
    int emergencies = 0;
    int accepted_moves = 0;
};

struct Trace {
    std::vector<MetricsRecord> metrics;
    std::vector<TraceEvent> events;
    std::optional<int> converged_at;
    int iterations_run = 0;
    WorldState final;
};

// Start state: everyone at start_pos in their own singleton coalition
// (coalition id = UAV id), leaders elected, RNG seeded from the scenario.
WorldState initialize(const Scenario& scenario);

// Executes one scripted directive against the world; invalid directives emit
// a rejection event and change nothing.
void apply_directive(WorldState& state, const TaskDirective& d, const Scenario& scenario,
                     const EventSink& sink);

// One step, phases in fixed order: due directives, emergency checks plus
// queued merges, one learning iteration, one channel round, traffic
// accounting, metrics. Increments state.step.
MetricsRecord step(WorldState& state, const Scenario& scenario, const LearnerConfig& config,
                   std::vector<TraceEvent>& events);

// Runs min(max_steps, convergence point + conv_window) steps. Pure with
// respect to the file system; exporting traces is a separate concern.
Trace run(const Scenario& scenario, const LearnerConfig& config);

}  // namespace swarmsim
