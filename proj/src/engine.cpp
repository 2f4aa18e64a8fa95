#include "swarmsim/engine.hpp"

#include <algorithm>
#include <string>

#include "swarmsim/errors.hpp"
#include "swarmsim/radio.hpp"

namespace swarmsim {

WorldState initialize(const Scenario& scenario) {
    WorldState st;
    st.fields = scenario.fields;
    st.grid = importance_grid(scenario.area, scenario.cell_size_m, st.fields);
    st.rng = Rng(scenario.seed);

    int max_id = -1;
    for (const auto& u : scenario.uavs) {
        st.positions[u.id] = u.start_pos;
        Coalition c;
        c.id = u.id;
        c.members = {u.id};
        c.ground_leader = u.id;
        c.task_leader = u.id;
        c.channel = 0;
        c.emergency = u.ground_link_quality <= 0.0;
        st.partition.coalitions[c.id] = c;
        st.partition.membership[u.id] = {u.id};
        st.partition.primary_of[u.id] = u.id;
        max_id = std::max(max_id, u.id);
    }
    st.partition.next_coalition_id = max_id + 1;
    return st;
}

void apply_directive(WorldState& state, const TaskDirective& d, const Scenario& scenario,
                     const EventSink& sink) {
    switch (d.kind) {
        case DirectiveKind::AddField:
            state.fields.push_back(d.field);
            break;
        case DirectiveKind::RemoveField:
            if (d.field_index < 0 || d.field_index >= static_cast<int>(state.fields.size())) {
                sink.emit(EventKind::DirectiveRejected, {}, {},
                          "remove_field: index " + std::to_string(d.field_index) +
                              " out of range");
                return;
            }
            state.fields.erase(state.fields.begin() + d.field_index);
            break;
        case DirectiveKind::ForceSplit: {
            if (!state.partition.has_coalition(d.coalition)) {
                sink.emit(EventKind::DirectiveRejected, {d.coalition}, {},
                          "force_split: unknown coalition");
                return;
            }
            try {
                std::set<int> subset(d.members.begin(), d.members.end());
                split(state.partition, d.coalition, subset, state.positions, scenario,
                      state.fields, sink);
            } catch (const PartitionError& e) {
                sink.emit(EventKind::DirectiveRejected, {d.coalition}, d.members, e.what());
            }
            return;
        }
        case DirectiveKind::ForceMerge: {
            if (d.merge_a == d.merge_b || !state.partition.has_coalition(d.merge_a) ||
                !state.partition.has_coalition(d.merge_b)) {
                sink.emit(EventKind::DirectiveRejected, {d.merge_a, d.merge_b}, {},
                          "force_merge: invalid coalition pair");
                return;
            }
            merge(state.partition, d.merge_a, d.merge_b, state.positions, scenario, state.fields,
                  sink);
            return;
        }
    }

    // Field set changed: refresh the grid and re-elect task leaders, whose
    // standing depends on the importance landscape.
    state.grid = importance_grid(scenario.area, scenario.cell_size_m, state.fields);
    for (const auto& [cid, c] : state.partition.coalitions) {
        reelect_leaders(state.partition, cid, state.positions, scenario, state.fields);
    }
    sink.emit(d.kind == DirectiveKind::AddField ? EventKind::AddField : EventKind::RemoveField, {},
              {}, "n_fields=" + std::to_string(state.fields.size()));
}

MetricsRecord step(WorldState& state, const Scenario& scenario, const LearnerConfig& config,
                   std::vector<TraceEvent>& events) {
    const EventSink sink{state.step, &events};

    // Phase 1: scripted directives due this step.
    while (state.next_directive < scenario.directives.size() &&
           scenario.directives[state.next_directive].step == state.step) {
        apply_directive(state, scenario.directives[state.next_directive], scenario, sink);
        ++state.next_directive;
    }

    // Phase 2: emergency checks, then the queued merges they requested.
    int emergencies = 0;
    std::vector<std::pair<int, int>> merge_queue;
    for (const auto& [cid, c] : state.partition.coalitions) {
        const EmergencyCheck chk = check_emergency(state.partition, cid, scenario.emergency_theta,
                                                   state.positions, scenario, sink);
        if (chk.emergency) ++emergencies;
        if (chk.merge_with) merge_queue.emplace_back(cid, *chk.merge_with);
    }
    for (const auto& [from, to] : merge_queue) {
        if (!state.partition.has_coalition(from) || !state.partition.has_coalition(to)) continue;
        merge(state.partition, from, to, state.positions, scenario, state.fields, sink);
    }

    // Phase 3: one learning iteration.
    const GameContext ctx{scenario, state.fields, state.grid};
    const IterationResult ir =
        learning_iteration(state.positions, state.partition, ctx, state.learner, config,
                           state.rng, sink);

    // Phase 4: one sequential channel best-response round.
    channel_round(state.partition, state.positions, scenario.channels);

    // Phase 5: traffic accounting.
    const TrafficTotals traffic = account_traffic(state.partition, state.positions, scenario);

    // Phase 6: metrics.
    MetricsRecord rec;
    rec.step = state.step;
    rec.coverage = ir.objective.coverage;
    rec.overhead = ir.objective.overhead;
    rec.objective = ir.objective.objective;
    rec.n_coalitions = static_cast<int>(state.partition.coalitions.size());
    rec.safety_msgs = traffic.safety;
    rec.fusion_msgs = traffic.fusion;
    rec.inter_msgs = traffic.share;
    rec.emergencies = emergencies;
    rec.accepted_moves = ir.accepted_moves;

    validate_partition(state.partition, scenario);
    ++state.step;
    return rec;
}

Trace run(const Scenario& scenario, const LearnerConfig& config) {
    Trace out;
    WorldState st = initialize(scenario);
    init_learner(st.learner, config);

    std::vector<double> history;
    int limit = scenario.max_steps;
    for (int t = 0; t < limit; ++t) {
        out.metrics.push_back(step(st, scenario, config, out.events));
        history.push_back(out.metrics.back().objective);
        if (!out.converged_at) {
            out.converged_at = detect_convergence(history, config.conv_window, config.conv_eps);
            if (out.converged_at) {
                limit = std::min(scenario.max_steps,
                                 static_cast<int>(history.size()) + config.conv_window);
            }
        }
    }
    out.iterations_run = static_cast<int>(out.metrics.size());
    out.final = std::move(st);
    return out;
}

}  // namespace swarmsim
