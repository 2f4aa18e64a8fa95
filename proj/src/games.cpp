#include "swarmsim/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swarmsim/radio.hpp"

namespace swarmsim {

namespace {

constexpr double kDiag = 0.7071067811865476;  // sqrt(1/2)

const Vec2 kCompass[8] = {
    {1, 0}, {kDiag, kDiag}, {0, 1}, {-kDiag, kDiag},
    {-1, 0}, {-kDiag, -kDiag}, {0, -1}, {kDiag, -kDiag},
};

}  // namespace

std::string action_name(const GameAction& a) {
    switch (a.kind) {
        case ActionKind::Stay: return "stay";
        case ActionKind::Move: return "move:" + std::to_string(a.waypoint);
        case ActionKind::SwitchPrimary:
            return a.coalition == kNewCoalition ? "switch:new"
                                                : "switch:" + std::to_string(a.coalition);
        case ActionKind::JoinSecondary: return "join:" + std::to_string(a.coalition);
        case ActionKind::LeaveSecondary: return "leave:" + std::to_string(a.coalition);
    }
    return "unknown";
}

Vec2 waypoint_target(const Vec2& from, int direction, double step_m) {
    const Vec2& d = kCompass[direction & 7];
    return {from.x + d.x * step_m, from.y + d.y * step_m};
}

std::vector<GameAction> candidate_actions(int agent, const PositionMap& positions,
                                          const PartitionState& partition, const GameContext& ctx,
                                          const ActionOptions& options) {
    const Scenario& s = ctx.scenario;
    const UavSpec& spec = s.uav(agent);
    const auto& memberships = partition.membership.at(agent);
    const int primary = partition.primary_of.at(agent);

    std::vector<GameAction> out;
    out.push_back({ActionKind::Stay, -1, -1});

    if (options.allow_moves) {
        const Vec2 here = positions.at(agent);
        for (int dir = 0; dir < 8; ++dir) {
            if (s.area.contains(waypoint_target(here, dir, spec.max_move_m))) {
                out.push_back({ActionKind::Move, dir, -1});
            }
        }
    }

    const bool primary_is_own_singleton = partition.coalition(primary).members.size() == 1;
    if (options.allow_new_coalition && !primary_is_own_singleton) {
        out.push_back({ActionKind::SwitchPrimary, -1, kNewCoalition});
    }
    for (const auto& [cid, c] : partition.coalitions) {
        if (cid != primary) out.push_back({ActionKind::SwitchPrimary, -1, cid});
    }
    if (options.allow_overlap &&
        static_cast<int>(memberships.size()) < spec.transceivers) {
        for (const auto& [cid, c] : partition.coalitions) {
            if (memberships.count(cid) == 0) out.push_back({ActionKind::JoinSecondary, -1, cid});
        }
    }
    for (int cid : memberships) {
        if (cid != primary) out.push_back({ActionKind::LeaveSecondary, -1, cid});
    }
    return out;
}

void apply_action(int agent, const GameAction& a, PositionMap& positions,
                  PartitionState& partition, const GameContext& ctx, const EventSink& sink) {
    switch (a.kind) {
        case ActionKind::Stay:
            return;
        case ActionKind::Move: {
            const Vec2 target =
                waypoint_target(positions.at(agent), a.waypoint, ctx.scenario.uav(agent).max_move_m);
            positions[agent] = ctx.scenario.area.clamp(target);
            // Importance under the agent moved: task leadership may shift.
            for (int cid : partition.membership.at(agent)) {
                reelect_leaders(partition, cid, positions, ctx.scenario, ctx.fields);
            }
            return;
        }
        case ActionKind::SwitchPrimary:
            switch_primary(partition, agent, a.coalition, positions, ctx.scenario, ctx.fields,
                           sink);
            return;
        case ActionKind::JoinSecondary:
            join(partition, agent, a.coalition, positions, ctx.scenario, ctx.fields, sink);
            return;
        case ActionKind::LeaveSecondary:
            leave(partition, agent, a.coalition, positions, ctx.scenario, ctx.fields, sink);
            return;
    }
}

double weighted_coverage(const PositionMap& positions, const Scenario& scenario,
                         const ImportanceGrid& grid) {
    if (grid.total <= 0.0) return 0.0;
    double covered = 0.0;
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const Vec2 center = grid.cell_center(ix, iy);
            for (const auto& [id, pos] : positions) {
                const double r = scenario.uav(id).coverage_radius_m;
                if (distance_sq(pos, center) <= r * r) {
                    covered += grid.at(ix, iy);
                    break;
                }
            }
        }
    }
    return covered / grid.total;
}

double transmission_overhead(const PartitionState& partition, const PositionMap& positions,
                             const Scenario& scenario) {
    double total = 0.0;
    for (const auto& [cid, c] : partition.coalitions) {
        // No ground link anywhere in the coalition: everyone's data is stuck.
        if (scenario.uav(c.ground_leader).ground_link_quality <= 0.0) {
            total += scenario.weights.p_unreach * static_cast<double>(c.members.size());
            continue;
        }
        for (int m : c.members) {
            if (m == c.ground_leader) continue;
            auto path = relay_path(m, c.ground_leader, c.members, positions, scenario);
            total += path ? path->cost : scenario.weights.p_unreach;
        }
    }
    return total;
}

ObjectiveBreakdown global_objective(const PartitionState& partition, const PositionMap& positions,
                                    const ImportanceGrid& grid, const Scenario& scenario) {
    ObjectiveBreakdown out;
    out.coverage = weighted_coverage(positions, scenario, grid);
    out.overhead = transmission_overhead(partition, positions, scenario);
    out.objective = scenario.weights.w_cov * out.coverage - scenario.weights.w_ovh * out.overhead;
    return out;
}

double marginal_utility(int agent, const GameAction& a, const PositionMap& positions,
                        const PartitionState& partition, const GameContext& ctx) {
    const ObjectiveBreakdown before = global_objective(partition, positions, ctx.grid, ctx.scenario);
    return marginal_utility(agent, a, positions, partition, ctx, before.objective);
}

double marginal_utility(int agent, const GameAction& a, const PositionMap& positions,
                        const PartitionState& partition, const GameContext& ctx,
                        double objective_before) {
    if (a.kind == ActionKind::Stay) return 0.0;
    PositionMap pos = positions;
    PartitionState part = partition;
    apply_action(agent, a, pos, part, ctx);
    const ObjectiveBreakdown after = global_objective(part, pos, ctx.grid, ctx.scenario);
    return after.objective - objective_before;
}

std::vector<double> loglinear_distribution(const std::vector<double>& utilities,
                                           double temperature) {
    const double t = std::max(temperature, 1e-12);
    const double peak = *std::max_element(utilities.begin(), utilities.end());
    std::vector<double> p(utilities.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < utilities.size(); ++i) {
        p[i] = std::exp((utilities[i] - peak) / t);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

SwitchResult switch_step(int agent, PositionMap& positions, PartitionState& partition,
                         const GameContext& ctx, SwitchRule rule, double temperature, Rng& rng,
                         const ActionOptions& options, const EventSink& sink) {
    const std::vector<GameAction> candidates =
        candidate_actions(agent, positions, partition, ctx, options);
    const double before =
        global_objective(partition, positions, ctx.grid, ctx.scenario).objective;

    std::vector<double> utility(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        utility[i] = marginal_utility(agent, candidates[i], positions, partition, ctx, before);
    }

    SwitchResult res;
    std::size_t pick = 0;
    if (rule == SwitchRule::BestResponse) {
        for (std::size_t i = 1; i < candidates.size(); ++i) {
            if (utility[i] > utility[pick]) pick = i;
        }
        if (utility[pick] <= 0.0) return res;  // Stay: keep the current state
    } else {
        const std::vector<double> p = loglinear_distribution(utility, temperature);
        const double draw = rng.uniform01();
        double acc = 0.0;
        pick = p.size() - 1;  // guard against round-off at the top end
        for (std::size_t i = 0; i < p.size(); ++i) {
            acc += p[i];
            if (draw < acc) {
                pick = i;
                break;
            }
        }
    }

    res.action = candidates[pick];
    res.utility = utility[pick];
    if (res.action.kind != ActionKind::Stay) {
        apply_action(agent, res.action, positions, partition, ctx, sink);
        res.accepted = true;
    }
    return res;
}

namespace {

double pair_interference(const Vec2& a, const Vec2& b) {
    const double d = std::max(distance(a, b), kInterferenceEps);
    return 1.0 / (d * d);
}

}  // namespace

double total_same_channel_interference(const PartitionState& partition,
                                       const PositionMap& positions) {
    double total = 0.0;
    for (auto it = partition.coalitions.begin(); it != partition.coalitions.end(); ++it) {
        for (auto jt = std::next(it); jt != partition.coalitions.end(); ++jt) {
            if (it->second.channel != jt->second.channel) continue;
            total += pair_interference(positions.at(it->second.ground_leader),
                                       positions.at(jt->second.ground_leader));
        }
    }
    return total;
}

int channel_best_response(int coalition, const PartitionState& partition,
                          const PositionMap& positions, int channels) {
    const Coalition& me = partition.coalition(coalition);
    const Vec2 my_leader = positions.at(me.ground_leader);
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int ch = 0; ch < channels; ++ch) {
        double cost = 0.0;
        for (const auto& [cid, other] : partition.coalitions) {
            if (cid == coalition || other.channel != ch) continue;
            cost += pair_interference(my_leader, positions.at(other.ground_leader));
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = ch;
        }
    }
    return best;
}

int channel_round(PartitionState& partition, const PositionMap& positions, int channels) {
    int changes = 0;
    for (auto& [cid, c] : partition.coalitions) {
        const int pick = channel_best_response(cid, partition, positions, channels);
        if (pick != c.channel) {
            c.channel = pick;
            ++changes;
        }
    }
    return changes;
}

}  // namespace swarmsim
