/**
 * Task-driven objective (importance-weighted coverage minus transmission
 * overhead), marginal-contribution utilities, the coalition switch rule,
 * and the inter-coalition channel-selection game.
 */
#pragma once

#include <string>
#include <vector>

#include "swarmsim/coalition.hpp"
#include "swarmsim/rng.hpp"
#include "swarmsim/scenario.hpp"

namespace swarmsim {

enum class ActionKind { Stay, Move, SwitchPrimary, JoinSecondary, LeaveSecondary };

struct GameAction {
    ActionKind kind = ActionKind::Stay;
    int waypoint = -1;   // Move: compass direction 0..7 (E, NE, N, NW, W, SW, S, SE)
    int coalition = -1;  // Switch/Join/Leave target; kNewCoalition founds a singleton

    bool operator==(const GameAction&) const = default;
};

std::string action_name(const GameAction& a);

// Target of a compass move of step_m meters; direction indices as above.
Vec2 waypoint_target(const Vec2& from, int direction, double step_m);

struct ActionOptions {
    bool allow_moves = true;
    bool allow_new_coalition = true;
    bool allow_overlap = true;
};

struct GameContext {
    const Scenario& scenario;
    const std::vector<ImportanceField>& fields;
    const ImportanceGrid& grid;
};

// Canonical candidate set for one agent: Stay, in-bounds moves, primary
// switches (new coalition first, then ascending id), secondary joins,
// secondary leaves. Actions that would break the transceiver bound or leave
// the area never appear. The vector index is the action's ordinal.
std::vector<GameAction> candidate_actions(int agent, const PositionMap& positions,
                                          const PartitionState& partition, const GameContext& ctx,
                                          const ActionOptions& options = {});

// Mutates positions/partition in place; leaders are re-elected in every
// affected coalition.
void apply_action(int agent, const GameAction& a, PositionMap& positions,
                  PartitionState& partition, const GameContext& ctx, const EventSink& sink = {});

struct ObjectiveBreakdown {
    double coverage = 0.0;  // in [0,1]
    double overhead = 0.0;
    double objective = 0.0;  // w_cov * coverage - w_ovh * overhead
};

// Fraction of total cell importance whose cell center lies inside at least
// one coverage disk; 0 when the grid carries no weight.
double weighted_coverage(const PositionMap& positions, const Scenario& scenario,
                         const ImportanceGrid& grid);

// Relay cost of every membership: members pay their cheapest path to the
// ground leader, p_unreach when no path exists, and p_unreach each (leader
// included) when the coalition has no ground link at all.
double transmission_overhead(const PartitionState& partition, const PositionMap& positions,
                             const Scenario& scenario);

ObjectiveBreakdown global_objective(const PartitionState& partition, const PositionMap& positions,
                                    const ImportanceGrid& grid, const Scenario& scenario);

// Change in the global objective if the agent took this action: the
// marginal-contribution utility, so any unilateral improvement raises the
// global objective by exactly the same amount.
double marginal_utility(int agent, const GameAction& a, const PositionMap& positions,
                        const PartitionState& partition, const GameContext& ctx);
double marginal_utility(int agent, const GameAction& a, const PositionMap& positions,
                        const PartitionState& partition, const GameContext& ctx,
                        double objective_before);

enum class SwitchRule { BestResponse, LogLinear };

struct SwitchResult {
    bool accepted = false;  // state changed (BestResponse: improving action applied)
    GameAction action;      // what was applied (Stay when nothing was)
    double utility = 0.0;   // marginal utility of the applied action
};

// One decision by one agent. BestResponse applies the highest-utility
// candidate when its utility is strictly positive (ties: lowest ordinal).
// LogLinear samples from the Boltzmann distribution over candidates at the
// given temperature and applies the sample.
SwitchResult switch_step(int agent, PositionMap& positions, PartitionState& partition,
                         const GameContext& ctx, SwitchRule rule, double temperature, Rng& rng,
                         const ActionOptions& options = {}, const EventSink& sink = {});

// Boltzmann weights exp(u_i / temperature), normalized; max-shifted for
// numerical stability. Exposed for direct distribution checks.
std::vector<double> loglinear_distribution(const std::vector<double>& utilities,
                                           double temperature);

inline constexpr double kInterferenceEps = 1e-3;  // meters; floor for leader distance

// Pairwise interference between co-channel coalitions, 1/max(d,eps)^2 over
// ground-leader distance, summed over unordered pairs: the channel game's
// potential.
double total_same_channel_interference(const PartitionState& partition,
                                       const PositionMap& positions);

// Channel with minimal interference from the other coalitions' current
// channels; ties break toward the lowest index.
int channel_best_response(int coalition, const PartitionState& partition,
                          const PositionMap& positions, int channels);

// One sequential pass (ascending coalition id) of channel best responses,
// applied in place; returns how many coalitions changed channel. Zero
// changes certifies a pure Nash equilibrium.
int channel_round(PartitionState& partition, const PositionMap& positions, int channels);

}  // namespace swarmsim
