#include "swarmsim/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace swarmsim {

const char* algo_name(Algo a) {
    switch (a) {
        case Algo::BestResponse: return "best-response";
        case Algo::LogLinear: return "log-linear";
        case Algo::QLearning: return "q-learning";
    }
    return "unknown";
}

std::optional<Algo> parse_algo(std::string_view name) {
    if (name == "best-response") return Algo::BestResponse;
    if (name == "log-linear") return Algo::LogLinear;
    if (name == "q-learning") return Algo::QLearning;
    return std::nullopt;
}

QKey qkey(int agent, const PositionMap& positions, const PartitionState& partition,
          const Scenario& scenario) {
    const Vec2 pos = positions.at(agent);
    QKey k;
    k.cell_x = static_cast<int>(pos.x / scenario.cell_size_m);
    k.cell_y = static_cast<int>(pos.y / scenario.cell_size_m);
    k.memberships = static_cast<int>(partition.membership.at(agent).size());
    const int primary = partition.primary_of.at(agent);
    k.primary_size =
        std::min(8, static_cast<int>(partition.coalition(primary).members.size()));
    return k;
}

void init_learner(LearnerState& s, const LearnerConfig& c) {
    s.temperature = c.temperature0;
    s.epsilon = c.epsilon0;
    s.iteration = 0;
    s.tables.clear();
}

std::vector<int> schedule_agents(int n_agents, Rng& rng) {
    std::vector<int> order(n_agents);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    return order;
}

namespace {

void q_learning_step(int agent, PositionMap& positions, PartitionState& partition,
                     const GameContext& ctx, LearnerState& learner, const LearnerConfig& config,
                     Rng& rng, const EventSink& sink, IterationResult& result) {
    const std::vector<GameAction> candidates =
        candidate_actions(agent, positions, partition, ctx, config.options);
    const QKey s = qkey(agent, positions, partition, ctx.scenario);
    QTable& table = learner.tables[agent];

    std::size_t pick = 0;
    if (rng.uniform01() < learner.epsilon) {
        pick = static_cast<std::size_t>(rng.bounded(candidates.size()));
    } else {
        for (std::size_t i = 1; i < candidates.size(); ++i) {
            if (table.get(s, static_cast<int>(i)) > table.get(s, static_cast<int>(pick))) pick = i;
        }
    }

    const double before =
        global_objective(partition, positions, ctx.grid, ctx.scenario).objective;
    apply_action(agent, candidates[pick], positions, partition, ctx, sink);
    const double after =
        global_objective(partition, positions, ctx.grid, ctx.scenario).objective;
    const double reward = after - before;

    const QKey s2 = qkey(agent, positions, partition, ctx.scenario);
    const std::vector<GameAction> next_candidates =
        candidate_actions(agent, positions, partition, ctx, config.options);
    double best_next = 0.0;
    for (std::size_t i = 0; i < next_candidates.size(); ++i) {
        best_next = std::max(best_next, table.get(s2, static_cast<int>(i)));
    }
    const double old = table.get(s, static_cast<int>(pick));
    table.set(s, static_cast<int>(pick),
              (1.0 - config.alpha) * old + config.alpha * (reward + config.gamma * best_next));

    if (candidates[pick].kind != ActionKind::Stay) ++result.accepted_moves;
}

}  // namespace

IterationResult learning_iteration(PositionMap& positions, PartitionState& partition,
                                   const GameContext& ctx, LearnerState& learner,
                                   const LearnerConfig& config, Rng& rng, const EventSink& sink) {
    const std::vector<int> ids = ctx.scenario.uav_ids();
    const std::vector<int> order = schedule_agents(static_cast<int>(ids.size()), rng);

    IterationResult result;
    for (int idx : order) {
        const int agent = ids[static_cast<std::size_t>(idx)];
        if (config.algo == Algo::QLearning) {
            q_learning_step(agent, positions, partition, ctx, learner, config, rng, sink, result);
        } else {
            const SwitchRule rule = config.algo == Algo::BestResponse ? SwitchRule::BestResponse
                                                                      : SwitchRule::LogLinear;
            const SwitchResult r = switch_step(agent, positions, partition, ctx, rule,
                                               learner.temperature, rng, config.options, sink);
            if (r.accepted) ++result.accepted_moves;
        }
    }
    learner.temperature *= config.anneal_rate;
    learner.epsilon *= config.epsilon_decay;
    ++learner.iteration;
    result.objective = global_objective(partition, positions, ctx.grid, ctx.scenario);
    return result;
}

std::optional<int> detect_convergence(const std::vector<double>& history, int window,
                                      double conv_eps) {
    const int n = static_cast<int>(history.size());
    for (int i = 0; i + window < n; ++i) {
        double lo = history[static_cast<std::size_t>(i)];
        double hi = lo;
        for (int j = i + 1; j <= i + window; ++j) {
            lo = std::min(lo, history[static_cast<std::size_t>(j)]);
            hi = std::max(hi, history[static_cast<std::size_t>(j)]);
        }
        if (hi - lo <= conv_eps * std::max(1.0, std::abs(history[static_cast<std::size_t>(i)]))) {
            return i;
        }
    }
    return std::nullopt;
}

namespace {

double quantile(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double idx = p * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace

std::vector<ComparisonSummary> summarize_comparison(const std::vector<ComparisonRow>& rows) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_algo;
    for (const auto& r : rows) {
        by_algo[r.algo].first.push_back(static_cast<double>(r.converged_at));
        by_algo[r.algo].second.push_back(r.final_objective);
    }
    std::vector<ComparisonSummary> out;
    for (const auto& [algo, series] : by_algo) {
        ComparisonSummary s;
        s.algo = algo;
        s.median_converged_at = quantile(series.first, 0.5);
        s.iqr_converged_at = quantile(series.first, 0.75) - quantile(series.first, 0.25);
        s.median_final_objective = quantile(series.second, 0.5);
        s.iqr_final_objective = quantile(series.second, 0.75) - quantile(series.second, 0.25);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace swarmsim
