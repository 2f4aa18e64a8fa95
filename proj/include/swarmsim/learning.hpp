/**
 * Multi-agent dynamics over the coalition game: best-response and log-linear
 * schedulers, a tabular Q-learning baseline, annealing, convergence
 * detection, and the algorithm-comparison harness.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swarmsim/games.hpp"

namespace swarmsim {

enum class Algo { BestResponse, LogLinear, QLearning };

const char* algo_name(Algo a);
std::optional<Algo> parse_algo(std::string_view name);

struct LearnerConfig {
    Algo algo = Algo::BestResponse;
    double temperature0 = 0.5;
    double anneal_rate = 0.98;
    double epsilon0 = 0.3;
    double epsilon_decay = 0.995;
    double alpha = 0.3;   // Q-learning rate
    double gamma = 0.9;   // Q-learning discount
    int conv_window = 10;
    double conv_eps = 1e-3;
    ActionOptions options;
};

// Discretized local state: occupied grid cell plus a membership signature.
// Coalition ids are deliberately absent — they are not stable across merges.
struct QKey {
    int cell_x = 0;
    int cell_y = 0;
    int memberships = 0;
    int primary_size = 0;  // capped, see qkey()

    auto operator<=>(const QKey&) const = default;
};

QKey qkey(int agent, const PositionMap& positions, const PartitionState& partition,
          const Scenario& scenario);

class QTable {
public:
    double get(const QKey& s, int action) const {
        auto it = values_.find({s, action});
        return it == values_.end() ? 0.0 : it->second;
    }
    void set(const QKey& s, int action, double v) { values_[{s, action}] = v; }
    std::size_t size() const { return values_.size(); }

private:
    std::map<std::pair<QKey, int>, double> values_;
};

struct LearnerState {
    double temperature = 0.5;
    double epsilon = 0.3;
    int iteration = 0;
    std::map<int, QTable> tables;  // per agent; used by QLearning only
};

void init_learner(LearnerState& s, const LearnerConfig& c);

// Random activation order for one iteration: a permutation of 0..n-1.
std::vector<int> schedule_agents(int n_agents, Rng& rng);

struct IterationResult {
    ObjectiveBreakdown objective;  // after the iteration
    int accepted_moves = 0;
};

// One full pass: every agent acts once in a shuffled order, then temperature
// and epsilon anneal. BestResponse/LogLinear act through switch_step;
// QLearning acts epsilon-greedily on its table and updates it with the
// realized marginal utility as reward.
IterationResult learning_iteration(PositionMap& positions, PartitionState& partition,
                                   const GameContext& ctx, LearnerState& learner,
                                   const LearnerConfig& config, Rng& rng,
                                   const EventSink& sink = {});

// First index i where the window history[i..i+W] (inclusive) spans at most
// conv_eps * max(1, |history[i]|); nullopt when no window qualifies yet.
std::optional<int> detect_convergence(const std::vector<double>& history, int window,
                                      double conv_eps);

struct ComparisonRow {
    std::string algo;
    std::uint64_t seed = 0;
    int converged_at = 0;  // iterations_run when convergence never fired
    double final_objective = 0.0;
    double final_coverage = 0.0;
    double final_overhead = 0.0;
    int iterations_run = 0;
};

struct ComparisonSummary {
    std::string algo;
    double median_converged_at = 0.0;
    double iqr_converged_at = 0.0;
    double median_final_objective = 0.0;
    double iqr_final_objective = 0.0;
};

// Full-engine run per (algo, seed) cell with seeds scenario.seed + 0..n-1;
// rows sorted by (algo, seed).
std::vector<ComparisonRow> run_comparison(const Scenario& scenario, const std::vector<Algo>& algos,
                                          int n_seeds, const LearnerConfig& base_config = {});

std::vector<ComparisonSummary> summarize_comparison(const std::vector<ComparisonRow>& rows);

}  // namespace swarmsim
