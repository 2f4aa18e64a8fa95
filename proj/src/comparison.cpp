#include <algorithm>

#include "swarmsim/engine.hpp"
#include "swarmsim/learning.hpp"

namespace swarmsim {

namespace {

ComparisonRow run_cell(const Scenario& scenario, const LearnerConfig& config) {
    const Trace tr = run(scenario, config);
    ComparisonRow row;
    row.algo = algo_name(config.algo);
    row.seed = scenario.seed;
    row.iterations_run = tr.iterations_run;
    row.converged_at = tr.converged_at.value_or(tr.iterations_run);
    if (!tr.metrics.empty()) {
        const MetricsRecord& last = tr.metrics.back();
        row.final_objective = last.objective;
        row.final_coverage = last.coverage;
        row.final_overhead = last.overhead;
    } else {
        const ObjectiveBreakdown b = global_objective(tr.final.partition, tr.final.positions,
                                                      tr.final.grid, scenario);
        row.final_objective = b.objective;
        row.final_coverage = b.coverage;
        row.final_overhead = b.overhead;
    }
    return row;
}

}  // namespace

std::vector<ComparisonRow> run_comparison(const Scenario& scenario, const std::vector<Algo>& algos,
                                          int n_seeds, const LearnerConfig& base_config) {
    std::vector<ComparisonRow> rows;
    for (Algo algo : algos) {
        for (int i = 0; i < n_seeds; ++i) {
            Scenario cell = scenario;
            cell.seed = scenario.seed + static_cast<std::uint64_t>(i);
            LearnerConfig config = base_config;
            config.algo = algo;
            rows.push_back(run_cell(cell, config));
        }
    }
    std::sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
        if (a.algo != b.algo) return a.algo < b.algo;
        return a.seed < b.seed;
    });
    return rows;
}

}  // namespace swarmsim
