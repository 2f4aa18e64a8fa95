#include <doctest.h>

#include <swarmsim/engine.hpp>
#include <swarmsim/games.hpp>

#include "helpers.hpp"

#include <cmath>
#include <set>

using namespace swarmsim;
using testutil::make_scenario;
using testutil::make_uav;

namespace {

PositionMap start_positions(const Scenario& s) {
    PositionMap pos;
    for (const auto& u : s.uavs) pos[u.id] = u.start_pos;
    return pos;
}

// independently written per-cell coverage oracle
double coverage_oracle(const PositionMap& positions, const Scenario& s,
                       const ImportanceGrid& grid) {
    double total = 0.0, covered = 0.0;
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double w = grid.at(ix, iy);
            total += w;
            bool hit = false;
            for (const auto& [id, p] : positions) {
                if (distance(p, grid.cell_center(ix, iy)) <= s.uav(id).coverage_radius_m)
                    hit = true;
            }
            if (hit) covered += w;
        }
    }
    return total > 0.0 ? covered / total : 0.0;
}

} // namespace

TEST_CASE("candidate actions come in canonical order") {
    Scenario s = make_scenario({make_uav(0, 5000, 5000, 0.9), make_uav(1, 6000, 5000, 0.5)});
    PositionMap pos = start_positions(s);
    WorldState w = initialize(s);
    GameContext ctx{s, w.fields, w.grid};

    auto acts = candidate_actions(0, pos, w.partition, ctx);
    // stay, 8 in-bounds moves, switch to the other coalition, join it as secondary
    REQUIRE(acts.size() == 11u);
    CHECK(acts[0].kind == ActionKind::Stay);
    for (int dir = 0; dir < 8; ++dir) {
        CHECK(acts[static_cast<size_t>(1 + dir)].kind == ActionKind::Move);
        CHECK(acts[static_cast<size_t>(1 + dir)].waypoint == dir);
    }
    // primary is a singleton, so switch:new is pointless and absent
    CHECK(acts[9].kind == ActionKind::SwitchPrimary);
    CHECK(acts[9].coalition == 1);
    CHECK(acts[10].kind == ActionKind::JoinSecondary);
    CHECK(acts[10].coalition == 1);
}

TEST_CASE("corner position prunes out-of-bounds moves") {
    Scenario s = make_scenario({make_uav(0, 0, 0, 0.9)});
    PositionMap pos = start_positions(s);
    WorldState w = initialize(s);
    GameContext ctx{s, w.fields, w.grid};
    auto acts = candidate_actions(0, pos, w.partition, ctx);
    // stay + E, NE, N only
    REQUIRE(acts.size() == 4u);
    CHECK(acts[1].waypoint == 0);
    CHECK(acts[2].waypoint == 1);
    CHECK(acts[3].waypoint == 2);
}

TEST_CASE("action options gate the candidate classes") {
    Scenario s = make_scenario({make_uav(0, 5000, 5000, 0.9), make_uav(1, 6000, 5000, 0.5)});
    PositionMap pos = start_positions(s);
    WorldState w = initialize(s);
    GameContext ctx{s, w.fields, w.grid};

    ActionOptions no_moves;
    no_moves.allow_moves = false;
    auto a1 = candidate_actions(0, pos, w.partition, ctx, no_moves);
    for (const auto& a : a1) CHECK(a.kind != ActionKind::Move);

    ActionOptions no_overlap;
    no_overlap.allow_overlap = false;
    auto a2 = candidate_actions(0, pos, w.partition, ctx, no_overlap);
    for (const auto& a : a2) CHECK(a.kind != ActionKind::JoinSecondary);
}

TEST_CASE("switch:new appears only when the primary is shared") {
    Scenario s = make_scenario({make_uav(0, 5000, 5000, 0.9), make_uav(1, 6000, 5000, 0.5)});
    PositionMap pos = start_positions(s);
    WorldState w = initialize(s);
    GameContext ctx{s, w.fields, w.grid};
    merge(w.partition, 0, 1, pos, s, s.fields);

    auto acts = candidate_actions(0, pos, w.partition, ctx);
    bool has_new = false;
    for (const auto& a : acts)
        if (a.kind == ActionKind::SwitchPrimary && a.coalition == kNewCoalition) has_new = true;
    CHECK(has_new);
}

TEST_CASE("weighted coverage extremes and oracle agreement") {
    SUBCASE("one giant disk covers the whole area exactly") {
        std::vector<UavSpec> uavs{make_uav(0, 5000, 5000, 0.9)};
        uavs[0].coverage_radius_m = 30000.0;
        Scenario s = make_scenario(uavs);
        ImportanceGrid grid = importance_grid(s);
        PositionMap pos = start_positions(s);
        CHECK(weighted_coverage(pos, s, grid) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("no positions covers nothing") {
        Scenario s = make_scenario({make_uav(0, 5000, 5000, 0.9)});
        ImportanceGrid grid = importance_grid(s);
        CHECK(weighted_coverage({}, s, grid) == 0.0);
    }
    SUBCASE("zero-weight grid yields zero") {
        Scenario s = make_scenario({make_uav(0, 5000, 5000, 0.9)});
        ImportanceGrid empty = importance_grid(s.area, s.cell_size_m, {});
        PositionMap pos = start_positions(s);
        CHECK(weighted_coverage(pos, s, empty) == 0.0);
    }
    SUBCASE("stacked disks never double count") {
        Scenario s = make_scenario({make_uav(0, 4000, 4000, 0.9), make_uav(1, 4000, 4000)});
        ImportanceGrid grid = importance_grid(s);
        PositionMap both = start_positions(s);
        PositionMap one{{0, {4000, 4000}}};
        CHECK(weighted_coverage(both, s, grid) ==
              doctest::Approx(weighted_coverage(one, s, grid)).epsilon(1e-12));
    }
    SUBCASE("random swarms match the oracle") {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            Scenario s = testutil::random_scenario(rng, 6);
            ImportanceGrid grid = importance_grid(s);
            PositionMap pos = start_positions(s);
            CHECK(weighted_coverage(pos, s, grid) ==
                  doctest::Approx(coverage_oracle(pos, s, grid)).epsilon(1e-12));
        }
    }
}

TEST_CASE("transmission overhead closed-form cases") {
    SUBCASE("backhauled singletons cost nothing") {
        Scenario s = make_scenario({make_uav(0, 1000, 1000, 0.9), make_uav(1, 4000, 1000, 0.5)});
        PositionMap pos = start_positions(s);
        WorldState w = initialize(s);
        CHECK(transmission_overhead(w.partition, pos, s) == 0.0);
    }
    SUBCASE("a coalition without any ground link pays per member") {
        Scenario s = make_scenario({make_uav(0, 1000, 1000), make_uav(1, 2000, 1000)});
        PositionMap pos = start_positions(s);
        WorldState w = initialize(s);
        merge(w.partition, 0, 1, pos, s, s.fields);
        CHECK(transmission_overhead(w.partition, pos, s) ==
              doctest::Approx(2.0 * s.weights.p_unreach).epsilon(1e-12));
    }
    SUBCASE("two members at the reference distance cost exactly one") {
        Scenario s = make_scenario({make_uav(0, 2000, 2000, 0.9), make_uav(1, 3000, 2000)});
        PositionMap pos = start_positions(s);
        WorldState w = initialize(s);
        merge(w.partition, 0, 1, pos, s, s.fields);
        CHECK(transmission_overhead(w.partition, pos, s) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("star of four around the leader") {
        std::vector<UavSpec> uavs{make_uav(0, 5000, 5000, 0.9), make_uav(1, 6500, 5000),
                                  make_uav(2, 3500, 5000), make_uav(3, 5000, 6500),
                                  make_uav(4, 5000, 3500)};
        Scenario s = make_scenario(uavs);
        PositionMap pos = start_positions(s);
        WorldState w = initialize(s);
        int c = 0;
        for (int other = 1; other < 5; ++other) c = merge(w.partition, c, other, pos, s, s.fields);
        // four spokes of 1500m: 4 * 1.5^2
        CHECK(transmission_overhead(w.partition, pos, s) == doctest::Approx(9.0).epsilon(1e-12));
    }
    SUBCASE("unreachable member of a healthy coalition pays the penalty") {
        Scenario s = make_scenario({make_uav(0, 1000, 1000, 0.9), make_uav(1, 9000, 9000)});
        PositionMap pos = start_positions(s);
        WorldState w = initialize(s);
        merge(w.partition, 0, 1, pos, s, s.fields);
        CHECK(transmission_overhead(w.partition, pos, s) ==
              doctest::Approx(s.weights.p_unreach).epsilon(1e-12));
    }
}

TEST_CASE("objective decomposition is exact") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        Scenario s = testutil::random_scenario(rng, 8);
        WorldState w = initialize(s);
        auto b = global_objective(w.partition, w.positions, w.grid, s);
        CHECK(b.objective ==
              doctest::Approx(s.weights.w_cov * b.coverage - s.weights.w_ovh * b.overhead)
                  .epsilon(1e-12));
        CHECK(b.coverage >= 0.0);
        CHECK(b.coverage <= 1.0);
        CHECK(b.overhead >= 0.0);
    }
}

TEST_CASE("marginal utility is the exact objective difference") {
    SUBCASE("stay is always zero") {
        Scenario s = make_scenario({make_uav(0, 5000, 5000, 0.9)});
        WorldState w = initialize(s);
        GameContext ctx{s, w.fields, w.grid};
        CHECK(marginal_utility(0, {ActionKind::Stay, -1, -1}, w.positions, w.partition, ctx) == 0.0);
    }
    SUBCASE("switching into an unreachable coalition costs the full penalty") {
        Scenario s = make_scenario({make_uav(0, 1000, 1000, 0.9), make_uav(1, 9000, 9000, 0.8)});
        WorldState w = initialize(s);
        GameContext ctx{s, w.fields, w.grid};
        // coverage is position-only, so the delta is pure overhead: -w_ovh * p_unreach
        const double u =
            marginal_utility(0, {ActionKind::SwitchPrimary, -1, 1}, w.positions, w.partition, ctx);
        CHECK(u == doctest::Approx(-s.weights.w_ovh * s.weights.p_unreach).epsilon(1e-12));
    }
    SUBCASE("moving toward the task area gains coverage") {
        // start on a cell-center column so the shifted rim captures new cells
        Scenario s = make_scenario({make_uav(0, 3250, 5000, 0.9)}, {{{5500, 5000}, 800, 1.0}});
        WorldState w = initialize(s);
        GameContext ctx{s, w.fields, w.grid};
        const double u =
            marginal_utility(0, {ActionKind::Move, 0, -1}, w.positions, w.partition, ctx);
        CHECK(u > 0.0);
    }
    SUBCASE("matches an after-minus-before recomputation") {
        Rng rng(29);
        Scenario s = testutil::random_scenario(rng, 6);
        WorldState w = initialize(s);
        GameContext ctx{s, w.fields, w.grid};
        const double before = global_objective(w.partition, w.positions, w.grid, s).objective;
        for (int agent : s.uav_ids()) {
            auto acts = candidate_actions(agent, w.positions, w.partition, ctx);
            for (const auto& a : acts) {
                PositionMap pos2 = w.positions;
                PartitionState part2 = w.partition;
                apply_action(agent, a, pos2, part2, ctx);
                const double after = global_objective(part2, pos2, w.grid, s).objective;
                CHECK(marginal_utility(agent, a, w.positions, w.partition, ctx, before) ==
                      doctest::Approx(after - before).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("best response accepts only strict improvements") {
    SUBCASE("a stranded uav switches to its backhauled neighbor") {
        Scenario s = make_scenario({make_uav(0, 1000, 1000), make_uav(1, 2000, 1000, 0.9)});
        WorldState w = initialize(s);
        GameContext ctx{s, w.fields, w.grid};
        Rng rng(1);
        const double before = global_objective(w.partition, w.positions, w.grid, s).objective;
        auto res = switch_step(0, w.positions, w.partition, ctx, SwitchRule::BestResponse, 0.0, rng);
        CHECK(res.accepted);
        CHECK(res.action.kind == ActionKind::SwitchPrimary);
        CHECK(res.action.coalition == 1);
        // swapping a stranded singleton (penalty 10) for a 1000m relay (cost 1)
        CHECK(res.utility == doctest::Approx(0.9).epsilon(1e-9));
        const double after = global_objective(w.partition, w.positions, w.grid, s).objective;
        CHECK(after == doctest::Approx(before + res.utility).epsilon(1e-12));
    }
    SUBCASE("no improving action leaves the state untouched") {
        std::vector<UavSpec> uavs{make_uav(0, 5000, 5000, 0.9)};
        uavs[0].coverage_radius_m = 30000.0;  // covers everything from anywhere
        Scenario s = make_scenario(uavs);
        WorldState w = initialize(s);
        GameContext ctx{s, w.fields, w.grid};
        Rng rng(1);
        const PositionMap pos_before = w.positions;
        auto res = switch_step(0, w.positions, w.partition, ctx, SwitchRule::BestResponse, 0.0, rng);
        CHECK(!res.accepted);
        CHECK(res.action.kind == ActionKind::Stay);
        CHECK(w.positions == pos_before);
    }
    SUBCASE("accepted moves strictly increase the objective on random scenarios") {
        Rng rng(41);
        for (int trial = 0; trial < 5; ++trial) {
            Scenario s = testutil::random_scenario(rng, 7);
            WorldState w = initialize(s);
            GameContext ctx{s, w.fields, w.grid};
            Rng step_rng(trial);
            for (int round = 0; round < 6; ++round) {
                for (int agent : s.uav_ids()) {
                    const double before =
                        global_objective(w.partition, w.positions, w.grid, s).objective;
                    auto res = switch_step(agent, w.positions, w.partition, ctx,
                                           SwitchRule::BestResponse, 0.0, step_rng);
                    const double after =
                        global_objective(w.partition, w.positions, w.grid, s).objective;
                    if (res.accepted) {
                        CHECK(after > before);
                    } else {
                        CHECK(after == before);
                    }
                }
            }
        }
    }
}

TEST_CASE("loglinear distribution properties") {
    const std::vector<double> u{0.5, 0.1, -0.2};
    SUBCASE("normalized and order preserving") {
        auto p = loglinear_distribution(u, 1.0);
        double sum = 0.0;
        for (double v : p) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p[0] > p[1]);
        CHECK(p[1] > p[2]);
        for (double v : p) CHECK(v > 0.0);
    }
    SUBCASE("low temperature concentrates on the argmax") {
        auto p = loglinear_distribution(u, 1e-6);
        CHECK(p[0] > 0.999999);
    }
    SUBCASE("high temperature approaches uniform") {
        auto p = loglinear_distribution(u, 1e9);
        for (double v : p) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    }
    SUBCASE("huge utilities do not overflow") {
        auto p = loglinear_distribution({5000.0, 4000.0}, 1.0);
        CHECK(std::isfinite(p[0]));
        CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("log-linear at vanishing temperature behaves like best response") {
    Scenario s = make_scenario({make_uav(0, 1000, 1000), make_uav(1, 2000, 1000, 0.9)});
    WorldState a = initialize(s);
    WorldState b = initialize(s);
    GameContext ctx_a{s, a.fields, a.grid};
    GameContext ctx_b{s, b.fields, b.grid};
    Rng rng_a(3), rng_b(3);
    auto res_a = switch_step(0, a.positions, a.partition, ctx_a, SwitchRule::BestResponse, 0.0, rng_a);
    auto res_b = switch_step(0, b.positions, b.partition, ctx_b, SwitchRule::LogLinear, 1e-9, rng_b);
    CHECK(res_a.action == res_b.action);
    const double obj_a = global_objective(a.partition, a.positions, a.grid, s).objective;
    const double obj_b = global_objective(b.partition, b.positions, b.grid, s).objective;
    CHECK(obj_a == doctest::Approx(obj_b).epsilon(1e-12));
}

TEST_CASE("channel game equilibria") {
    SUBCASE("a lone coalition settles on channel zero") {
        Scenario s = make_scenario({make_uav(0, 5000, 5000, 0.9)});
        WorldState w = initialize(s);
        w.partition.coalition(0).channel = 2;
        channel_round(w.partition, w.positions, s.channels);
        CHECK(w.partition.coalition(0).channel == 0);
    }
    SUBCASE("two coalitions separate onto distinct channels") {
        Scenario s = make_scenario({make_uav(0, 2000, 5000, 0.9), make_uav(1, 8000, 5000, 0.8)});
        WorldState w = initialize(s);
        for (int round = 0; round < 10; ++round)
            if (channel_round(w.partition, w.positions, 2) == 0) break;
        CHECK(w.partition.coalition(0).channel != w.partition.coalition(1).channel);
        CHECK(channel_round(w.partition, w.positions, 2) == 0);  // Nash: nobody moves
    }
    SUBCASE("three collinear coalitions on two channels pair up the farthest") {
        std::vector<UavSpec> uavs{make_uav(0, 0, 5000, 0.9), make_uav(1, 4000, 5000, 0.8),
                                  make_uav(2, 10000, 5000, 0.7)};
        Scenario s = make_scenario(uavs);
        WorldState w = initialize(s);
        for (int round = 0; round < 10; ++round)
            if (channel_round(w.partition, w.positions, 2) == 0) break;
        CHECK(w.partition.coalition(0).channel == w.partition.coalition(2).channel);
        CHECK(w.partition.coalition(1).channel != w.partition.coalition(0).channel);
    }
    SUBCASE("rounds never increase total interference") {
        Rng rng(53);
        for (int trial = 0; trial < 10; ++trial) {
            Scenario s = testutil::random_scenario(rng, 6);
            WorldState w = initialize(s);
            for (auto& [cid, c] : w.partition.coalitions)
                c.channel = static_cast<int>(rng.bounded(static_cast<uint64_t>(s.channels)));
            double last = total_same_channel_interference(w.partition, w.positions);
            for (int round = 0; round < 8; ++round) {
                const int changes = channel_round(w.partition, w.positions, s.channels);
                const double now = total_same_channel_interference(w.partition, w.positions);
                CHECK(now <= last + 1e-15);
                last = now;
                if (changes == 0) break;
            }
        }
    }
}
