#include <doctest.h>

#include <swarmsim/radio.hpp>

#include "helpers.hpp"

#include <cmath>
#include <functional>
#include <set>
#include <vector>

using namespace swarmsim;
using testutil::make_scenario;
using testutil::make_uav;

namespace {

// exhaustive simple-path search; independent of the Dijkstra implementation
std::optional<double> brute_force_cheapest(int from, int to, const std::set<int>& members,
                                           const PositionMap& positions, const Scenario& s) {
    const double ref = s.weights.overhead_ref_m;
    const double exp = s.weights.path_loss_exp;
    auto edge = [&](int a, int b) -> std::optional<double> {
        const double d = distance(positions.at(a), positions.at(b));
        if (d > s.uav(a).comm_range_m || d > s.uav(b).comm_range_m) return std::nullopt;
        return std::pow(d / ref, exp);
    };
    std::optional<double> best;
    std::set<int> visited{from};
    std::function<void(int, double)> dfs = [&](int node, double cost) {
        if (node == to) {
            if (!best || cost < *best) best = cost;
            return;
        }
        for (int next : members) {
            if (visited.count(next)) continue;
            auto c = edge(node, next);
            if (!c) continue;
            visited.insert(next);
            dfs(next, cost + *c);
            visited.erase(next);
        }
    };
    if (members.count(from) && members.count(to)) dfs(from, 0.0);
    return best;
}

} // namespace

TEST_CASE("link quality basics") {
    Scenario s = make_scenario({make_uav(0, 1000, 1000, 0.5), make_uav(1, 2000, 1000)});
    const UavSpec& a = s.uav(0);
    const UavSpec& b = s.uav(1);
    // exactly the reference distance: 1 / (1 + 1) = 0.5
    CHECK(link_quality({0, 0}, {1000, 0}, a, b, s.weights) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(link_quality({0, 0}, {0, 0}, a, b, s.weights) == doctest::Approx(1.0));
    // beyond comm range: exactly zero
    CHECK(link_quality({0, 0}, {3001, 0}, a, b, s.weights) == 0.0);
    CHECK(link_quality({0, 0}, {2000, 0}, a, b, s.weights) ==
          doctest::Approx(1.0 / 5.0).epsilon(1e-12));
}

TEST_CASE("link quality is symmetric") {
    Rng rng(11);
    Scenario s = testutil::random_scenario(rng, 6);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec2 pa{rng.uniform(0, 10000), rng.uniform(0, 10000)};
        const Vec2 pb{rng.uniform(0, 10000), rng.uniform(0, 10000)};
        const int ia = static_cast<int>(rng.bounded(6));
        const int ib = static_cast<int>(rng.bounded(6));
        CHECK(link_quality(pa, pb, s.uav(ia), s.uav(ib), s.weights) ==
              link_quality(pb, pa, s.uav(ib), s.uav(ia), s.weights));
    }
}

TEST_CASE("relay path: same node, direct, and two-hop chain") {
    Scenario s = make_scenario({make_uav(0, 100, 100, 0.9), make_uav(1, 2500, 100),
                                make_uav(2, 4900, 100)});
    PositionMap pos{{0, {100, 100}}, {1, {2500, 100}}, {2, {4900, 100}}};
    std::set<int> members{0, 1, 2};

    auto self = relay_path(0, 0, members, pos, s);
    REQUIRE(self.has_value());
    CHECK(self->hops == std::vector<int>{0});
    CHECK(self->cost == 0.0);

    auto direct = relay_path(0, 1, members, pos, s);
    REQUIRE(direct.has_value());
    CHECK(direct->hops == std::vector<int>{0, 1});
    CHECK(direct->cost == doctest::Approx(2.4 * 2.4).epsilon(1e-12));

    // 0 -> 2 is 4800m, out of the 3000m range: must relay through 1.
    auto hop = relay_path(0, 2, members, pos, s);
    REQUIRE(hop.has_value());
    CHECK(hop->hops == std::vector<int>{0, 1, 2});
    CHECK(hop->cost == doctest::Approx(2.4 * 2.4 * 2.0).epsilon(1e-12));
}

TEST_CASE("relay path: unreachable and out-of-set nodes") {
    Scenario s = make_scenario({make_uav(0, 100, 100, 0.9), make_uav(1, 9000, 9000)});
    PositionMap pos{{0, {100, 100}}, {1, {9000, 9000}}};
    CHECK(!relay_path(0, 1, {0, 1}, pos, s).has_value());
    CHECK(!relay_path(0, 1, {0}, pos, s).has_value());  // 'to' not in the member set
}

TEST_CASE("relay path matches exhaustive search on random graphs") {
    Rng rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 3 + static_cast<int>(rng.bounded(5));  // 3..7 nodes
        std::vector<UavSpec> uavs;
        PositionMap pos;
        for (int i = 0; i < n; ++i) {
            UavSpec u = make_uav(i, rng.uniform(0, 6000), rng.uniform(0, 6000), i == 0 ? 0.9 : 0.0);
            u.comm_range_m = rng.uniform(1500, 4000);
            pos[i] = u.start_pos;
            uavs.push_back(u);
        }
        Scenario s = make_scenario(std::move(uavs));
        std::set<int> members;
        for (int i = 0; i < n; ++i) members.insert(i);
        auto got = relay_path(0, n - 1, members, pos, s);
        auto want = brute_force_cheapest(0, n - 1, members, pos, s);
        REQUIRE(got.has_value() == want.has_value());
        if (got) {
            CHECK(got->cost == doctest::Approx(*want).epsilon(1e-9));
            // returned hops must be a real path whose edge costs sum to `cost`
            double sum = 0.0;
            for (size_t k = 0; k + 1 < got->hops.size(); ++k) {
                const double d = distance(pos.at(got->hops[k]), pos.at(got->hops[k + 1]));
                CHECK(d <= std::min(s.uav(got->hops[k]).comm_range_m,
                                    s.uav(got->hops[k + 1]).comm_range_m));
                sum += std::pow(d / s.weights.overhead_ref_m, s.weights.path_loss_exp);
            }
            CHECK(sum == doctest::Approx(got->cost).epsilon(1e-9));
        }
    }
}

TEST_CASE("relay matching: preference order and quota bumping") {
    // requesters 0,1; relays 10 (close to both), 11 (far). quota 1 forces a bump.
    std::vector<UavSpec> uavs{make_uav(0, 1000, 1000), make_uav(1, 1400, 1000),
                              make_uav(10, 1200, 1000, 0.9), make_uav(11, 3500, 1000, 0.8)};
    uavs[2].relay_quota = 1;
    uavs[3].relay_quota = 1;
    Scenario s = make_scenario(uavs);
    PositionMap pos;
    for (const auto& u : s.uavs) pos[u.id] = u.start_pos;

    auto m = relay_matching({0, 1}, {10, 11}, pos, s);
    // both prefer 10; both sit exactly 200m away, so the id tie-break keeps 0
    // and bumps 1, which settles for 11.
    REQUIRE(m.relay_of.count(0));
    REQUIRE(m.relay_of.count(1));
    CHECK(m.relay_of.at(0) == 10);
    CHECK(m.relay_of.at(1) == 11);
    CHECK(matching_is_stable(m, {0, 1}, {10, 11}, pos, s));
}

TEST_CASE("relay matching: zero quota relays reject everyone") {
    std::vector<UavSpec> uavs{make_uav(0, 1000, 1000), make_uav(10, 1200, 1000, 0.9)};
    uavs[1].relay_quota = 0;
    Scenario s = make_scenario(uavs);
    PositionMap pos{{0, {1000, 1000}}, {10, {1200, 1000}}};
    auto m = relay_matching({0}, {10}, pos, s);
    CHECK(m.relay_of.empty());
    CHECK(matching_is_stable(m, {0}, {10}, pos, s));
}

TEST_CASE("relay matching: stable and order-invariant on random instances") {
    Rng rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        const int n_req = 1 + static_cast<int>(rng.bounded(6));
        const int n_rel = 1 + static_cast<int>(rng.bounded(3));
        std::vector<UavSpec> uavs;
        std::vector<int> requesters, relays;
        for (int i = 0; i < n_req; ++i) {
            uavs.push_back(make_uav(i, rng.uniform(0, 8000), rng.uniform(0, 8000)));
            requesters.push_back(i);
        }
        for (int i = 0; i < n_rel; ++i) {
            UavSpec u = make_uav(100 + i, rng.uniform(0, 8000), rng.uniform(0, 8000), 0.9);
            u.relay_quota = static_cast<int>(rng.bounded(4));
            uavs.push_back(u);
            relays.push_back(100 + i);
        }
        Scenario s = make_scenario(uavs);
        PositionMap pos;
        for (const auto& u : s.uavs) pos[u.id] = u.start_pos;

        auto m = relay_matching(requesters, relays, pos, s);
        CHECK(matching_is_stable(m, requesters, relays, pos, s));

        // deferred acceptance is proposal-order independent here
        std::vector<int> shuffled = requesters;
        rng.shuffle(shuffled);
        auto m2 = relay_matching(shuffled, relays, pos, s);
        CHECK(m.relay_of == m2.relay_of);

        // quota respected
        std::map<int, int> load;
        for (const auto& [r, relay] : m.relay_of) ++load[relay];
        for (const auto& [relay, k] : load) CHECK(k <= s.uav(relay).relay_quota);
    }
}

TEST_CASE("traffic accounting per message class") {
    Scenario s = make_scenario({make_uav(0, 1000, 1000, 0.9), make_uav(1, 2000, 1000)});
    PositionMap pos{{0, {1000, 1000}}, {1, {2000, 1000}}};

    SUBCASE("single coalition of two, in range") {
        PartitionState p;
        p.coalitions[0] = {0, {0, 1}, 0, 0, 0, false};
        p.membership[0] = {0};
        p.membership[1] = {0};
        p.primary_of[0] = 0;
        p.primary_of[1] = 0;
        p.next_coalition_id = 1;
        auto t = account_traffic(p, pos, s);
        CHECK(t.safety == doctest::Approx(2.0));  // both ordered pairs
        CHECK(t.fusion == doctest::Approx(1.0));  // member 1, one hop to leader 0
        CHECK(t.share == doctest::Approx(0.0));
        CHECK(t.total() == doctest::Approx(3.0));
    }

    SUBCASE("emergency doubles the members' safety broadcasts") {
        PartitionState p;
        p.coalitions[0] = {0, {0, 1}, 0, 0, 0, true};
        p.membership[0] = {0};
        p.membership[1] = {0};
        p.primary_of[0] = 0;
        p.primary_of[1] = 0;
        p.next_coalition_id = 1;
        auto t = account_traffic(p, pos, s);
        CHECK(t.safety == doctest::Approx(4.0));
    }

    SUBCASE("two singletons in range share between leaders") {
        PartitionState p;
        p.coalitions[0] = {0, {0}, 0, 0, 0, false};
        p.coalitions[1] = {1, {1}, 1, 1, 1, false};
        p.membership[0] = {0};
        p.membership[1] = {1};
        p.primary_of[0] = 0;
        p.primary_of[1] = 1;
        p.next_coalition_id = 2;
        auto t = account_traffic(p, pos, s);
        CHECK(t.safety == doctest::Approx(2.0));
        CHECK(t.fusion == doctest::Approx(0.0));  // leaders report for themselves
        CHECK(t.share == doctest::Approx(1.0));
    }

    SUBCASE("unreachable member is charged the penalty") {
        PositionMap far{{0, {1000, 1000}}, {1, {9000, 9000}}};
        PartitionState p;
        p.coalitions[0] = {0, {0, 1}, 0, 0, 0, false};
        p.membership[0] = {0};
        p.membership[1] = {0};
        p.primary_of[0] = 0;
        p.primary_of[1] = 0;
        p.next_coalition_id = 1;
        auto t = account_traffic(p, far, s);
        CHECK(t.safety == doctest::Approx(0.0));
        CHECK(t.fusion == doctest::Approx(s.weights.p_unreach));
    }
}
