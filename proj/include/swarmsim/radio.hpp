/** Link model, relay routing, relay matching, and per-step traffic accounting. */
#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "swarmsim/coalition.hpp"
#include "swarmsim/scenario.hpp"

namespace swarmsim {

// 1 / (1 + (d/ref)^alpha), clamped to [0,1]; exactly 0 beyond either node's comm range.
double link_quality(const Vec2& a, const Vec2& b, const UavSpec& ua, const UavSpec& ub,
                    const GameWeights& w);

struct RelayPath {
    std::vector<int> hops;  // from -> ... -> to, inclusive of both endpoints
    double cost = 0.0;      // sum of (d/ref)^alpha over edges
};

// Cheapest multi-hop route between two members using only nodes from `members`.
// Edges exist where both endpoints are inside each other's comm range.
std::optional<RelayPath> relay_path(int from, int to, const std::set<int>& members,
                                    const std::map<int, Vec2>& positions,
                                    const Scenario& scenario);

struct RelayAssignment {
    std::map<int, int> relay_of;  // requester -> relay
};

// Deferred acceptance between requesters and quota-bounded relays.
// Requesters propose in preference order (highest link quality first, then
// lowest id); a relay keeps its best requesters up to relay_quota.
RelayAssignment relay_matching(const std::vector<int>& requesters, const std::vector<int>& relays,
                               const std::map<int, Vec2>& positions, const Scenario& scenario);

// True when no requester/relay pair would both strictly prefer each other
// over their current match. Oracle-style check used by tests and diagnostics.
bool matching_is_stable(const RelayAssignment& m, const std::vector<int>& requesters,
                        const std::vector<int>& relays, const std::map<int, Vec2>& positions,
                        const Scenario& scenario);

struct TrafficTotals {
    double safety = 0.0;
    double fusion = 0.0;
    double share = 0.0;
    double total() const { return safety + fusion + share; }
};

// Message counts for one step: safety broadcasts between in-range pairs
// (doubled per UAV inside an emergency coalition), fusion hops along each
// member's relay path to its ground leader, and one share per adjacent
// coalition pair (leaders within range of each other).
TrafficTotals account_traffic(const PartitionState& p, const std::map<int, Vec2>& positions,
                              const Scenario& scenario);

}  // namespace swarmsim
