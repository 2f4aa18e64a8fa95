#include "swarmsim/radio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace swarmsim {

namespace {

double hop_cost(double d, const GameWeights& w) {
    const double r = d / w.overhead_ref_m;
    if (w.path_loss_exp == 2.0) return r * r;
    return std::pow(r, w.path_loss_exp);
}

bool in_range(const Vec2& a, const Vec2& b, const UavSpec& ua, const UavSpec& ub) {
    const double d = distance(a, b);
    return d <= ua.comm_range_m && d <= ub.comm_range_m;
}

}  // namespace

double link_quality(const Vec2& a, const Vec2& b, const UavSpec& ua, const UavSpec& ub,
                    const GameWeights& w) {
    if (!in_range(a, b, ua, ub)) return 0.0;
    const double q = 1.0 / (1.0 + hop_cost(distance(a, b), w));
    return std::clamp(q, 0.0, 1.0);
}

std::optional<RelayPath> relay_path(int from, int to, const std::set<int>& members,
                                    const std::map<int, Vec2>& positions,
                                    const Scenario& scenario) {
    if (members.count(from) == 0 || members.count(to) == 0) return std::nullopt;
    if (from == to) return RelayPath{{from}, 0.0};

    const GameWeights& w = scenario.weights;
    std::map<int, double> dist;
    std::map<int, int> prev;
    for (int m : members) dist[m] = std::numeric_limits<double>::infinity();
    dist[from] = 0.0;

    using Entry = std::pair<double, int>;  // (cost, node); node breaks ties deterministically
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    heap.push({0.0, from});
    while (!heap.empty()) {
        auto [cost, node] = heap.top();
        heap.pop();
        if (cost > dist[node]) continue;
        if (node == to) break;
        const Vec2 np = positions.at(node);
        const UavSpec& ns = scenario.uav(node);
        for (int next : members) {
            if (next == node) continue;
            const Vec2 xp = positions.at(next);
            if (!in_range(np, xp, ns, scenario.uav(next))) continue;
            const double c = cost + hop_cost(distance(np, xp), w);
            if (c < dist[next]) {
                dist[next] = c;
                prev[next] = node;
                heap.push({c, next});
            }
        }
    }
    if (!std::isfinite(dist[to])) return std::nullopt;

    RelayPath path;
    path.cost = dist[to];
    for (int n = to; n != from; n = prev.at(n)) path.hops.push_back(n);
    path.hops.push_back(from);
    std::reverse(path.hops.begin(), path.hops.end());
    return path;
}

RelayAssignment relay_matching(const std::vector<int>& requesters, const std::vector<int>& relays,
                               const std::map<int, Vec2>& positions, const Scenario& scenario) {
    const GameWeights& w = scenario.weights;
    auto quality = [&](int a, int b) {
        return link_quality(positions.at(a), positions.at(b), scenario.uav(a), scenario.uav(b), w);
    };

    // Preference lists: strictly positive links only, best quality first, lowest id on ties.
    std::map<int, std::vector<int>> prefs;
    for (int r : requesters) {
        std::vector<int> list;
        for (int relay : relays) {
            if (quality(r, relay) > 0.0) list.push_back(relay);
        }
        std::stable_sort(list.begin(), list.end(), [&](int a, int b) {
            const double qa = quality(r, a);
            const double qb = quality(r, b);
            if (qa != qb) return qa > qb;
            return a < b;
        });
        prefs[r] = std::move(list);
    }

    std::map<int, std::size_t> next_proposal;
    std::map<int, std::set<int>> accepted;  // relay -> current requesters
    std::vector<int> free = requesters;
    std::map<int, int> relay_of;

    auto prefers = [&](int relay, int a, int b) {
        // True when the relay ranks requester a above requester b.
        const double qa = quality(relay, a);
        const double qb = quality(relay, b);
        if (qa != qb) return qa > qb;
        return a < b;
    };

    while (!free.empty()) {
        const int r = free.front();
        free.erase(free.begin());
        auto& idx = next_proposal[r];
        const auto& list = prefs[r];
        if (idx >= list.size()) continue;  // exhausted: stays unmatched
        const int relay = list[idx++];
        auto& held = accepted[relay];
        const int quota = scenario.uav(relay).relay_quota;
        if (static_cast<int>(held.size()) < quota) {
            held.insert(r);
            relay_of[r] = relay;
            continue;
        }
        if (held.empty()) {  // quota 0: rejects everyone
            free.push_back(r);
            continue;
        }
        // Full: bump the worst held requester if r beats it.
        int worst = *held.begin();
        for (int h : held) {
            if (prefers(relay, worst, h)) worst = h;
        }
        if (prefers(relay, r, worst)) {
            held.erase(worst);
            relay_of.erase(worst);
            held.insert(r);
            relay_of[r] = relay;
            free.push_back(worst);
        } else {
            free.push_back(r);
        }
    }
    return RelayAssignment{std::move(relay_of)};
}

bool matching_is_stable(const RelayAssignment& m, const std::vector<int>& requesters,
                        const std::vector<int>& relays, const std::map<int, Vec2>& positions,
                        const Scenario& scenario) {
    const GameWeights& w = scenario.weights;
    auto quality = [&](int a, int b) {
        return link_quality(positions.at(a), positions.at(b), scenario.uav(a), scenario.uav(b), w);
    };
    std::map<int, std::vector<int>> held;
    for (const auto& [r, relay] : m.relay_of) held[relay].push_back(r);

    for (int r : requesters) {
        const auto cur = m.relay_of.find(r);
        const bool matched = cur != m.relay_of.end();
        const double cur_q = matched ? quality(r, cur->second) : -1.0;
        for (int relay : relays) {
            if (matched && relay == cur->second) continue;
            const double q = quality(r, relay);
            if (q <= 0.0) continue;
            // Preferences tie-break by ascending id, mirroring the matcher.
            const bool wants = !matched || q > cur_q || (q == cur_q && relay < cur->second);
            if (!wants) continue;
            // r strictly prefers this relay; would the relay take r?
            auto& hs = held[relay];
            if (static_cast<int>(hs.size()) < scenario.uav(relay).relay_quota) return false;
            for (int h : hs) {
                const double hq = quality(relay, h);
                const double rq = quality(relay, r);
                if (rq > hq || (rq == hq && r < h)) return false;
            }
        }
    }
    return true;
}

TrafficTotals account_traffic(const PartitionState& p, const std::map<int, Vec2>& positions,
                              const Scenario& scenario) {
    TrafficTotals t;

    // Safety broadcasts: every ordered in-range pair, doubled per sender when
    // any of the sender's coalitions is in emergency.
    std::map<int, bool> in_emergency;
    for (const auto& [cid, c] : p.coalitions) {
        if (!c.emergency) continue;
        for (int m : c.members) in_emergency[m] = true;
    }
    for (const auto& [a, pa] : positions) {
        const UavSpec& sa = scenario.uav(a);
        const double mult = in_emergency.count(a) ? 2.0 : 1.0;
        for (const auto& [b, pb] : positions) {
            if (a == b) continue;
            if (in_range(pa, pb, sa, scenario.uav(b))) t.safety += mult;
        }
    }

    // Fusion: each non-leader member forwards one report per hop to the
    // ground leader; unreachable members are charged the penalty instead.
    for (const auto& [cid, c] : p.coalitions) {
        for (int m : c.members) {
            if (m == c.ground_leader) continue;
            auto path = relay_path(m, c.ground_leader, c.members, positions, scenario);
            if (path) {
                t.fusion += static_cast<double>(path->hops.size() - 1);
            } else {
                t.fusion += scenario.weights.p_unreach;
            }
        }
    }

    // Share: one exchange per unordered pair of coalitions whose ground
    // leaders can hear each other.
    for (auto it = p.coalitions.begin(); it != p.coalitions.end(); ++it) {
        for (auto jt = std::next(it); jt != p.coalitions.end(); ++jt) {
            const int la = it->second.ground_leader;
            const int lb = jt->second.ground_leader;
            if (la == lb) continue;  // overlapping coalitions can share a leader
            if (in_range(positions.at(la), positions.at(lb), scenario.uav(la), scenario.uav(lb))) {
                t.share += 1.0;
            }
        }
    }
    return t;
}

}  // namespace swarmsim
