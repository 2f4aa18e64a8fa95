#include "swarmsim/coalition.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "swarmsim/errors.hpp"
#include "swarmsim/radio.hpp"

namespace swarmsim {

namespace {

Vec2 pos_of(const PositionMap& positions, int uav) {
    auto it = positions.find(uav);
    if (it == positions.end()) {
        throw ValidationError("positions: missing UAV " + std::to_string(uav));
    }
    return it->second;
}

void erase_membership(PartitionState& p, int uav, int cid) {
    p.membership[uav].erase(cid);
    p.coalitions[cid].members.erase(uav);
}

void add_membership(PartitionState& p, int uav, int cid) {
    p.membership[uav].insert(cid);
    p.coalitions[cid].members.insert(uav);
}

// Reassigns the UAV's home to its lowest remaining coalition id.
void fix_primary(PartitionState& p, int uav) {
    const auto& memberships = p.membership[uav];
    if (memberships.empty()) return;
    if (memberships.count(p.primary_of[uav]) == 0) {
        p.primary_of[uav] = *memberships.begin();
    }
}

void delete_if_empty(PartitionState& p, int cid) {
    auto it = p.coalitions.find(cid);
    if (it != p.coalitions.end() && it->second.members.empty()) {
        p.coalitions.erase(it);
    }
}

}  // namespace

const Coalition& PartitionState::coalition(int id) const {
    auto it = coalitions.find(id);
    if (it == coalitions.end()) {
        throw PartitionError(PartitionError::Kind::UnknownCoalition,
                             "unknown coalition " + std::to_string(id));
    }
    return it->second;
}

Coalition& PartitionState::coalition(int id) {
    auto it = coalitions.find(id);
    if (it == coalitions.end()) {
        throw PartitionError(PartitionError::Kind::UnknownCoalition,
                             "unknown coalition " + std::to_string(id));
    }
    return it->second;
}

LeaderElection elect_leaders(const Coalition& c, const PositionMap& positions,
                             const Scenario& scenario, const std::vector<ImportanceField>& fields) {
    LeaderElection out;
    double best_quality = -1.0;
    double best_importance = -1.0;
    for (int m : c.members) {  // std::set iterates ascending, so ties keep the lowest id
        const double q = scenario.uav(m).ground_link_quality;
        if (q > best_quality) {
            best_quality = q;
            out.ground_leader = m;
        }
        const double imp = importance_at(fields, pos_of(positions, m));
        if (imp > best_importance) {
            best_importance = imp;
            out.task_leader = m;
        }
    }
    out.emergency = best_quality <= 0.0;
    return out;
}

void reelect_leaders(PartitionState& p, int cid, const PositionMap& positions,
                     const Scenario& scenario, const std::vector<ImportanceField>& fields) {
    Coalition& c = p.coalition(cid);
    const LeaderElection e = elect_leaders(c, positions, scenario, fields);
    c.ground_leader = e.ground_leader;
    c.task_leader = e.task_leader;
    c.emergency = e.emergency;
}

int merge(PartitionState& p, int c1, int c2, const PositionMap& positions,
          const Scenario& scenario, const std::vector<ImportanceField>& fields,
          const EventSink& sink, const MembershipValue& value) {
    if (c1 == c2) {
        throw PartitionError(PartitionError::Kind::UnknownCoalition,
                             "merge: coalitions must be distinct");
    }
    const Coalition& a = p.coalition(c1);
    const Coalition& b = p.coalition(c2);

    Coalition merged;
    merged.id = p.fresh_id();
    merged.members = a.members;
    merged.members.insert(b.members.begin(), b.members.end());
    merged.channel = (c1 < c2 ? a : b).channel;

    for (int m : merged.members) {
        p.membership[m].erase(c1);
        p.membership[m].erase(c2);
        p.membership[m].insert(merged.id);
        int& prim = p.primary_of[m];
        if (prim == c1 || prim == c2) prim = merged.id;
    }
    p.coalitions.erase(c1);
    p.coalitions.erase(c2);
    p.coalitions[merged.id] = merged;
    reelect_leaders(p, merged.id, positions, scenario, fields);

    // Set union never raises a member's membership count, but the bound is
    // enforced here so the operation's contract holds for any caller.
    const std::set<int> merged_members = p.coalitions[merged.id].members;
    for (int m : merged_members) {
        while (static_cast<int>(p.membership[m].size()) > scenario.uav(m).transceivers) {
            int drop = -1;
            double drop_value = std::numeric_limits<double>::infinity();
            for (int cid : p.membership[m]) {
                if (cid == p.primary_of[m]) continue;
                const double v = value ? value(m, cid) : -static_cast<double>(cid);
                if (v < drop_value || (v == drop_value && cid > drop)) {
                    drop_value = v;
                    drop = cid;
                }
            }
            if (drop < 0) break;
            erase_membership(p, m, drop);
            const bool was_leader = p.coalitions.count(drop) != 0 &&
                                    (p.coalitions[drop].ground_leader == m ||
                                     p.coalitions[drop].task_leader == m);
            delete_if_empty(p, drop);
            if (p.coalitions.count(drop) != 0 && was_leader) {
                reelect_leaders(p, drop, positions, scenario, fields);
            }
            sink.emit(EventKind::Leave, {drop}, {m}, "transceiver_overflow");
        }
    }

    sink.emit(EventKind::Merge, {c1, c2, merged.id}, {});
    return merged.id;
}

int split(PartitionState& p, int c, const std::set<int>& subset, const PositionMap& positions,
          const Scenario& scenario, const std::vector<ImportanceField>& fields,
          const EventSink& sink) {
    Coalition& orig = p.coalition(c);
    if (subset.empty() || subset.size() >= orig.members.size() ||
        !std::includes(orig.members.begin(), orig.members.end(), subset.begin(), subset.end())) {
        throw PartitionError(PartitionError::Kind::InvalidSubset,
                             "split: subset must be a strict non-empty subset of the coalition");
    }

    Coalition fresh;
    fresh.id = p.fresh_id();
    fresh.members = subset;
    fresh.channel = orig.channel;
    for (int m : subset) {
        orig.members.erase(m);
        p.membership[m].erase(c);
        p.membership[m].insert(fresh.id);
        if (p.primary_of[m] == c) p.primary_of[m] = fresh.id;
    }
    p.coalitions[fresh.id] = fresh;
    reelect_leaders(p, fresh.id, positions, scenario, fields);
    reelect_leaders(p, c, positions, scenario, fields);

    sink.emit(EventKind::Split, {c, fresh.id}, std::vector<int>(subset.begin(), subset.end()));
    return fresh.id;
}

void join(PartitionState& p, int uav, int c, const PositionMap& positions,
          const Scenario& scenario, const std::vector<ImportanceField>& fields,
          const EventSink& sink) {
    Coalition& target = p.coalition(c);
    if (target.members.count(uav) != 0) {
        throw PartitionError(PartitionError::Kind::AlreadyMember,
                             "join: UAV " + std::to_string(uav) + " already in coalition " +
                                 std::to_string(c));
    }
    if (static_cast<int>(p.membership[uav].size()) >= scenario.uav(uav).transceivers) {
        throw PartitionError(PartitionError::Kind::NoFreeTransceiver,
                             "join: UAV " + std::to_string(uav) + " has no free transceiver");
    }
    add_membership(p, uav, c);
    reelect_leaders(p, c, positions, scenario, fields);
    sink.emit(EventKind::Join, {c}, {uav});
}

void leave(PartitionState& p, int uav, int c, const PositionMap& positions,
           const Scenario& scenario, const std::vector<ImportanceField>& fields,
           const EventSink& sink) {
    Coalition& target = p.coalition(c);
    if (target.members.count(uav) == 0) {
        throw PartitionError(PartitionError::Kind::NotMember,
                             "leave: UAV " + std::to_string(uav) + " not in coalition " +
                                 std::to_string(c));
    }
    if (p.membership[uav].size() <= 1) {
        throw PartitionError(PartitionError::Kind::LastMembership,
                             "leave: UAV " + std::to_string(uav) +
                                 " would lose its last membership");
    }
    const bool was_leader = target.ground_leader == uav || target.task_leader == uav;
    erase_membership(p, uav, c);
    fix_primary(p, uav);
    if (target.members.empty()) {
        p.coalitions.erase(c);
        sink.emit(EventKind::Leave, {c}, {uav}, "coalition_deleted");
        return;
    }
    if (was_leader) reelect_leaders(p, c, positions, scenario, fields);
    sink.emit(EventKind::Leave, {c}, {uav});
}

int switch_primary(PartitionState& p, int uav, int target, const PositionMap& positions,
                   const Scenario& scenario, const std::vector<ImportanceField>& fields,
                   const EventSink& sink) {
    const int old = p.primary_of.at(uav);
    int dest = target;
    if (dest == kNewCoalition) {
        Coalition fresh;
        fresh.id = p.fresh_id();
        fresh.members = {uav};
        fresh.channel = p.coalition(old).channel;
        dest = fresh.id;
        p.coalitions[dest] = fresh;
        p.membership[uav].insert(dest);
    } else {
        if (dest == old) return old;
        Coalition& t = p.coalition(dest);
        if (t.members.count(uav) == 0) add_membership(p, uav, dest);
    }
    p.primary_of[uav] = dest;
    reelect_leaders(p, dest, positions, scenario, fields);

    Coalition& from = p.coalition(old);
    const bool was_leader = from.ground_leader == uav || from.task_leader == uav;
    erase_membership(p, uav, old);
    if (from.members.empty()) {
        p.coalitions.erase(old);
    } else if (was_leader) {
        reelect_leaders(p, old, positions, scenario, fields);
    }
    sink.emit(EventKind::Switch, {old, dest}, {uav});
    return dest;
}

EmergencyCheck check_emergency(PartitionState& p, int c, double theta,
                               const PositionMap& positions, const Scenario& scenario,
                               const EventSink& sink) {
    Coalition& coal = p.coalition(c);
    const int leader = coal.ground_leader;
    const double quality = scenario.uav(leader).ground_link_quality;
    const bool backhaul_failure = quality < theta;

    bool fragmented = false;
    for (int m : coal.members) {
        if (m == leader) continue;
        if (!relay_path(m, leader, coal.members, positions, scenario).has_value()) {
            fragmented = true;
            break;
        }
    }

    EmergencyCheck out;
    out.emergency = backhaul_failure || fragmented;
    coal.emergency = out.emergency;
    if (!out.emergency) return out;

    sink.emit(EventKind::Emergency, {c}, {leader},
              backhaul_failure ? (fragmented ? "backhaul+fragmented" : "backhaul") : "fragmented");

    // Only a backhaul failure is fixable by attaching to a healthy coalition,
    // and only one whose leader the emergency leader can actually reach.
    if (backhaul_failure) {
        const Vec2 here = pos_of(positions, leader);
        const double my_range = scenario.uav(leader).comm_range_m;
        double best_dist = std::numeric_limits<double>::infinity();
        for (const auto& [cid, other] : p.coalitions) {
            if (cid == c) continue;
            const int other_leader = other.ground_leader;
            if (scenario.uav(other_leader).ground_link_quality < theta) continue;
            const double d = distance(here, pos_of(positions, other_leader));
            if (d > my_range || d > scenario.uav(other_leader).comm_range_m) continue;
            if (d < best_dist) {
                best_dist = d;
                out.merge_with = cid;
            }
        }
        if (out.merge_with) {
            sink.emit(EventKind::EmergencyMergeRequest, {c, *out.merge_with}, {});
        }
    }
    return out;
}

void validate_partition(const PartitionState& p, const Scenario& scenario) {
    for (const auto& [cid, c] : p.coalitions) {
        if (c.id != cid) throw ValidationError("partition: coalition id mismatch");
        if (c.members.empty()) {
            throw ValidationError("partition: empty coalition " + std::to_string(cid));
        }
        if (c.members.count(c.ground_leader) == 0) {
            throw ValidationError("partition: ground leader not a member of " + std::to_string(cid));
        }
        if (c.members.count(c.task_leader) == 0) {
            throw ValidationError("partition: task leader not a member of " + std::to_string(cid));
        }
        if (c.channel < 0 || c.channel >= scenario.channels) {
            throw ValidationError("partition: channel out of range in " + std::to_string(cid));
        }
        if (cid >= p.next_coalition_id) {
            throw ValidationError("partition: next_coalition_id not past " + std::to_string(cid));
        }
        for (int m : c.members) {
            auto it = p.membership.find(m);
            if (it == p.membership.end() || it->second.count(cid) == 0) {
                throw ValidationError("partition: membership map missing UAV " + std::to_string(m) +
                                      " in coalition " + std::to_string(cid));
            }
        }
    }
    for (const auto& u : scenario.uavs) {
        auto it = p.membership.find(u.id);
        if (it == p.membership.end() || it->second.empty()) {
            throw ValidationError("partition: UAV " + std::to_string(u.id) + " has no coalition");
        }
        if (static_cast<int>(it->second.size()) > u.transceivers) {
            throw ValidationError("partition: UAV " + std::to_string(u.id) +
                                  " exceeds its transceiver bound");
        }
        for (int cid : it->second) {
            auto cit = p.coalitions.find(cid);
            if (cit == p.coalitions.end() || cit->second.members.count(u.id) == 0) {
                throw ValidationError("partition: stale membership of UAV " + std::to_string(u.id) +
                                      " in coalition " + std::to_string(cid));
            }
        }
        auto pit = p.primary_of.find(u.id);
        if (pit == p.primary_of.end() || it->second.count(pit->second) == 0) {
            throw ValidationError("partition: primary of UAV " + std::to_string(u.id) +
                                  " is not one of its memberships");
        }
    }
    for (const auto& [uav, memberships] : p.membership) {
        if (!memberships.empty() && !scenario.has_uav(uav)) {
            throw ValidationError("partition: membership for unknown UAV " + std::to_string(uav));
        }
    }
}

}  // namespace swarmsim
