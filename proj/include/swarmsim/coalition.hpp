/**
 * Overlapping coalition structure: membership bounded by transceiver counts,
 * dual-leader election, merge/split/join/leave transitions, and the
 * emergency-communication check. One engine instance owns a PartitionState;
 * operations mutate it under exclusive access.
 */
#ifndef SWARMSIM_COALITION_HPP
#define SWARMSIM_COALITION_HPP

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "swarmsim/events.hpp"
#include "swarmsim/geometry.hpp"
#include "swarmsim/scenario.hpp"

namespace swarmsim {

struct Coalition {
    int id = 0;
    std::set<int> members;
    int ground_leader = -1;  // backhaul link to the ground controller
    int task_leader = -1;    // mission-aware communication lead
    int channel = 0;
    bool emergency = false;
};

struct PartitionState {
    std::map<int, Coalition> coalitions;
    std::map<int, std::set<int>> membership;  // UAV id -> coalition ids
    std::map<int, int> primary_of;            // UAV id -> home coalition
    int next_coalition_id = 0;

    const Coalition& coalition(int id) const;
    Coalition& coalition(int id);
    bool has_coalition(int id) const { return coalitions.count(id) != 0; }
    int fresh_id() { return next_coalition_id++; }
};

using PositionMap = std::map<int, Vec2>;

struct LeaderElection {
    int ground_leader = -1;
    int task_leader = -1;
    bool emergency = false;  // no member has any backhaul hardware
};

// Ground leader: max ground_link_quality, ties to lowest id (all-zero quality
// elects the lowest id and flags emergency). Task leader: max importance at
// current position, ties to lowest id.
LeaderElection elect_leaders(const Coalition& c, const PositionMap& positions,
                             const Scenario& scenario, const std::vector<ImportanceField>& fields);

// Re-runs the election on coalition `cid` and stores the result.
void reelect_leaders(PartitionState& p, int cid, const PositionMap& positions,
                     const Scenario& scenario, const std::vector<ImportanceField>& fields);

// Valuation used to pick which secondary membership a UAV drops when it is
// over its transceiver bound: higher value is kept. Null keeps the lowest ids.
using MembershipValue = std::function<double(int uav, int coalition)>;

// Union with a fresh id; leaders re-elected; over-bound members drop their
// lowest-value secondary memberships. Throws PartitionError{UnknownCoalition}.
int merge(PartitionState& p, int c1, int c2, const PositionMap& positions,
          const Scenario& scenario, const std::vector<ImportanceField>& fields,
          const EventSink& sink = {}, const MembershipValue& value = nullptr);

// Moves `subset` (a strict non-empty subset of c's members) into a fresh
// coalition; leaders elected in both halves. Throws InvalidSubset/UnknownCoalition.
int split(PartitionState& p, int c, const std::set<int>& subset, const PositionMap& positions,
          const Scenario& scenario, const std::vector<ImportanceField>& fields,
          const EventSink& sink = {});

// Adds a secondary membership. Throws NoFreeTransceiver/AlreadyMember/UnknownCoalition.
void join(PartitionState& p, int uav, int c, const PositionMap& positions,
          const Scenario& scenario, const std::vector<ImportanceField>& fields,
          const EventSink& sink = {});

// Removes a membership; the UAV must retain at least one (a sole membership
// only changes via switch_primary). Leaders re-elected; empty coalitions are
// deleted. Throws LastMembership/NotMember/UnknownCoalition.
void leave(PartitionState& p, int uav, int c, const PositionMap& positions,
           const Scenario& scenario, const std::vector<ImportanceField>& fields,
           const EventSink& sink = {});

// Atomically moves the UAV's home coalition: joins `target` (kNewCoalition
// founds a fresh singleton), leaves the old primary, re-elects both sides.
inline constexpr int kNewCoalition = -1;
int switch_primary(PartitionState& p, int uav, int target, const PositionMap& positions,
                   const Scenario& scenario, const std::vector<ImportanceField>& fields,
                   const EventSink& sink = {});

struct EmergencyCheck {
    bool emergency = false;
    std::optional<int> merge_with;  // queued ForceMerge target, backhaul failures only
};

// Emergency iff the ground leader's backhaul quality < theta or any member has
// no in-range relay path to it. Backhaul failures additionally request a merge
// with the nearest healthy coalition whose leader is within comm range.
EmergencyCheck check_emergency(PartitionState& p, int c, double theta,
                               const PositionMap& positions, const Scenario& scenario,
                               const EventSink& sink = {});

// Full invariant sweep; throws ValidationError naming the violated invariant.
void validate_partition(const PartitionState& p, const Scenario& scenario);

}  // namespace swarmsim

#endif  // SWARMSIM_COALITION_HPP
