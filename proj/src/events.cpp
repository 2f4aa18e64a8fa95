#include "swarmsim/events.hpp"

namespace swarmsim {

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::AddField: return "add_field";
        case EventKind::RemoveField: return "remove_field";
        case EventKind::Merge: return "merge";
        case EventKind::Split: return "split";
        case EventKind::Join: return "join";
        case EventKind::Leave: return "leave";
        case EventKind::Switch: return "switch";
        case EventKind::Emergency: return "emergency";
        case EventKind::EmergencyMergeRequest: return "emergency_merge_request";
        case EventKind::DirectiveRejected: return "directive_rejected";
    }
    return "unknown";
}

}  // namespace swarmsim
