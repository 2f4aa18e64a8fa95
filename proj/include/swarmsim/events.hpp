#ifndef SWARMSIM_EVENTS_HPP
#define SWARMSIM_EVENTS_HPP

#include <string>
#include <vector>

namespace swarmsim {

enum class EventKind {
    AddField,
    RemoveField,
    Merge,
    Split,
    Join,
    Leave,
    Switch,
    Emergency,
    EmergencyMergeRequest,
    DirectiveRejected,
};

const char* event_kind_name(EventKind k);

struct TraceEvent {
    int step = 0;
    EventKind kind = EventKind::Merge;
    std::vector<int> coalitions;
    std::vector<int> uavs;
    std::string note;  // free-form detail, e.g. rejection reason
};

// Hands trace events up from partition/game operations without coupling them
// to the engine. A null sink drops events (scratch evaluations).
struct EventSink {
    int step = 0;
    std::vector<TraceEvent>* out = nullptr;

    void emit(EventKind kind, std::vector<int> coalitions, std::vector<int> uavs,
              std::string note = {}) const {
        if (out == nullptr) return;
        out->push_back(TraceEvent{step, kind, std::move(coalitions), std::move(uavs), std::move(note)});
    }
};

}  // namespace swarmsim

#endif  // SWARMSIM_EVENTS_HPP
