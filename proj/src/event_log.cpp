#include "swarmzones/event_log.hpp"

#include <charconv>
#include <stdexcept>

namespace swarmzones {

std::string_view to_string(EntityKind k) noexcept {
    switch (k) {
        case EntityKind::Drone: return "drone";
        case EntityKind::Person: return "person";
        case EntityKind::Zone: return "zone";
        case EntityKind::System: return "system";
    }
    return "unknown";
}

std::string_view SimEvent::field(std::string_view key) const noexcept {
    for (const auto& [k, v] : payload) {
        if (k == key) return v;
    }
    return {};
}

void EventLog::append(std::int64_t tick, EntityKind ek, std::int64_t entity, std::string kind, Payload payload) {
    if (!events_.empty() && tick < events_.back().tick) throw std::logic_error("event appended out of order");
    events_.push_back({tick, next_seq_++, ek, entity, std::move(kind), std::move(payload)});
}

bool EventLog::ordered() const noexcept {
    for (std::size_t i = 1; i < events_.size(); ++i) {
        const auto& a = events_[i - 1];
        const auto& b = events_[i];
        if (!(a.tick < b.tick || (a.tick == b.tick && a.seq < b.seq))) return false;
    }
    return true;
}

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace swarmzones
