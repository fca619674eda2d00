#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace swarmzones {

enum class EntityKind { Drone, Person, Zone, System };

std::string_view to_string(EntityKind k) noexcept;

/// Ordered payload fields; values are preformatted so exports are bit-exact.
using Payload = std::vector<std::pair<std::string, std::string>>;

struct SimEvent {
    std::int64_t tick = 0;
    std::int64_t seq = 0;
    EntityKind entity_kind = EntityKind::System;
    std::int64_t entity = 0;
    std::string kind;
    Payload payload;

    std::string_view field(std::string_view key) const noexcept;
};

/// Append-only log; seq is global so (tick, seq) is strictly increasing as
/// long as ticks are appended in non-decreasing order.
class EventLog {
public:
    void append(std::int64_t tick, EntityKind ek, std::int64_t entity, std::string kind, Payload payload = {});

    const std::vector<SimEvent>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool ordered() const noexcept;

private:
    std::vector<SimEvent> events_;
    std::int64_t next_seq_ = 0;
};

/// Shortest round-trip decimal form of a double.
std::string fmt_double(double v);

}  // namespace swarmzones
