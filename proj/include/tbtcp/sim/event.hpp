#pragma once

#include "tbtcp/net/packet.hpp"
#include "tbtcp/sim/time.hpp"

#include <cstdint>

namespace tbtcp::sim {

enum class EventKind : std::uint8_t {
    packet_arrival,
    timer_expiry,
    flow_start,
    flow_stop,
    sampler_tick,
};

/// A scheduled action. `target` names the handler; `index` and `tag` are
/// handler-defined (e.g. flow index, timer generation).
struct Event {
    SimTime fire_at;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::timer_expiry;
    std::uint32_t target = 0;
    std::uint32_t index = 0;
    std::uint32_t tag = 0;
    net::Packet packet{};
};

} // namespace tbtcp::sim
