#pragma once

#include "tbtcp/sim/event.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tbtcp::sim {

/// Min-heap over (fire_at, seq). Equal timestamps pop in insertion order.
class EventQueue {
public:
    /// Assigns the tie-break sequence number and inserts.
    void push(Event ev);
    Event pop();

    const Event& top() const { return heap_.front(); }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    std::uint64_t inserted() const { return next_seq_; }

private:
    std::vector<Event> heap_;
    std::uint64_t next_seq_ = 0;
};

} // namespace tbtcp::sim
