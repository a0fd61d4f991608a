#pragma once

#include "tbtcp/net/marking.hpp"
#include "tbtcp/net/packet.hpp"
#include "tbtcp/sim/engine.hpp"
#include "tbtcp/sim/rng.hpp"
#include "tbtcp/sim/time.hpp"

#include <cstdint>
#include <deque>
#include <string>

namespace tbtcp::net {

enum class QueueEvent : std::uint8_t { enqueue, dequeue, drop, mark };

const char* to_string(QueueEvent ev);

class QueueObserver {
public:
    virtual ~QueueObserver() = default;
    /// `depth` is the number of waiting packets after the event took effect.
    virtual void on_queue_event(sim::SimTime now, std::int64_t depth, QueueEvent ev) = 0;
};

struct EnqueueOutcome {
    bool accepted = false;
    bool marked = false;
};

/// Drop-tail FIFO measured in packets, with marking applied on enqueue using
/// the depth seen before the arriving packet is inserted. The packet being
/// serialized on the egress link is not counted as waiting.
class BottleneckQueue {
public:
    BottleneckQueue(std::string name, std::int64_t capacity, MarkingPolicy policy, sim::RngStream rng);

    EnqueueOutcome enqueue(Packet& pkt, sim::SimTime now);
    Packet pop_front(sim::SimTime now);

    bool empty() const { return fifo_.empty(); }
    std::int64_t depth() const { return static_cast<std::int64_t>(fifo_.size()); }
    std::int64_t capacity() const { return capacity_; }
    std::int64_t occupancy_bytes() const { return occupancy_bytes_; }
    const MarkingPolicy& policy() const { return policy_; }

    void set_observer(QueueObserver* obs) { observer_ = obs; }
    sim::QueueCounters counters() const;

private:
    void notify(sim::SimTime now, QueueEvent ev);

    std::string name_;
    std::int64_t capacity_;
    MarkingPolicy policy_;
    sim::RngStream rng_;
    std::deque<Packet> fifo_;
    std::int64_t occupancy_bytes_ = 0;
    std::uint64_t enqueued_ = 0;
    std::uint64_t dequeued_ = 0;
    std::uint64_t dropped_ = 0;
    std::uint64_t marked_ = 0;
    QueueObserver* observer_ = nullptr;
};

} // namespace tbtcp::net
