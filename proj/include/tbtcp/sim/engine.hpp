#pragma once

#include "tbtcp/sim/event.hpp"
#include "tbtcp/sim/event_queue.hpp"
#include "tbtcp/sim/time.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tbtcp::sim {

/// Raised for logic errors that must abort a run (e.g. scheduling in the past).
class SimulationError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct QueueCounters {
    std::string name;
    std::uint64_t enqueued = 0;   // arrivals offered, including drops
    std::uint64_t dequeued = 0;
    std::uint64_t dropped = 0;
    std::uint64_t marked = 0;
    std::uint64_t residing = 0;

    bool conserved() const { return enqueued == dequeued + dropped + residing; }
};

struct FlowCounters {
    std::uint32_t flow_id = 0;
    std::uint64_t bytes_sent = 0;
    std::uint64_t bytes_acked = 0;
    std::uint64_t bytes_delivered = 0;
    std::uint64_t retransmits = 0;
};

struct SimulationSummary {
    SimTime clock;
    std::uint64_t events_processed = 0;
    std::vector<QueueCounters> queues;
    std::vector<FlowCounters> flows;
};

class Engine;

class EventHandler {
public:
    virtual ~EventHandler() = default;
    virtual void handle(Engine& engine, const Event& ev) = 0;
    /// Appends this component's counters to a run summary.
    virtual void contribute(SimulationSummary&) const {}
};

/// Single-threaded discrete-event engine. Not thread-safe; sweeps use one
/// engine per configuration.
class Engine {
public:
    SimTime now() const { return clock_; }

    /// Registers a handler and returns its target id for Event::target.
    std::uint32_t attach(EventHandler& handler);

    /// Throws SimulationError when ev.fire_at < now().
    void schedule(Event ev);
    void schedule_at(SimTime at, EventKind kind, std::uint32_t target, std::uint32_t index = 0,
                     std::uint32_t tag = 0);

    /// Dispatches every event with fire_at <= t_end in (fire_at, seq) order.
    /// Afterwards the clock is t_end if events remain, otherwise the time of
    /// the last dispatched event.
    SimulationSummary run_until(SimTime t_end);

    SimulationSummary summary() const;

    std::size_t pending() const { return queue_.size(); }

private:
    SimTime clock_;
    EventQueue queue_;
    std::vector<EventHandler*> handlers_;
    std::uint64_t processed_ = 0;
};

} // namespace tbtcp::sim
