#pragma once

#include "tbtcp/net/bottleneck_queue.hpp"
#include "tbtcp/net/link.hpp"
#include "tbtcp/sim/engine.hpp"

#include <cstdint>
#include <functional>

namespace tbtcp::net {

class LinkObserver {
public:
    virtual ~LinkObserver() = default;
    virtual void on_transmit(sim::SimTime start, sim::SimTime end, const Packet& pkt) = 0;
};

/// A queue draining onto a link. Work-conserving: whenever the queue is
/// non-empty the link is serializing its head packet. Departed packets are
/// scheduled as packet_arrival events on `downstream` after the link's
/// propagation delay.
class EgressPort : public sim::EventHandler {
public:
    EgressPort(BottleneckQueue queue, Link link);

    void attach_to(sim::Engine& engine);
    void set_downstream(std::uint32_t target) { downstream_ = target; }
    void set_link_observer(LinkObserver* obs) { link_observer_ = obs; }

    std::uint32_t target() const { return self_; }
    BottleneckQueue& queue() { return queue_; }
    const BottleneckQueue& queue() const { return queue_; }
    const Link& link() const { return link_; }
    bool busy() const { return busy_; }

    /// packet_arrival enqueues; timer_expiry completes the current transmission.
    void handle(sim::Engine& engine, const sim::Event& ev) override;
    void contribute(sim::SimulationSummary& summary) const override;

private:
    void start_transmission(sim::Engine& engine);

    BottleneckQueue queue_;
    Link link_;
    std::uint32_t self_ = 0;
    std::uint32_t downstream_ = 0;
    bool busy_ = false;
    Packet in_service_{};
    LinkObserver* link_observer_ = nullptr;
};

} // namespace tbtcp::net
