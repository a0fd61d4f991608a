#include "tbtcp/net/egress_port.hpp"

#include <utility>

namespace tbtcp::net {

EgressPort::EgressPort(BottleneckQueue queue, Link link) : queue_(std::move(queue)), link_(link) {}

void EgressPort::attach_to(sim::Engine& engine)
{
    self_ = engine.attach(*this);
}

void EgressPort::handle(sim::Engine& engine, const sim::Event& ev)
{
    if (ev.kind == sim::EventKind::packet_arrival) {
        Packet pkt = ev.packet;
        if (queue_.enqueue(pkt, engine.now()).accepted && !busy_)
            start_transmission(engine);
        return;
    }
    // Transmission of in_service_ finished.
    sim::Event out;
    out.fire_at = engine.now() + link_.propagation_delay;
    out.kind = sim::EventKind::packet_arrival;
    out.target = downstream_;
    out.index = in_service_.flow_id;
    out.packet = in_service_;
    engine.schedule(std::move(out));
    busy_ = false;
    if (!queue_.empty())
        start_transmission(engine);
}

void EgressPort::start_transmission(sim::Engine& engine)
{
    in_service_ = queue_.pop_front(engine.now());
    busy_ = true;
    const sim::SimTime done = engine.now() + link_.serialization(in_service_.size);
    if (link_observer_)
        link_observer_->on_transmit(engine.now(), done, in_service_);
    engine.schedule_at(done, sim::EventKind::timer_expiry, self_);
}

void EgressPort::contribute(sim::SimulationSummary& summary) const
{
    summary.queues.push_back(queue_.counters());
}

} // namespace tbtcp::net
