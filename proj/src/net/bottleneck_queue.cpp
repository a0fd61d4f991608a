#include "tbtcp/net/bottleneck_queue.hpp"

#include <utility>

namespace tbtcp::net {

const char* to_string(QueueEvent ev)
{
    switch (ev) {
    case QueueEvent::enqueue: return "enq";
    case QueueEvent::dequeue: return "deq";
    case QueueEvent::drop: return "drop";
    case QueueEvent::mark: return "mark";
    }
    return "?";
}

BottleneckQueue::BottleneckQueue(std::string name, std::int64_t capacity, MarkingPolicy policy, sim::RngStream rng)
    : name_(std::move(name)), capacity_(capacity), policy_(std::move(policy)), rng_(std::move(rng))
{
}

void BottleneckQueue::notify(sim::SimTime now, QueueEvent ev)
{
    if (observer_)
        observer_->on_queue_event(now, depth(), ev);
}

EnqueueOutcome BottleneckQueue::enqueue(Packet& pkt, sim::SimTime now)
{
    ++enqueued_;
    if (depth() >= capacity_) {
        ++dropped_;
        notify(now, QueueEvent::drop);
        return {false, false};
    }
    const double p = mark_probability(policy_, static_cast<double>(depth()));
    // Draw even when p is 0 or 1 so the stream position depends only on arrivals.
    const double u = rng_.uniform01();
    const bool mark = pkt.ect && !pkt.is_ack && u < p;
    if (mark) {
        pkt.ce_marked = true;
        ++marked_;
    }
    occupancy_bytes_ += pkt.size;
    fifo_.push_back(pkt);
    notify(now, mark ? QueueEvent::mark : QueueEvent::enqueue);
    return {true, mark};
}

Packet BottleneckQueue::pop_front(sim::SimTime now)
{
    Packet pkt = fifo_.front();
    fifo_.pop_front();
    occupancy_bytes_ -= pkt.size;
    ++dequeued_;
    notify(now, QueueEvent::dequeue);
    return pkt;
}

sim::QueueCounters BottleneckQueue::counters() const
{
    sim::QueueCounters c;
    c.name = name_;
    c.enqueued = enqueued_;
    c.dequeued = dequeued_;
    c.dropped = dropped_;
    c.marked = marked_;
    c.residing = fifo_.size();
    return c;
}

} // namespace tbtcp::net
