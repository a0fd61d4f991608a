#include "tbtcp/sim/event_queue.hpp"

#include <algorithm>
#include <utility>

namespace tbtcp::sim {

namespace {

struct Later {
    bool operator()(const Event& a, const Event& b) const
    {
        if (a.fire_at != b.fire_at)
            return a.fire_at > b.fire_at;
        return a.seq > b.seq;
    }
};

} // namespace

void EventQueue::push(Event ev)
{
    ev.seq = next_seq_++;
    heap_.push_back(std::move(ev));
    std::push_heap(heap_.begin(), heap_.end(), Later{});
}

Event EventQueue::pop()
{
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Event ev = std::move(heap_.back());
    heap_.pop_back();
    return ev;
}

} // namespace tbtcp::sim
