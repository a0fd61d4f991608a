#include "tbtcp/sim/engine.hpp"

#include <fmt/format.h>

namespace tbtcp::sim {

std::uint32_t Engine::attach(EventHandler& handler)
{
    handlers_.push_back(&handler);
    return static_cast<std::uint32_t>(handlers_.size() - 1);
}

void Engine::schedule(Event ev)
{
    if (ev.fire_at < clock_)
        throw SimulationError(fmt::format("event scheduled in the past: fire_at={}ns clock={}ns kind={}",
                                          ev.fire_at.ns(), clock_.ns(), static_cast<int>(ev.kind)));
    if (ev.target >= handlers_.size())
        throw SimulationError(fmt::format("event targets unknown handler {}", ev.target));
    queue_.push(std::move(ev));
}

void Engine::schedule_at(SimTime at, EventKind kind, std::uint32_t target, std::uint32_t index, std::uint32_t tag)
{
    Event ev;
    ev.fire_at = at;
    ev.kind = kind;
    ev.target = target;
    ev.index = index;
    ev.tag = tag;
    schedule(std::move(ev));
}

SimulationSummary Engine::run_until(SimTime t_end)
{
    while (!queue_.empty() && queue_.top().fire_at <= t_end) {
        Event ev = queue_.pop();
        clock_ = ev.fire_at;
        ++processed_;
        handlers_[ev.target]->handle(*this, ev);
    }
    if (!queue_.empty() && clock_ < t_end)
        clock_ = t_end;
    return summary();
}

SimulationSummary Engine::summary() const
{
    SimulationSummary s;
    s.clock = clock_;
    s.events_processed = processed_;
    for (const EventHandler* h : handlers_)
        h->contribute(s);
    return s;
}

} // namespace tbtcp::sim
