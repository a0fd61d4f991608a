#include "tbtcp/experiments/run.hpp"
#include "tbtcp/experiments/workload.hpp"
#include "tbtcp/net/egress_port.hpp"
#include "tbtcp/sim/engine.hpp"
#include "tbtcp/transport/receiver.hpp"
#include "tbtcp/transport/sender.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <memory>
#include <thread>

namespace tbtcp::experiments {

using sim::Engine;
using sim::Event;
using sim::EventKind;
using sim::SimTime;

net::MarkingPolicy build_policy(const ExperimentConfig& cfg)
{
    const MarkingConfig& m = cfg.marking;
    switch (m.kind) {
    case MarkingKind::none: return net::NoMarking{};
    case MarkingKind::threshold: return net::make_threshold(m.k_packets);
    case MarkingKind::ideal: {
        const double bdp = marking_bdp_packets(cfg);
        if (bdp <= 0.0)
            return net::NoMarking{};   // no flows to derive an RTT from
        return net::make_ideal(bdp, m.l_packets, m.scale_r);
    }
    case MarkingKind::step_red: return net::make_step_red(m.t_min, m.t_max, m.p_max);
    }
    return net::NoMarking{};
}

namespace {

// Sender hosts, receiver hosts and the metric taps around one bottleneck port.
// Each flow has its own access NIC holding at most kNicSlots packets; the
// rest of the window waits in the socket until a slot frees, so a host-side
// backlog never hides congestion from the switch. Propagation is split
// evenly between the forward access leg and the ACK return path.
class Dumbbell final : public sim::EventHandler, public net::QueueObserver, public net::LinkObserver {
public:
    explicit Dumbbell(const ExperimentConfig& cfg)
        : cfg_(cfg),
          port_(net::BottleneckQueue("bottleneck", cfg.buffer_packets, build_policy(cfg),
                                     sim::RngStream(cfg.seed, sim::streams::marking)),
                net::Link{cfg.bottleneck_bps, SimTime{}}),
          access_{cfg.access_rate(), SimTime{}},
          warmup_(cfg.effective_warmup()),
          measure_from_(cfg.effective_measure_from()),
          measure_until_(cfg.effective_measure_until()),
          end_(cfg.duration)
    {
        std::vector<FlowSpec> specs = cfg.flows;
        sim::RngStream jitter(cfg.seed, sim::streams::start_jitter);
        if (cfg.start_jitter.ns() > 0)
            for (FlowSpec& f : specs)
                f.start += SimTime::from_ns(static_cast<std::int64_t>(jitter.uniform01() *
                                                                      static_cast<double>(cfg.start_jitter.ns())));
        if (cfg.workload) {
            sim::RngStream rng(cfg.seed, sim::streams::workload);
            for (const FlowSpec& f : generate_workload(*cfg.workload, cfg.bottleneck_bps, rng))
                specs.push_back(f);
        }
        flows_.reserve(specs.size());
        for (std::size_t i = 0; i < specs.size(); ++i) {
            Flow fl;
            fl.spec = specs[i];
            fl.id = static_cast<std::uint32_t>(i);
            fl.owd_fwd = SimTime::from_ns(fl.spec.rtt.ns() / 2);
            fl.owd_rev = fl.spec.rtt - fl.owd_fwd;
            fl.recv.flow_id = fl.id;
            fl.recv.delayed_ack_threshold = cfg.delayed_ack;
            flows_.push_back(std::move(fl));
        }
        traced_ = flows_.size() <= kMaxTracedFlows && (cfg.trace_flows || !cfg.convergence_events.empty());
        if (traced_) {
            const auto windows = static_cast<std::size_t>((end_.ns() + cfg.throughput_window.ns() - 1) /
                                                          cfg.throughput_window.ns());
            window_bytes_.assign(flows_.size(), std::vector<double>(windows, 0.0));
        }
    }

    void install(Engine& engine)
    {
        self_ = engine.attach(*this);
        port_.attach_to(engine);
        port_.set_downstream(self_);
        port_.queue().set_observer(this);
        port_.set_link_observer(this);
        for (const Flow& f : flows_) {
            if (f.spec.start > end_)
                continue;
            engine.schedule_at(f.spec.start, EventKind::flow_start, self_, f.id);
            if (f.spec.stop != SimTime::infinity() && f.spec.stop <= end_)
                engine.schedule_at(f.spec.stop, EventKind::flow_stop, self_, f.id);
        }
        engine.schedule_at(SimTime{}, EventKind::sampler_tick, self_);
    }

    void handle(Engine& engine, const Event& ev) override
    {
        switch (ev.kind) {
        case EventKind::flow_start: start_flow(engine, flows_[ev.index]); break;
        case EventKind::flow_stop: flows_[ev.index].sender.stop(); break;
        case EventKind::packet_arrival:
            if (ev.packet.is_ack)
                on_ack(engine, flows_[ev.packet.flow_id], ev.packet);
            else
                on_data(engine, flows_[ev.packet.flow_id], ev.packet);
            break;
        case EventKind::timer_expiry: on_timer(engine, flows_[ev.index], ev.tag); break;
        case EventKind::sampler_tick:
            if (cfg_.trace_queue || cfg_.trace_queue_events)
                queue_trace_.push_back({engine.now(), port_.queue().depth()});
            if (engine.now() + kSampleInterval <= end_)
                engine.schedule_at(engine.now() + kSampleInterval, EventKind::sampler_tick, self_);
            break;
        }
    }

    void contribute(sim::SimulationSummary& s) const override
    {
        for (const Flow& f : flows_) {
            sim::FlowCounters c;
            c.flow_id = f.id;
            c.bytes_sent = f.sender.bytes_sent();
            c.bytes_acked = static_cast<std::uint64_t>(f.sender.state().highest_acked);
            c.bytes_delivered = static_cast<std::uint64_t>(f.delivered);
            c.retransmits = f.sender.retransmits();
            s.flows.push_back(c);
        }
    }

    void on_queue_event(SimTime now, std::int64_t depth, net::QueueEvent ev) override
    {
        account_queue(now);
        depth_ = depth;
        if (cfg_.trace_queue_events)
            queue_trace_.push_back({now, depth, net::to_string(ev)});
    }


    void on_transmit(SimTime start, SimTime end, const net::Packet&) override
    {
        const SimTime lo = std::max(start, warmup_);
        const SimTime hi = std::min(end, end_);
        if (hi > lo)
            busy_ns_ += (hi - lo).ns();
    }

    MetricsReport finish(const Engine& engine)
    {
        account_queue(end_);
        MetricsReport r;
        r.name = cfg_.name;
        r.algorithm = std::string(transport::to_string(cfg_.transport.algorithm));
        r.config_hash = config_hash(cfg_);
        r.seed = cfg_.seed;
        r.mean_queue = hist_.mean();
        r.median_queue = hist_.quantile(0.5);
        r.p99_queue = hist_.quantile(0.99);
        r.max_queue = hist_.max();
        r.queue_cdf = hist_.cdf();
        r.utilization = static_cast<double>(busy_ns_) / static_cast<double>((end_ - warmup_).ns());
        r.queue = port_.queue().counters();
        r.events = engine.summary().events_processed;
        r.measure_from = measure_from_;
        r.measure_until = measure_until_;
        r.end = end_;
        r.queue_trace = std::move(queue_trace_);

        const double span = (measure_until_ - measure_from_).seconds();
        std::vector<double> measured;
        for (const Flow& f : flows_) {
            FlowMetrics m;
            m.flow_id = f.id;
            m.rtt = f.spec.rtt;
            m.bytes_delivered = f.delivered;
            m.retransmits = f.sender.retransmits();
            m.throughput_bps = static_cast<double>(f.delivered_measured) * 8.0 / span;
            m.measured = f.spec.start <= measure_from_ && f.spec.stop >= measure_until_ &&
                         f.spec.size_bytes == transport::kUnbounded;
            if (m.measured)
                measured.push_back(m.throughput_bps);
            r.flows.push_back(m);
            if (f.finished && f.spec.size_bytes != transport::kUnbounded)
                r.fct.push_back({f.id, f.spec.size_bytes, f.spec.start, f.finished_at - f.spec.start});
        }
        const bool any = std::any_of(measured.begin(), measured.end(), [](double x) { return x > 0.0; });
        r.jain = any ? jain_index(measured) : 0.0;

        if (traced_) {
            r.throughput.window = cfg_.throughput_window;
            r.throughput.capacity_bps = cfg_.bottleneck_bps;
            const double w = cfg_.throughput_window.seconds();
            for (std::size_t i = 0; i < flows_.size(); ++i) {
                std::vector<double> rates = window_bytes_[i];
                for (double& x : rates)
                    x = x * 8.0 / w;
                r.throughput.rates_bps.push_back(std::move(rates));
                r.throughput.active.emplace_back(flows_[i].spec.start, flows_[i].spec.stop);
            }
            for (SimTime t : cfg_.convergence_events)
                r.convergence_times.push_back(convergence_time(r.throughput, t));
        } else {
            r.convergence_times.assign(cfg_.convergence_events.size(), kNotConverged);
        }
        return r;
    }

private:
    static constexpr SimTime kSampleInterval = SimTime::from_us(100);
    static constexpr std::int64_t kNicSlots = 2;
    static constexpr std::uint32_t kNicWake = 0;   // timer tag; RTO generations start at 1

    struct Flow {
        FlowSpec spec;
        std::uint32_t id = 0;
        transport::Sender sender;
        transport::ReceiverState recv;
        SimTime owd_fwd;
        SimTime owd_rev;
        SimTime nic_free;
        SimTime rto_deadline;
        std::uint32_t timer_gen = 0;
        bool timer_armed = false;
        bool nic_wake_pending = false;
        bool started = false;
        bool finished = false;
        SimTime finished_at;
        std::int64_t delivered = 0;
        std::int64_t delivered_measured = 0;
    };

    void start_flow(Engine& engine, Flow& f)
    {
        f.sender = transport::Sender(f.id, cfg_.transport, f.spec.size_bytes);
        f.started = true;
        send(engine, f);
    }

    std::size_t nic_budget(const Engine& engine, const Flow& f) const
    {
        const std::int64_t ser = access_.serialization(net::kMss).ns();
        const std::int64_t backlog_ns = (f.nic_free - engine.now()).ns();
        const std::int64_t backlog = backlog_ns > 0 ? (backlog_ns + ser - 1) / ser : 0;
        return static_cast<std::size_t>(std::max<std::int64_t>(0, kNicSlots - backlog));
    }

    void send(Engine& engine, Flow& f)
    {
        out_.clear();
        f.sender.pace_window(engine.now(), out_, nic_budget(engine, f));
        transmit(engine, f, out_);
        wake_when_nic_drains(engine, f);
    }

    void wake_when_nic_drains(Engine& engine, Flow& f)
    {
        if (f.nic_wake_pending || !f.sender.has_window_room() || nic_budget(engine, f) > 0)
            return;
        const SimTime ser = access_.serialization(net::kMss);
        const SimTime at = std::max(engine.now(), f.nic_free - ser * (kNicSlots - 1));
        f.nic_wake_pending = true;
        engine.schedule_at(at, EventKind::timer_expiry, self_, f.id, kNicWake);
    }

    void transmit(Engine& engine, Flow& f, const std::vector<net::Packet>& pkts)
    {
        for (const net::Packet& p : pkts) {
            const SimTime begin = std::max(engine.now(), f.nic_free);
            f.nic_free = begin + access_.serialization(p.size);
            Event ev;
            ev.fire_at = f.nic_free + f.owd_fwd;
            ev.kind = EventKind::packet_arrival;
            ev.target = port_.target();
            ev.packet = p;
            engine.schedule(std::move(ev));
        }
        if (!pkts.empty())
            arm_timer(engine, f);
    }

    void arm_timer(Engine& engine, Flow& f)
    {
        if (f.timer_armed)
            return;
        f.rto_deadline = engine.now() + transport::rto_interval(f.sender.state());
        f.timer_armed = true;
        engine.schedule_at(f.rto_deadline, EventKind::timer_expiry, self_, f.id, ++f.timer_gen);
    }

    void on_timer(Engine& engine, Flow& f, std::uint32_t gen)
    {
        if (gen == kNicWake) {
            f.nic_wake_pending = false;
            if (!f.finished)
                send(engine, f);
            return;
        }
        if (gen != f.timer_gen || !f.timer_armed)
            return;
        f.timer_armed = false;
        if (f.finished || f.sender.state().in_flight() <= 0)
            return;
        if (engine.now() < f.rto_deadline) {
            f.timer_armed = true;
            engine.schedule_at(f.rto_deadline, EventKind::timer_expiry, self_, f.id, ++f.timer_gen);
            return;
        }
        out_.clear();
        f.sender.on_rto(engine.now(), out_, nic_budget(engine, f));
        transmit(engine, f, out_);
        wake_when_nic_drains(engine, f);
    }

    void on_data(Engine& engine, Flow& f, const net::Packet& pkt)
    {
        const std::int64_t before = f.recv.cumulative_ack;
        auto ack = transport::on_data_packet(f.recv, pkt);
        const std::int64_t gained = f.recv.cumulative_ack - before;
        if (gained > 0)
            record_delivery(engine.now(), f, gained);
        if (!ack)
            return;
        Event ev;
        ev.fire_at = engine.now() + f.owd_rev;
        ev.kind = EventKind::packet_arrival;
        ev.target = self_;
        ev.packet = *ack;
        engine.schedule(std::move(ev));
    }

    void on_ack(Engine& engine, Flow& f, const net::Packet& ack)
    {
        if (f.finished)
            return;
        transport::AckResult res = f.sender.on_ack(ack, engine.now());
        if (!res.retransmits.empty())
            transmit(engine, f, res.retransmits);
        if (res.newly_acked > 0 && f.sender.state().in_flight() > 0)
            f.rto_deadline = engine.now() + transport::rto_interval(f.sender.state());
        if (res.finished) {
            f.finished = true;
            f.finished_at = engine.now();
            f.timer_armed = false;
            return;
        }
        send(engine, f);
    }

    void record_delivery(SimTime now, Flow& f, std::int64_t bytes)
    {
        f.delivered += bytes;
        if (now >= measure_from_ && now <= measure_until_)
            f.delivered_measured += bytes;
        if (traced_) {
            const auto k = static_cast<std::size_t>(now.ns() / cfg_.throughput_window.ns());
            auto& series = window_bytes_[f.id];
            if (k < series.size())
                series[k] += static_cast<double>(bytes);
        }
    }

    void account_queue(SimTime now)
    {
        const SimTime lo = std::max(last_queue_event_, warmup_);
        const SimTime hi = std::min(now, end_);
        if (hi > lo)
            hist_.add(depth_, (hi - lo).ns());
        last_queue_event_ = now;
    }

    const ExperimentConfig& cfg_;
    net::EgressPort port_;
    net::Link access_;
    SimTime warmup_;
    SimTime measure_from_;
    SimTime measure_until_;
    SimTime end_;
    std::uint32_t self_ = 0;
    std::vector<Flow> flows_;
    std::vector<net::Packet> out_;

    QueueHistogram hist_;
    std::int64_t depth_ = 0;
    SimTime last_queue_event_;
    std::int64_t busy_ns_ = 0;
    bool traced_ = false;
    std::vector<std::vector<double>> window_bytes_;
    std::vector<QueueSample> queue_trace_;
};

} // namespace

MetricsReport run_experiment(const ExperimentConfig& cfg)
{
    validate(cfg);
    Engine engine;
    auto net = std::make_unique<Dumbbell>(cfg);
    net->install(engine);
    engine.run_until(cfg.duration);
    return net->finish(engine);
}

std::vector<MetricsReport> run_sweep(const std::vector<ExperimentConfig>& configs)
{
    std::vector<MetricsReport> out(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                out[i] = run_experiment(configs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n = std::min<std::size_t>(configs.size(), std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n; ++i)
        pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool)
        t.join();
    for (const std::exception_ptr& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

} // namespace tbtcp::experiments
