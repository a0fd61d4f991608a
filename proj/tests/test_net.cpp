#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tbtcp/net/bottleneck_queue.hpp"
#include "tbtcp/net/egress_port.hpp"
#include "tbtcp/net/link.hpp"
#include "tbtcp/net/marking.hpp"
#include "tbtcp/sim/engine.hpp"

#include <cmath>
#include <vector>

using namespace tbtcp;
using namespace tbtcp::net;
using sim::SimTime;

namespace {

Packet data_packet(std::uint32_t flow = 0)
{
    Packet p;
    p.flow_id = flow;
    p.size = kMss;
    p.ect = true;
    return p;
}

BottleneckQueue make_queue(MarkingPolicy policy, std::int64_t capacity = 1000, std::uint64_t seed = 1)
{
    return BottleneckQueue("test", capacity, std::move(policy), sim::RngStream(seed, sim::streams::marking));
}

// Enqueue-then-pop at a constant waiting depth q; returns the number of marks.
int marks_at_depth(BottleneckQueue& queue, int q, int trials)
{
    Packet pkt = data_packet();
    while (queue.depth() < q) {
        Packet fill = pkt;
        queue.enqueue(fill, SimTime{});
    }
    int marks = 0;
    for (int i = 0; i < trials; ++i) {
        Packet p = pkt;
        if (queue.enqueue(p, SimTime{}).marked)
            ++marks;
        queue.pop_front(SimTime{});
    }
    return marks;
}

struct Sink : sim::EventHandler {
    std::vector<std::int64_t> arrivals;
    void handle(sim::Engine& engine, const sim::Event&) override { arrivals.push_back(engine.now().ns()); }
};

} // namespace

TEST_CASE("ideal curve values")
{
    const auto ideal = make_ideal(120.0, 0.0, 1);
    CHECK(mark_probability(ideal, 0.0) == 0.0);
    CHECK(mark_probability(ideal, 120.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mark_probability(ideal, 40.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(mark_probability(ideal, 1000.0) == 0.5);
    CHECK(mark_probability(make_ideal(120.0, 0.0, 4), 1000.0) == 0.125);
}

TEST_CASE("threshold marks strictly above k")
{
    const auto policy = make_threshold(65.0);
    CHECK(mark_probability(policy, 65.0) == 0.0);
    CHECK(mark_probability(policy, 66.0) == 1.0);
    CHECK(mark_probability(policy, 0.0) == 0.0);
}

TEST_CASE("step red values")
{
    const auto policy = make_step_red(0.0, 80.0, 0.8);
    CHECK(mark_probability(policy, 5.0) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(mark_probability(policy, 0.0) == 0.0);
    CHECK(mark_probability(policy, 10.0) == doctest::Approx(0.05).epsilon(1e-12));   // right-closed A_0
    CHECK(mark_probability(policy, 11.0) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(mark_probability(policy, 80.0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(mark_probability(policy, 81.0) == 1.0);
}

TEST_CASE("degenerate policies are rejected")
{
    CHECK_THROWS_AS(make_ideal(0.0), PolicyError);
    CHECK_THROWS_AS(make_ideal(-3.0), PolicyError);
    CHECK_THROWS_AS(make_step_red(80.0, 80.0, 0.5), PolicyError);
    CHECK_THROWS_AS(make_step_red(90.0, 80.0, 0.5), PolicyError);
    CHECK_THROWS_AS(make_step_red(0.0, 80.0, 1.5), PolicyError);
    CHECK_THROWS_AS(make_threshold(-1.0), PolicyError);
}

TEST_CASE("curve shape properties")
{
    for (int r = 1; r <= 4; ++r) {
        const double bdp = 133.3;
        const double l = 20.0;
        double prev = 0.0;
        for (double q = 0.0; q <= 400.0; q += 0.25) {
            const double p = corrected_curve(q, bdp, l, r);
            CHECK(p >= prev);
            CHECK(p <= 0.5 / r + 1e-15);
            prev = p;
        }
        const double below = corrected_curve(bdp + l, bdp, l, r);
        const double above = corrected_curve(bdp + l + 1e-9, bdp, l, r);
        CHECK(below == doctest::Approx(0.5 / r).epsilon(1e-12));
        CHECK(above == doctest::Approx(0.5 / r).epsilon(1e-12));
    }
    for (double p_max : {0.1, 0.35, 0.7, 1.0}) {
        double prev = 0.0;
        for (double q = 0.0; q <= 120.0; q += 0.1) {
            const double p = step_red_curve(q, 20.0, 100.0, p_max);
            CHECK(p >= prev);
            if (q > 20.0 && q <= 100.0)
                CHECK(p <= p_max);
            prev = p;
        }
    }
}

TEST_CASE("drop-tail on a full queue")
{
    auto queue = make_queue(NoMarking{}, 3);
    for (int i = 0; i < 3; ++i) {
        Packet p = data_packet();
        CHECK(queue.enqueue(p, SimTime{}).accepted);
    }
    Packet p = data_packet();
    const auto out = queue.enqueue(p, SimTime{});
    CHECK_FALSE(out.accepted);
    CHECK_FALSE(p.ce_marked);
    CHECK(queue.depth() == 3);
    CHECK(queue.counters().dropped == 1);
    CHECK(queue.counters().conserved());
}

TEST_CASE("null policy never marks; certain policy always marks ECT data")
{
    auto none = make_queue(NoMarking{});
    for (int i = 0; i < 100; ++i) {
        Packet p = data_packet();
        CHECK_FALSE(none.enqueue(p, SimTime{}).marked);
    }
    auto certain = make_queue(make_step_red(0.0, 10.0, 0.5));
    CHECK(marks_at_depth(certain, 11, 200) == 200);

    Packet not_ect = data_packet();
    not_ect.ect = false;
    CHECK_FALSE(certain.enqueue(not_ect, SimTime{}).marked);
    CHECK_FALSE(not_ect.ce_marked);

    Packet ack = data_packet();
    ack.is_ack = true;
    ack.ect = true;
    CHECK_FALSE(certain.enqueue(ack, SimTime{}).marked);
}

TEST_CASE("marking is unbiased at a pinned depth")
{
    struct Case {
        MarkingPolicy policy;
        int q;
    };
    const std::vector<Case> cases = {
        {make_ideal(120.0), 15},
        {make_ideal(533.3), 10},
        {make_ideal(200.0, 50.0, 4), 80},
        {make_step_red(10.0, 90.0, 0.2), 37},
    };
    std::uint64_t seed = 11;
    for (const Case& c : cases) {
        auto queue = make_queue(c.policy, 1000, seed++);
        constexpr int n = 100'000;
        const int marks = marks_at_depth(queue, c.q, n);
        const double p = mark_probability(c.policy, c.q);
        const double se = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::abs(static_cast<double>(marks) / n - p) <= 3.0 * se);
    }
}

TEST_CASE("ideal marking cancels exactly Q packets per BDP+Q enqueues in expectation")
{
    const double bdp = 120.0;
    for (int q : {5, 12, 40}) {
        auto queue = make_queue(make_ideal(bdp), 1000, 100 + static_cast<std::uint64_t>(q));
        const int window = static_cast<int>(bdp) + q;
        constexpr int trials = 400;
        const int marks = marks_at_depth(queue, q, window * trials);
        const double mean_per_window = static_cast<double>(marks) / trials;
        CHECK(std::abs(mean_per_window - q) <= 0.05 * q);
    }
}

TEST_CASE("queue conservation under random traffic")
{
    auto queue = make_queue(make_ideal(50.0), 40, 9);
    sim::RngStream rng(3, 0);
    for (int i = 0; i < 20000; ++i) {
        if (rng.uniform01() < 0.55) {
            Packet p = data_packet();
            queue.enqueue(p, SimTime{});
        } else if (!queue.empty()) {
            queue.pop_front(SimTime{});
        }
        CHECK(queue.depth() <= queue.capacity());
        CHECK(queue.depth() >= 0);
    }
    CHECK(queue.counters().conserved());
}

TEST_CASE("serialization time")
{
    const Link ten_gig{10e9, SimTime{}};
    CHECK(ten_gig.serialization(1500) == SimTime::from_ns(1200));
    const Link forty_gig{40e9, SimTime{}};
    CHECK(forty_gig.serialization(1500) == SimTime::from_ns(300));
    const Link odd{3e9, SimTime{}};
    CHECK(odd.serialization(1) == SimTime::from_ns(3));   // 2.67ns rounds up
}

TEST_CASE("bandwidth-delay product in packets")
{
    CHECK(bdp_packets(40e9, SimTime::from_us(160)) == doctest::Approx(533.333).epsilon(1e-5));
    CHECK(bdp_packets(40e9, SimTime::from_us(250)) / 7.0 == doctest::Approx(119.05).epsilon(1e-3));
}

TEST_CASE("egress port is work conserving")
{
    sim::Engine engine;
    Sink sink;
    const auto sink_id = engine.attach(sink);
    EgressPort port(make_queue(NoMarking{}), Link{10e9, SimTime::from_us(5)});
    port.attach_to(engine);
    port.set_downstream(sink_id);

    for (int i = 0; i < 2; ++i) {
        sim::Event ev;
        ev.fire_at = SimTime::from_us(100);
        ev.kind = sim::EventKind::packet_arrival;
        ev.target = port.target();
        ev.packet = data_packet();
        engine.schedule(ev);
    }
    engine.run_until(SimTime::from_s(1));
    REQUIRE(sink.arrivals.size() == 2);
    CHECK(sink.arrivals[0] == 100'000 + 1200 + 5000);
    CHECK(sink.arrivals[1] == sink.arrivals[0] + 1200);
    const auto summary = engine.summary();
    REQUIRE(summary.queues.size() == 1);
    CHECK(summary.queues[0].dequeued == 2);
    CHECK(summary.queues[0].conserved());
}
