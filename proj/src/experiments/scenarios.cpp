#include "tbtcp/experiments/scenarios.hpp"

#include "tbtcp/net/link.hpp"

#include <fmt/format.h>

#include <cmath>

namespace tbtcp::experiments {

using sim::SimTime;
using transport::Algorithm;

double dctcp_threshold(double bandwidth_bps, SimTime rtt)
{
    return std::round(net::bdp_packets(bandwidth_bps, rtt) / 7.0);
}

namespace {

ExperimentConfig base(const std::string& name, double gbps, SimTime duration)
{
    ExperimentConfig c;
    c.name = name;
    c.bottleneck_bps = gbps * 1e9;
    c.duration = duration;
    c.trace_queue = true;
    return c;
}

void use_tbtcp(ExperimentConfig& c, double beta = 0.1)
{
    c.transport.algorithm = Algorithm::tbtcp;
    c.transport.beta = beta;
    c.marking.kind = MarkingKind::ideal;
    c.marking.bdp_basis = BdpBasis::min_rtt;
    c.marking.l_packets = 0.0;
}

void use_dctcp(ExperimentConfig& c, double k, bool rai = false, double beta = 0.1)
{
    c.transport.algorithm = rai ? Algorithm::dctcp_rai : Algorithm::dctcp;
    c.transport.beta = beta;
    c.marking.kind = MarkingKind::threshold;
    c.marking.k_packets = k;
}

// 40Gbps, 160us: the single-RTT queue-depth studies.
constexpr double kQueueGbps = 40.0;
constexpr SimTime kQueueRtt = SimTime::from_us(160);

Scenario beta_sweep(Scale s)
{
    Scenario sc{"beta-sweep", "TBTCP mean queue vs beta, n=100 at 40Gbps/160us (expected near beta*n)", {}};
    const SimTime dur = s == Scale::fast ? SimTime::from_ms(200) : SimTime::from_s(10);
    for (double beta : {0.1, 0.2, 0.4}) {
        ExperimentConfig c = base(fmt::format("beta-sweep-b{}", beta), kQueueGbps, dur);
        use_tbtcp(c, beta);
        c.flows = long_lived(100, kQueueRtt);
        sc.runs.push_back(c);
    }
    return sc;
}

Scenario tbtcp_queue(Scale s)
{
    Scenario sc{"tbtcp-queue", "TBTCP with the ideal marking curve, beta=0.1, n in {50,100}", {}};
    const SimTime dur = s == Scale::fast ? SimTime::from_ms(200) : SimTime::from_s(10);
    for (int n : {50, 100}) {
        ExperimentConfig c = base(fmt::format("tbtcp-queue-n{}", n), kQueueGbps, dur);
        use_tbtcp(c);
        c.flows = long_lived(n, kQueueRtt);
        sc.runs.push_back(c);
    }
    return sc;
}

Scenario queue_cdf(Scale s)
{
    Scenario sc{"queue-cdf", "queue depth distribution for dctcp, dctcp_rai and tbtcp over n in {50,100,200}", {}};
    const SimTime dur = s == Scale::fast ? SimTime::from_ms(200) : SimTime::from_s(10);
    const double k = dctcp_threshold(kQueueGbps * 1e9, kQueueRtt);
    for (const char* alg : {"dctcp", "dctcp_rai", "tbtcp"}) {
        for (int n : {50, 100, 200}) {
            ExperimentConfig c = base(fmt::format("queue-cdf-{}-n{}", alg, n), kQueueGbps, dur);
            const std::string a = alg;
            if (a == "tbtcp")
                use_tbtcp(c);
            else
                use_dctcp(c, k, a == "dctcp_rai");
            c.flows = long_lived(n, kQueueRtt);
            sc.runs.push_back(c);
        }
    }
    return sc;
}

Scenario reduced_k(Scale s)
{
    Scenario sc{"reduced-k", "utilization of dctcp at k in {76,90} and dctcp_rai at k in {38,45}, n=100", {}};
    const SimTime dur = s == Scale::fast ? SimTime::from_ms(200) : SimTime::from_s(10);
    auto add = [&](double k, bool rai) {
        ExperimentConfig c = base(fmt::format("reduced-k-{}-k{}", rai ? "dctcp_rai" : "dctcp", k), kQueueGbps, dur);
        use_dctcp(c, k, rai);
        c.flows = long_lived(100, kQueueRtt);
        sc.runs.push_back(c);
    };
    add(76, false);
    add(90, false);
    add(38, true);
    add(45, true);
    return sc;
}

Scenario fairness(Scale s)
{
    Scenario sc{"fairness", "four TBTCP flows started one period apart, each lasting four periods", {}};
    const SimTime period = s == Scale::fast ? SimTime::from_ms(400) : SimTime::from_s(10);
    for (double gbps : {1.0, 10.0}) {
        ExperimentConfig c = base(fmt::format("fairness-{}g", gbps), gbps, period * 7);
        use_tbtcp(c);
        for (int i = 0; i < 4; ++i) {
            FlowSpec f;
            f.rtt = kQueueRtt;
            f.start = period * i;
            f.stop = period * (i + 4);
            c.flows.push_back(f);
        }
        // Final half of the span where all four flows are active.
        c.measure_from = period * 3 + SimTime::from_ns(period.ns() / 2);
        c.measure_until = period * 4;
        c.warmup = period * 3;
        c.throughput_window = s == Scale::fast ? SimTime::from_ms(10) : SimTime::from_ms(100);
        c.convergence_events = {period, period * 2, period * 3, period * 4, period * 5, period * 6};
        c.trace_flows = true;
        sc.runs.push_back(c);
    }
    return sc;
}

ExperimentConfig two_flow(const std::string& name, Scale s)
{
    // First flow [0, 2T], second [T, 3T]; 10Gbps, 80us.
    const SimTime period = s == Scale::fast ? SimTime::from_ms(500) : SimTime::from_s(10);
    ExperimentConfig c = base(name, 10.0, period * 3);
    FlowSpec a;
    a.rtt = SimTime::from_us(80);
    a.stop = period * 2;
    FlowSpec b = a;
    b.start = period;
    b.stop = period * 3;
    c.flows = {a, b};
    c.convergence_events = {period, period * 2};
    c.warmup = period;
    c.trace_flows = true;
    return c;
}

Scenario convergence(Scale s)
{
    Scenario sc{"convergence", "two-flow join/leave at 10Gbps/80us for tbtcp, dctcp and dctcp_rai", {}};
    const double k = dctcp_threshold(10e9, SimTime::from_us(80));
    ExperimentConfig t = two_flow("convergence-tbtcp", s);
    use_tbtcp(t);
    ExperimentConfig d = two_flow("convergence-dctcp", s);
    use_dctcp(d, k);
    ExperimentConfig r = two_flow("convergence-dctcp_rai", s);
    use_dctcp(r, k, true);
    sc.runs = {t, d, r};
    return sc;
}

Scenario beta_convergence(Scale s)
{
    Scenario sc{"beta-convergence", "two-flow TBTCP convergence for beta in {0.1,0.2,0.3,0.5}", {}};
    for (double beta : {0.1, 0.2, 0.3, 0.5}) {
        ExperimentConfig c = two_flow(fmt::format("beta-convergence-b{}", beta), s);
        use_tbtcp(c, beta);
        sc.runs.push_back(c);
    }
    return sc;
}

Scenario rtt_fairness(Scale s)
{
    Scenario sc{"rtt-fairness",
                "four flows with RTT 20/60/100/140us on 40Gbps, 20Gbps access links; dctcp k=60KB vs tbtcp "
                "marking BDP from 50/80/110us",
                {}};
    const SimTime dur = s == Scale::fast ? SimTime::from_ms(300) : SimTime::from_s(10);
    auto flows = [] {
        std::vector<FlowSpec> out;
        for (double rtt : {20.0, 60.0, 100.0, 140.0}) {
            FlowSpec f;
            f.rtt = SimTime::from_us(rtt);
            out.push_back(f);
        }
        return out;
    };
    ExperimentConfig d = base("rtt-fairness-dctcp", kQueueGbps, dur);
    d.access_bps = 20e9;
    d.flows = flows();
    d.trace_flows = true;
    use_dctcp(d, 40.0);   // 60KB
    sc.runs.push_back(d);
    const std::pair<const char*, double> bases[] = {{"minrtt", 50.0}, {"avgrtt", 80.0}, {"maxrtt", 110.0}};
    for (const auto& [tag, rtt] : bases) {
        ExperimentConfig t = base(fmt::format("rtt-fairness-tbtcp-{}", tag), kQueueGbps, dur);
        t.access_bps = 20e9;
        t.flows = flows();
        t.trace_flows = true;
        use_tbtcp(t);
        t.marking.bdp_basis = BdpBasis::explicit_rtt;
        t.marking.bdp_rtt = SimTime::from_us(rtt);
        sc.runs.push_back(t);
    }
    return sc;
}

Scenario fct(Scale s)
{
    Scenario sc{"fct", "mixed workload (80% under 100KB) at 10Gbps/150us: tbtcp vs dctcp with k=BDP/7", {}};
    WorkloadSpec w;
    w.rtt = SimTime::from_us(150);
    w.load = 0.5;
    w.flow_count = s == Scale::fast ? 3000 : 30000;
    // Enough time for the arrivals plus the tail of the last long flows.
    const double arrivals_s = w.flow_count * w.mean_size() * 8.0 / (w.load * 10e9);
    const SimTime dur = SimTime::from_s(arrivals_s * 1.5 + 0.1);
    ExperimentConfig t = base("fct-tbtcp", 10.0, dur);
    t.workload = w;
    use_tbtcp(t);
    ExperimentConfig d = base("fct-dctcp", 10.0, dur);
    d.workload = w;
    use_dctcp(d, dctcp_threshold(10e9, w.rtt));
    sc.runs = {t, d};
    return sc;
}

using Builder = Scenario (*)(Scale);

struct Entry {
    const char* name;
    Builder build;
};

constexpr Entry kCatalog[] = {
    {"beta-sweep", beta_sweep},
    {"tbtcp-queue", tbtcp_queue},
    {"queue-cdf", queue_cdf},
    {"reduced-k", reduced_k},
    {"fairness", fairness},
    {"convergence", convergence},
    {"beta-convergence", beta_convergence},
    {"rtt-fairness", rtt_fairness},
    {"fct", fct},
};

} // namespace

std::vector<std::string> scenario_names()
{
    std::vector<std::string> out;
    for (const Entry& e : kCatalog)
        out.emplace_back(e.name);
    return out;
}

std::vector<Scenario> named_scenarios(Scale scale)
{
    std::vector<Scenario> out;
    for (const Entry& e : kCatalog)
        out.push_back(e.build(scale));
    return out;
}

std::optional<Scenario> find_scenario(const std::string& name, Scale scale)
{
    for (const Entry& e : kCatalog)
        if (name == e.name)
            return e.build(scale);
    return std::nullopt;
}

} // namespace tbtcp::experiments
