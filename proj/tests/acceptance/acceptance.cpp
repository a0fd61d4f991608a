// Acceptance checks, one verdict line per criterion. Usage: acceptance [n...]
// with no arguments runs every criterion. Exit status is 0 only if every
// selected criterion passes.

#include "tbtcp/curvefit/curvefit.hpp"
#include "tbtcp/experiments/report.hpp"
#include "tbtcp/experiments/run.hpp"
#include "tbtcp/experiments/scenarios.hpp"
#include "tbtcp/net/bottleneck_queue.hpp"
#include "tbtcp/net/marking.hpp"
#include "tbtcp/sim/trace.hpp"
#include "tbtcp/transport/congestion.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

using namespace tbtcp;
using namespace tbtcp::experiments;
using sim::fixed;
using sim::SimTime;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

void info(const std::string& line)
{
    std::printf("  INFO %s\n", line.c_str());
}

Scenario scenario(const std::string& name)
{
    auto sc = find_scenario(name, Scale::fast);
    if (!sc)
        throw std::runtime_error("missing scenario " + name);
    return *sc;
}

const MetricsReport& by_name(const std::vector<MetricsReport>& rs, const std::string& name)
{
    for (const MetricsReport& r : rs)
        if (r.name == name)
            return r;
    throw std::runtime_error("missing run " + name);
}

std::string ms(SimTime t)
{
    return converged(t) ? fixed(static_cast<double>(t.ns()) / 1e6, 1) + "ms" : "not-converged";
}

bool exact(double got, double want)
{
    return std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want));
}

// Least-squares slope of y over x.
double slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

Verdict table_regression()
{
    bool pass = true;
    for (const curvefit::TableRow& row : curvefit::reproduce_table()) {
        const bool p_ok = std::abs(row.fit.p_max - row.published.p_max) <= 0.05;
        const bool e_ok = std::abs(row.fit.err - row.published.err) <= 0.15 * row.published.err;
        pass = pass && p_ok && e_ok;
        info(fmt::format("r={} p_max={} (published {}, {}) err={} (published {}, {:+.1f}%, {})", row.r,
                         fixed(row.fit.p_max, 4), fixed(row.published.p_max, 2), p_ok ? "ok" : "off",
                         fixed(row.fit.err, 4), fixed(row.published.err, 2),
                         100.0 * (row.fit.err / row.published.err - 1.0), e_ok ? "ok" : "off"));
    }
    return {pass, "P_max within 0.05 and err within 15% for r=1..4 (err in KB, integrated over [t_min, t_max])"};
}

ExperimentConfig tbtcp_long_lived(const std::string& name, double gbps, SimTime duration, int n)
{
    ExperimentConfig c;
    c.name = name;
    c.bottleneck_bps = gbps * 1e9;
    c.duration = duration;
    c.transport.algorithm = transport::Algorithm::tbtcp;
    c.transport.beta = 0.1;
    c.marking.kind = MarkingKind::ideal;
    c.marking.l_packets = 0.0;
    c.flows = long_lived(n, SimTime::from_us(160));
    return c;
}

Verdict queue_law()
{
    // As stated: 1Gbps, 160us, beta 0.1.
    std::vector<ExperimentConfig> literal;
    for (int n : {50, 100})
        literal.push_back(tbtcp_long_lived(fmt::format("1g-n{}", n), 1.0, SimTime::from_s(2), n));
    const auto rs = run_sweep(literal);
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const double bn = 0.1 * static_cast<double>(literal[i].flows.size());
        const bool ok = rs[i].mean_queue >= 0.5 * bn && rs[i].mean_queue <= 2.0 * bn;
        pass = pass && ok;
        detail += fmt::format("{}n={} mean={} band=[{}, {}]", i ? "; " : "", literal[i].flows.size(),
                              fixed(rs[i].mean_queue, 2), fixed(0.5 * bn, 1), fixed(2.0 * bn, 1));
        info(fmt::format("1Gbps n={} bdp={} pkts mean={} median={} util={}", literal[i].flows.size(),
                         fixed(marking_bdp_packets(literal[i]), 1), fixed(rs[i].mean_queue, 2),
                         fixed(rs[i].median_queue, 0), fixed(rs[i].utilization, 4)));
    }
    // Same law at the simulated study's 40Gbps, where n*2 packets of minimum
    // window fit inside the BDP.
    for (const MetricsReport& r : run_sweep(scenario("tbtcp-queue").runs))
        info(fmt::format("40Gbps {} mean={} median={} util={}", r.name, fixed(r.mean_queue, 2),
                         fixed(r.median_queue, 0), fixed(r.utilization, 4)));
    return {pass, "1Gbps/160us: " + detail};
}

Verdict buffer_decoupling()
{
    const auto rs = run_sweep(scenario("queue-cdf").runs);
    const std::vector<double> ns = {50, 100, 200};
    std::vector<double> dctcp;
    std::vector<double> rai;
    for (int n : {50, 100, 200}) {
        dctcp.push_back(static_cast<double>(by_name(rs, fmt::format("queue-cdf-dctcp-n{}", n)).max_queue));
        rai.push_back(static_cast<double>(by_name(rs, fmt::format("queue-cdf-dctcp_rai-n{}", n)).max_queue));
    }
    for (const MetricsReport& r : rs)
        info(fmt::format("{} max={} p99={} mean={} util={}", r.name, r.max_queue, fixed(r.p99_queue, 0),
                         fixed(r.mean_queue, 1), fixed(r.utilization, 4)));
    const double s = slope(ns, dctcp);
    const auto [lo, hi] = std::minmax_element(rai.begin(), rai.end());
    const double change = (*hi - *lo) / *lo;
    const bool pass = s >= 0.8 && s <= 1.2 && change < 0.10;
    return {pass, fmt::format("dctcp max-queue slope {} pkts/flow (want 0.8-1.2); dctcp+rai max-queue change {}% "
                              "(want <10%)",
                              fixed(s, 3), fixed(100.0 * change, 1))};
}

Verdict reduced_k()
{
    const ExperimentConfig base = scenario("reduced-k").runs.front();
    auto with_k = [&](double k, transport::Algorithm algo) {
        ExperimentConfig c = base;
        c.transport.algorithm = algo;
        c.marking.k_packets = k;
        c.name = fmt::format("{}-k{}", transport::to_string(algo), k);
        return c;
    };
    // Smallest k on the grid at which plain DCTCP keeps the link busy
    // (idle under 0.1% of the measured span).
    const std::vector<double> grid = {76, 90, 110, 130, 150, 175, 200, 230, 260, 300};
    std::vector<ExperimentConfig> sweep;
    for (double k : grid)
        sweep.push_back(with_k(k, transport::Algorithm::dctcp));
    const auto rs = run_sweep(sweep);
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        info(fmt::format("dctcp k={} util={} min-depth-share={}", grid[i], fixed(rs[i].utilization, 4),
                         rs[i].queue_cdf.empty() || rs[i].queue_cdf.front().first != 0
                             ? fixed(0.0, 4)
                             : fixed(rs[i].queue_cdf.front().second, 4)));
        if (!found && rs[i].utilization >= 0.999)
            found = i;
    }
    if (!found)
        return {false, "no k on the grid keeps plain DCTCP underflow-free"};
    const double k = grid[*found];
    const MetricsReport half = run_experiment(with_k(k / 2.0, transport::Algorithm::dctcp_rai));
    const double ratio = half.utilization / rs[*found].utilization;
    for (const MetricsReport& r : run_sweep(scenario("reduced-k").runs))
        info(fmt::format("{} util={} mean={}", r.name, fixed(r.utilization, 4), fixed(r.mean_queue, 1)));
    return {ratio >= 0.99, fmt::format("dctcp underflow-free k={} util={}; dctcp+rai k={} util={} ({}% of dctcp, "
                                       "want >=99%)",
                                       k, fixed(rs[*found].utilization, 4), k / 2.0, fixed(half.utilization, 4),
                                       fixed(100.0 * ratio, 2))};
}

Verdict rtt_fairness()
{
    const auto rs = run_sweep(scenario("rtt-fairness").runs);
    for (const MetricsReport& r : rs) {
        std::string shares;
        for (const FlowMetrics& f : r.flows)
            shares += fmt::format(" {}us:{}G", f.rtt.us(), fixed(f.throughput_bps / 1e9, 2));
        info(fmt::format("{} jain={} util={}{}", r.name, fixed(r.jain, 3), fixed(r.utilization, 4), shares));
    }
    const double d = by_name(rs, "rtt-fairness-dctcp").jain;
    const double mn = by_name(rs, "rtt-fairness-tbtcp-minrtt").jain;
    const double av = by_name(rs, "rtt-fairness-tbtcp-avgrtt").jain;
    const double mx = by_name(rs, "rtt-fairness-tbtcp-maxrtt").jain;
    const double best = std::max({mn, av, mx});
    const bool pass = mn >= 0.90 && av >= 0.80 && d <= best - 0.2;
    return {pass, fmt::format("jain tbtcp min-rtt {} (want >=0.90), avg-rtt {} (want >=0.80); dctcp {} vs best "
                              "tbtcp {} (want at least 0.2 lower)",
                              fixed(mn, 3), fixed(av, 3), fixed(d, 3), fixed(best, 3))};
}

Verdict formulas()
{
    int failed = 0;
    int total = 0;
    auto check = [&](bool ok, const std::string& what) {
        ++total;
        if (!ok) {
            ++failed;
            info("mismatch: " + what);
        }
    };
    // Ideal reduction anchors, 2*T_p*C in packets.
    for (double two_tpc : {140.0, 533.0, 1000.0 / 3.0}) {
        const double w_max = 2.0 * two_tpc;
        check(exact(transport::ideal_window_reduction(two_tpc, w_max, two_tpc), w_max / 2.0), "delta(2TpC)");
        check(exact(transport::ideal_window_reduction(two_tpc / 7.0, w_max, two_tpc), w_max / 8.0), "delta(2TpC/7)");
    }
    // Marking curve: 0.5 at Q = BDP, capped at 0.5/r beyond BDP + l.
    for (double bdp : {120.0, 533.0}) {
        check(exact(net::corrected_curve(bdp, bdp, 0.0, 1), 0.5), "p(BDP)");
        check(exact(net::corrected_curve(3.0 * bdp, bdp, 0.0, 1), 0.5), "cap");
        check(exact(net::corrected_curve(3.0 * bdp, bdp, 10.0, 4), 0.125), "cap/r");
        check(exact(net::mark_probability(net::make_ideal(bdp), bdp), 0.5), "policy p(BDP)");
        check(exact(curvefit::corrected_p({bdp, 0.0, 0.0, 4.0 * bdp, 1}, 2.0 * bdp), 0.5), "fitter cap");
    }
    // Step table: interval i marks with (i + 0.5) * 12.5% of P_max.
    const double t_min = 138.0;
    const double t_max = 550.0;
    const double s = (t_max - t_min) / 8.0;
    for (double p_max : {1.0, 0.7, 0.2}) {
        for (int i = 0; i < 8; ++i) {
            const double want = p_max * (i + 0.5) * 0.125;
            check(exact(net::step_red_curve(t_min + (i + 0.5) * s, t_min, t_max, p_max), want), "step midpoint");
            check(exact(net::step_red_curve(t_min + (i + 1) * s, t_min, t_max, p_max), want), "step right edge");
        }
        check(net::step_red_curve(t_min, t_min, t_max, p_max) == 0.0, "below t_min");
        check(net::step_red_curve(t_max + 1.0, t_min, t_max, p_max) == 1.0, "above t_max");
    }
    // Single EWMA step.
    check(exact(transport::dctcp_alpha_update(1.0, 1.0 / 16.0, 0.0), 15.0 / 16.0), "alpha 1 -> 15/16");
    check(exact(transport::dctcp_alpha_update(0.0, 1.0 / 16.0, 1.0), 1.0 / 16.0), "alpha 0 -> 1/16");
    check(exact(transport::dctcp_alpha_update(0.5, 0.25, 0.5), 0.5), "fixed point");
    check(exact(transport::dctcp_alpha_update(0.2, 0.5, 0.6), 0.4), "alpha 0.2, F 0.6");
    // QCD: max(cwnd - r, cwnd / 2), never when cwnd <= 2.
    check(exact(transport::qcd_window(10.0, 1), 9.0), "qcd 10 r1");
    check(exact(transport::qcd_window(10.0, 4), 6.0), "qcd 10 r4");
    check(exact(transport::qcd_window(6.0, 4), 3.0), "qcd 6 r4 -> half");
    check(exact(transport::qcd_window(8.0, 4), 4.0), "qcd 8 r4 tie");
    check(exact(transport::qcd_window(3.0, 1), 2.0), "qcd 3 r1");
    check(exact(transport::qcd_window(2.0, 1), 2.0), "qcd floor");
    check(exact(transport::qcd_window(1.5, 4), 1.5), "qcd below floor");
    return {failed == 0, fmt::format("{} of {} exact identities hold", total - failed, total)};
}

Verdict fct_ordering()
{
    const auto rs = run_sweep(scenario("fct").runs);
    const auto t = fct_buckets(by_name(rs, "fct-tbtcp").fct);
    const auto d = fct_buckets(by_name(rs, "fct-dctcp").fct);
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const bool ok = t[i].count > 0 && d[i].count > 0 && t[i].mean_fct_us <= d[i].mean_fct_us;
        pass = pass && ok;
        detail += fmt::format("{}{}: tbtcp {}us vs dctcp {}us (n={})", i ? "; " : "", t[i].label,
                              fixed(t[i].mean_fct_us, 0), fixed(d[i].mean_fct_us, 0), t[i].count);
    }
    for (const MetricsReport& r : rs)
        info(fmt::format("{} flows={} mean_q={} p99_q={} max_q={}", r.name, r.fct.size(), fixed(r.mean_queue, 2),
                         fixed(r.p99_queue, 0), r.max_queue));
    return {pass, detail};
}

Verdict convergence()
{
    const auto rs = run_sweep(scenario("convergence").runs);
    for (const MetricsReport& r : rs) {
        std::string times;
        for (SimTime t : r.convergence_times)
            times += " " + ms(t);
        info(r.name + " join/leave:" + times);
    }
    const auto betas = run_sweep(scenario("beta-convergence").runs);
    for (const MetricsReport& r : betas)
        info(r.name + " join: " + ms(r.convergence_times.front()));
    const SimTime t = by_name(rs, "convergence-tbtcp").convergence_times.front();
    const SimTime d = by_name(rs, "convergence-dctcp").convergence_times.front();
    const SimTime b5 = by_name(betas, "beta-convergence-b0.5").convergence_times.front();
    const bool ratio_ok = converged(t) && converged(d) && t.ns() <= 3 * std::max<std::int64_t>(d.ns(), 0);
    const bool pathology = !converged(b5);
    return {ratio_ok && pathology, fmt::format("join: tbtcp {} vs dctcp {} (want within 3x); beta=0.5 join {} "
                                               "(want not-converged)",
                                               ms(t), ms(d), ms(b5))};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict determinism_and_conservation()
{
    namespace fs = std::filesystem;
    // Byte-identical reports for identical seeds.
    const fs::path dir = fs::temp_directory_path() / "tbtcp_acceptance";
    fs::remove_all(dir);
    bool identical = true;
    std::size_t compared = 0;
    for (const char* name : {"convergence", "beta-sweep", "rtt-fairness"}) {
        const auto runs = scenario(name).runs;
        const auto a = write_reports((dir / name / "a").string(), run_sweep(runs));
        const auto b = write_reports((dir / name / "b").string(), run_sweep(runs));
        identical = identical && a.size() == b.size();
        for (std::size_t i = 0; i < a.size() && i < b.size(); ++i, ++compared)
            identical = identical && slurp(a[i]) == slurp(b[i]);
    }
    fs::remove_all(dir);

    // Conservation over the whole fast catalog.
    std::size_t runs = 0;
    std::size_t conserved = 0;
    for (const Scenario& sc : named_scenarios(Scale::fast))
        for (const MetricsReport& r : run_sweep(sc.runs)) {
            ++runs;
            if (r.queue.conserved())
                ++conserved;
            else
                info(fmt::format("{} not conserved: enq={} deq={} drop={} residing={}", r.name, r.queue.enqueued,
                                 r.queue.dequeued, r.queue.dropped, r.queue.residing));
        }

    // Marking frequency at a pinned depth against the policy's probability.
    struct Case {
        net::MarkingPolicy policy;
        int q;
    };
    const std::vector<Case> cases = {
        {net::make_ideal(533.3), 10},        {net::make_ideal(133.3), 25},
        {net::make_ideal(180.0, 92.0, 4), 150}, {net::make_step_red(92.0, 366.7, 0.2), 200},
        {net::make_threshold(76), 80},       {net::make_threshold(76), 70},
    };
    int unbiased = 0;
    std::uint64_t seed = 1000;
    for (const Case& c : cases) {
        net::BottleneckQueue q("pinned", 1000, c.policy, sim::RngStream(seed++, sim::streams::marking));
        net::Packet pkt;
        pkt.size = net::kMss;
        pkt.ect = true;
        while (q.depth() < c.q) {
            net::Packet fill = pkt;
            q.enqueue(fill, SimTime{});
        }
        constexpr int trials = 200'000;
        int marks = 0;
        for (int i = 0; i < trials; ++i) {
            net::Packet p = pkt;
            marks += q.enqueue(p, SimTime{}).marked ? 1 : 0;
            q.pop_front(SimTime{});
        }
        const double p = net::mark_probability(c.policy, c.q);
        const double se = std::sqrt(p * (1.0 - p) / trials);
        const double freq = static_cast<double>(marks) / trials;
        const bool ok = se > 0.0 ? std::abs(freq - p) <= 3.0 * se : freq == p;
        unbiased += ok ? 1 : 0;
        info(fmt::format("{} at depth {}: p={} observed={} ({})", net::describe(c.policy), c.q, fixed(p, 5),
                         fixed(freq, 5), ok ? "within 3 SE" : "biased"));
    }
    const bool pass = identical && conserved == runs && unbiased == static_cast<int>(cases.size());
    return {pass, fmt::format("{} report files identical across reruns: {}; conservation {}/{} runs; unbiased "
                              "marking {}/{} depths",
                              compared, identical ? "yes" : "no", conserved, runs, unbiased, cases.size())};
}

struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<Verdict()> run;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all = {
        {1, "table fit", 1, table_regression},
        {2, "steady queue near beta*n", 120, queue_law},
        {3, "buffer decoupling", 300, buffer_decoupling},
        {4, "reduced k", 120, reduced_k},
        {5, "rtt fairness", 180, rtt_fairness},
        {6, "formula identities", 1, formulas},
        {7, "fct ordering", 300, fct_ordering},
        {8, "convergence", 120, convergence},
        {9, "determinism and conservation", 60, determinism_and_conservation},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.insert(std::atoi(argv[i]));
    bool all_pass = true;
    for (const Criterion& c : all) {
        if (!selected.empty() && !selected.count(c.id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = v.pass && in_time;
        all_pass = all_pass && pass;
        std::printf("%s criterion %d (%s): %s [%.2fs of %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.title,
                    v.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
