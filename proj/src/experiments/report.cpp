#include "tbtcp/experiments/report.hpp"

#include "tbtcp/sim/trace.hpp"

#include <fmt/format.h>

#include <filesystem>

namespace tbtcp::experiments {

using sim::fixed;

namespace {

std::string ms(sim::SimTime t)
{
    return converged(t) ? fixed(static_cast<double>(t.ns()) / 1e6, 3) : "none";
}

std::string join_convergence(const std::vector<sim::SimTime>& times)
{
    std::string out;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0)
            out += ';';
        out += ms(times[i]);
    }
    return out;
}

} // namespace

std::string summary_header()
{
    return "name,algorithm,config_hash,seed,utilization,mean_queue,median_queue,p99_queue,max_queue,jain,"
           "enqueued,dropped,marked,events,convergence_ms";
}

std::string queue_trace_header() { return "name,time_us,queue_pkts,event"; }
std::string queue_cdf_header() { return "name,depth,cdf"; }
std::string flow_trace_header() { return "name,flow_id,window_start_ms,throughput_gbps"; }
std::string flows_header() { return "name,flow_id,rtt_us,throughput_gbps,bytes_delivered,retransmits,measured"; }
std::string fct_header() { return "size_bytes,fct_us,algorithm"; }

void write_summary_csv(const std::string& path, const std::vector<MetricsReport>& reports)
{
    sim::CsvSink out(path, {summary_header()});
    for (const MetricsReport& r : reports)
        out.row({r.name, r.algorithm, fmt::format("{:016x}", r.config_hash), std::to_string(r.seed),
                 fixed(r.utilization, 6), fixed(r.mean_queue, 3), fixed(r.median_queue, 3), fixed(r.p99_queue, 3),
                 std::to_string(r.max_queue), fixed(r.jain, 6), std::to_string(r.queue.enqueued),
                 std::to_string(r.queue.dropped), std::to_string(r.queue.marked), std::to_string(r.events),
                 join_convergence(r.convergence_times)});
}

void write_queue_trace_csv(const std::string& path, const std::vector<MetricsReport>& reports)
{
    sim::CsvSink out(path, {queue_trace_header()});
    for (const MetricsReport& r : reports)
        for (const QueueSample& s : r.queue_trace)
            out.row({r.name, fixed(static_cast<double>(s.at.ns()) / 1e3, 3), std::to_string(s.depth), s.event});
}

void write_queue_cdf_csv(const std::string& path, const std::vector<MetricsReport>& reports)
{
    sim::CsvSink out(path, {queue_cdf_header()});
    for (const MetricsReport& r : reports)
        for (const auto& [depth, p] : r.queue_cdf)
            out.row({r.name, std::to_string(depth), fixed(p, 6)});
}

void write_flow_trace_csv(const std::string& path, const std::vector<MetricsReport>& reports)
{
    sim::CsvSink out(path, {flow_trace_header()});
    for (const MetricsReport& r : reports) {
        const ThroughputTrace& t = r.throughput;
        for (std::size_t f = 0; f < t.rates_bps.size(); ++f)
            for (std::size_t k = 0; k < t.rates_bps[f].size(); ++k)
                out.row({r.name, std::to_string(f),
                         fixed(static_cast<double>(t.window.ns() * static_cast<std::int64_t>(k)) / 1e6, 3),
                         fixed(t.rates_bps[f][k] / 1e9, 6)});
    }
}

void write_flows_csv(const std::string& path, const std::vector<MetricsReport>& reports)
{
    sim::CsvSink out(path, {flows_header()});
    for (const MetricsReport& r : reports)
        for (const FlowMetrics& f : r.flows)
            out.row({r.name, std::to_string(f.flow_id), fixed(static_cast<double>(f.rtt.ns()) / 1e3, 3),
                     fixed(f.throughput_bps / 1e9, 6), std::to_string(f.bytes_delivered),
                     std::to_string(f.retransmits), f.measured ? "1" : "0"});
}

void write_fct_csv(const std::string& path, const std::vector<MetricsReport>& reports)
{
    sim::CsvSink out(path, {fct_header()});
    for (const MetricsReport& r : reports)
        for (const FctRecord& f : r.fct)
            out.row({std::to_string(f.size_bytes), fixed(static_cast<double>(f.fct.ns()) / 1e3, 3), r.algorithm});
}

std::vector<std::string> write_reports(const std::string& dir, const std::vector<MetricsReport>& reports)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto at = [&](const char* name) { return (fs::path(dir) / name).string(); };
    std::vector<std::string> paths;
    bool queue_trace = false;
    bool flow_trace = false;
    bool fct = false;
    for (const MetricsReport& r : reports) {
        queue_trace = queue_trace || !r.queue_trace.empty();
        flow_trace = flow_trace || !r.throughput.rates_bps.empty();
        fct = fct || !r.fct.empty();
    }
    write_summary_csv(at(kSummaryCsv), reports);
    paths.push_back(at(kSummaryCsv));
    write_queue_cdf_csv(at(kQueueCdfCsv), reports);
    paths.push_back(at(kQueueCdfCsv));
    write_flows_csv(at(kFlowsCsv), reports);
    paths.push_back(at(kFlowsCsv));
    if (queue_trace) {
        write_queue_trace_csv(at(kQueueTraceCsv), reports);
        paths.push_back(at(kQueueTraceCsv));
    }
    if (flow_trace) {
        write_flow_trace_csv(at(kFlowTraceCsv), reports);
        paths.push_back(at(kFlowTraceCsv));
    }
    if (fct) {
        write_fct_csv(at(kFctCsv), reports);
        paths.push_back(at(kFctCsv));
    }
    return paths;
}

} // namespace tbtcp::experiments
