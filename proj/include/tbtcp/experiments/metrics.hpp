#pragma once

#include "tbtcp/sim/engine.hpp"
#include "tbtcp/sim/time.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tbtcp::experiments {

/// Returned by convergence_time() when the band is never held.
inline constexpr sim::SimTime kNotConverged = sim::SimTime::infinity();

inline bool converged(sim::SimTime t)
{
    return t != kNotConverged;
}

struct FctRecord {
    std::uint32_t flow_id = 0;
    std::int64_t size_bytes = 0;
    sim::SimTime start;
    sim::SimTime fct;
};

struct FlowMetrics {
    std::uint32_t flow_id = 0;
    sim::SimTime rtt;
    double throughput_bps = 0.0;       // over the measurement window
    std::int64_t bytes_delivered = 0;  // whole run
    std::uint64_t retransmits = 0;
    bool measured = false;             // active over the whole measurement window
};

/// Per-flow delivered rate in fixed windows, plus each flow's active span.
struct ThroughputTrace {
    sim::SimTime window = sim::SimTime::from_ms(10);
    double capacity_bps = 0.0;
    std::vector<std::vector<double>> rates_bps;               // [flow][window]
    std::vector<std::pair<sim::SimTime, sim::SimTime>> active; // [flow] start, stop
};

struct QueueSample {
    sim::SimTime at;
    std::int64_t depth = 0;
    std::string_view event = "sample";   // or enq, deq, drop, mark
};

struct MetricsReport {
    std::string name;
    std::string algorithm;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;

    // Time-weighted over [warmup, duration].
    double mean_queue = 0.0;
    double median_queue = 0.0;
    double p99_queue = 0.0;
    std::int64_t max_queue = 0;
    std::vector<std::pair<std::int64_t, double>> queue_cdf;   // depth, P(depth <= d)

    double utilization = 0.0;
    double jain = 0.0;
    std::vector<FlowMetrics> flows;
    std::vector<FctRecord> fct;
    std::vector<sim::SimTime> convergence_times;

    sim::QueueCounters queue;
    std::uint64_t events = 0;
    sim::SimTime measure_from;
    sim::SimTime measure_until;
    sim::SimTime end;

    ThroughputTrace throughput;        // empty when flows exceed the trace limit
    std::vector<QueueSample> queue_trace;
};

/// (Σx)²/(n·Σx²). Throws std::invalid_argument on empty, negative or
/// all-zero input.
double jain_index(const std::vector<double>& throughputs);

/// Delay after `event_time` until every active flow holds within ±25% of
/// C/n_active for five consecutive windows; kNotConverged otherwise.
sim::SimTime convergence_time(const ThroughputTrace& trace, sim::SimTime event_time, double band = 0.25,
                              int hold_windows = 5);

struct FctBucket {
    std::string label;
    std::int64_t min_bytes = 0;   // inclusive
    std::int64_t max_bytes = 0;   // inclusive
    std::size_t count = 0;
    double mean_fct_us = 0.0;
};

/// Mean FCT in the short (<100KB), medium (100KB-1MB) and long (>1MB)
/// size classes. Empty classes have count 0.
std::vector<FctBucket> fct_buckets(const std::vector<FctRecord>& records);

/// Time-weighted depth histogram; depth d held for `weight` ns.
class QueueHistogram {
public:
    void add(std::int64_t depth, std::int64_t weight_ns);
    double total() const { return total_; }
    double mean() const;
    double quantile(double q) const;
    std::int64_t max() const { return max_; }
    std::vector<std::pair<std::int64_t, double>> cdf() const;

private:
    std::vector<double> weight_;
    double total_ = 0.0;
    std::int64_t max_ = 0;
};

} // namespace tbtcp::experiments
