#pragma once

#include "tbtcp/net/packet.hpp"
#include "tbtcp/sim/time.hpp"
#include "tbtcp/transport/flow_state.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tbtcp::experiments {

/// Parse or validation failure. `line` is 0 when the problem is not tied to
/// a line of config text.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& msg, int line = 0, std::string field = {})
        : std::invalid_argument(msg), line_(line), field_(std::move(field))
    {
    }
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

enum class MarkingKind : std::uint8_t { none, threshold, ideal, step_red };

/// Which RTT sets the BDP used by the ideal curve.
enum class BdpBasis : std::uint8_t { min_rtt, avg_rtt, max_rtt, explicit_rtt };

struct MarkingConfig {
    MarkingKind kind = MarkingKind::ideal;
    double k_packets = 0.0;
    BdpBasis bdp_basis = BdpBasis::min_rtt;
    sim::SimTime bdp_rtt;          // explicit_rtt only
    double l_packets = 0.0;
    int scale_r = 1;
    double t_min = 0.0;            // step_red thresholds, packets
    double t_max = 0.0;
    double p_max = 1.0;
};

struct FlowSpec {
    sim::SimTime start;
    sim::SimTime stop = sim::SimTime::infinity();
    std::int64_t size_bytes = transport::kUnbounded;
    sim::SimTime rtt = sim::SimTime::from_us(160);
};

/// Mixed short/long workload: sizes log-uniform on two segments, Poisson
/// arrivals offering `load` of the bottleneck.
struct WorkloadSpec {
    std::int64_t min_size = 4'000;
    std::int64_t split_size = 100'000;
    std::int64_t max_size = 5'000'000;
    double short_fraction = 0.8;
    double load = 0.5;
    int flow_count = 1000;
    sim::SimTime rtt = sim::SimTime::from_us(160);

    double mean_size() const;
};

struct ExperimentConfig {
    std::string name = "experiment";

    double bottleneck_bps = 40e9;
    double access_bps = 0.0;                 // 0: same as the bottleneck
    std::int64_t buffer_packets = 680;

    transport::CongestionParams transport;
    int delayed_ack = 2;
    MarkingConfig marking;

    std::vector<FlowSpec> flows;
    std::optional<WorkloadSpec> workload;

    sim::SimTime duration = sim::SimTime::from_ms(200);
    sim::SimTime warmup;                     // 0: first 10% of duration
    sim::SimTime measure_from;               // throughput/fairness window start; 0: warmup
    sim::SimTime measure_until;              // window end; 0: duration
    std::uint64_t seed = 1;
    sim::SimTime start_jitter;
    sim::SimTime throughput_window = sim::SimTime::from_ms(10);
    std::vector<sim::SimTime> convergence_events;

    bool trace_queue = false;                // depth every 100us
    bool trace_queue_events = false;         // plus every enq/deq/drop/mark
    bool trace_flows = false;

    double access_rate() const { return access_bps > 0.0 ? access_bps : bottleneck_bps; }
    sim::SimTime effective_warmup() const;
    sim::SimTime effective_measure_from() const;
    sim::SimTime effective_measure_until() const;
    sim::SimTime max_rtt() const;
};

/// Marking BDP in packets for the configured basis over the flows' RTTs.
double marking_bdp_packets(const ExperimentConfig& cfg);

/// Throws ConfigError on an inconsistent config.
void validate(const ExperimentConfig& cfg);

/// Plain-text `[section]` / `key = value` format with `#` comments.
ExperimentConfig parse_config_text(const std::string& text);
std::string to_config_text(const ExperimentConfig& cfg);

/// FNV-1a over the canonical text form.
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::uint64_t fnv1a(std::string_view bytes);

/// n identical long-lived flows.
std::vector<FlowSpec> long_lived(int n, sim::SimTime rtt);

} // namespace tbtcp::experiments
