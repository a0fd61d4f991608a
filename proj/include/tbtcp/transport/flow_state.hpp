#pragma once

#include "tbtcp/sim/time.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

namespace tbtcp::transport {

enum class Algorithm : std::uint8_t { reno, dctcp, tbtcp, dctcp_rai };

std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

inline constexpr double kMinCwnd = 2.0;
inline constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();

struct CongestionParams {
    Algorithm algorithm = Algorithm::tbtcp;
    double beta = 0.1;          // RAI: per-RTT increment, m = round(1/beta) RTTs per MSS
    int scale_r = 1;            // QCD: MSS removed per ECE
    double g = 1.0 / 16.0;      // DCTCP EWMA gain
    double initial_alpha = 1.0;
    double initial_cwnd = 2.0;
    sim::SimTime min_rto = sim::SimTime::from_ms(10);

    /// Number of RTT rounds per +1 MSS under RAI.
    int rai_rounds() const;
};

/// Per-flow sender congestion state. Windows are in MSS units; sequence
/// numbers in bytes.
struct FlowState {
    std::uint32_t flow_id = 0;
    CongestionParams params;

    double cwnd = 2.0;
    double ssthresh = std::numeric_limits<double>::infinity();
    bool in_slow_start = true;

    int rai_rtt_counter = 0;
    std::int64_t rai_acked = 0;      // bytes toward the current RAI round

    double alpha = 1.0;
    std::int64_t marked_bytes = 0;   // DCTCP observation window
    std::int64_t acked_bytes = 0;
    std::int64_t cwr_until = 0;      // DCTCP: no further reduction until highest_acked passes this

    std::int64_t bytes_to_send = kUnbounded;
    std::int64_t next_seq = 0;
    std::int64_t highest_acked = 0;
    std::int64_t high_water = 0;     // largest next_seq ever reached
    std::int64_t round_end = 0;      // round closes when an ACK passes this
    int dup_acks = 0;
    bool in_recovery = false;
    std::int64_t recover = 0;

    sim::SimTime rtt_estimate;       // smoothed; zero until the first sample

    std::int64_t in_flight() const { return next_seq - highest_acked; }
    bool finished() const { return bytes_to_send != kUnbounded && highest_acked >= bytes_to_send; }
};

FlowState make_flow_state(std::uint32_t flow_id, const CongestionParams& params,
                          std::int64_t bytes_to_send = kUnbounded);

} // namespace tbtcp::transport
