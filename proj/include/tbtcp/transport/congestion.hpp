#pragma once

#include "tbtcp/transport/flow_state.hpp"

#include <cstdint>
#include <optional>

namespace tbtcp::transport {

/// What a single new (non-duplicate) ACK means for the window.
struct AckSample {
    std::int64_t newly_acked = 0;   // bytes
    bool ece = false;
    bool round_end = false;         // this ACK closed an RTT round
    bool cwnd_limited = true;       // the window, not the host, limited sending
};

/// Reno: slow-start doubling, +1 MSS per round in congestion avoidance.
void on_ack_reno(FlowState& flow, const AckSample& ack);

/// DCTCP and the DCTCP+RAI hybrid. alpha <- (1-g)alpha + gF at each round
/// end; on ECE, cwnd <- cwnd(1 - alpha/2) at most once per window of data.
void on_ack_dctcp(FlowState& flow, const AckSample& ack);

/// TBTCP: queue-canceling decrease of r MSS per ECE (never below half the
/// window, never when cwnd <= 2) and reduced additive increase of one MSS
/// every m rounds once slow start has ended.
void on_ack_tbtcp(FlowState& flow, const AckSample& ack);

void on_ack(FlowState& flow, const AckSample& ack);

/// The QCD step in isolation: max(cwnd - r, cwnd/2), applied only when cwnd > 2.
double qcd_window(double cwnd, int scale_r);

/// alpha after one observation window with mark fraction f.
double dctcp_alpha_update(double alpha, double g, double f);

enum class LossKind : std::uint8_t { triple_dup_ack, rto };

struct LossResponse {
    std::int64_t retransmit_seq = 0;
};

/// triple-dup: halve (floor 2) and enter recovery; rto: cwnd 2 and slow start.
LossResponse on_loss(FlowState& flow, LossKind kind);

/// max(8 * srtt, min_rto), or min_rto before any RTT sample.
sim::SimTime rto_interval(const FlowState& flow);

/// Right-hand side of the ideal window adjustment:
/// delta = Q*W_max / (2*T_p*C + Q), all in consistent units.
double ideal_window_reduction(double queue, double w_max, double bdp);

} // namespace tbtcp::transport
