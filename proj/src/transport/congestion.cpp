#include "tbtcp/transport/congestion.hpp"

#include "tbtcp/net/packet.hpp"

#include <algorithm>

namespace tbtcp::transport {

namespace {

double segments(std::int64_t bytes)
{
    return static_cast<double>(bytes) / static_cast<double>(net::kMss);
}

void slow_start(FlowState& f, const AckSample& a)
{
    if (a.cwnd_limited)
        f.cwnd += segments(a.newly_acked);
    if (f.cwnd >= f.ssthresh)
        f.in_slow_start = false;
}

// RAI: a round is one window of ACKed bytes, as in the kernel's
// tcp_cong_avoid_ai(); +1 MSS after m such rounds. Counting ACKed data
// rather than round boundaries keeps flows with equal RTTs from stepping
// in lockstep.
void reduced_increase(FlowState& f, const AckSample& a)
{
    if (!a.cwnd_limited)
        return;
    f.rai_acked += a.newly_acked;
    const std::int64_t window = std::max<std::int64_t>(1, static_cast<std::int64_t>(f.cwnd)) * net::kMss;
    while (f.rai_acked >= window) {
        f.rai_acked -= window;
        if (++f.rai_rtt_counter >= f.params.rai_rounds()) {
            f.cwnd += 1.0;
            f.rai_rtt_counter = 0;
            f.rai_acked = 0;
            return;
        }
    }
}

} // namespace

double qcd_window(double cwnd, int scale_r)
{
    if (cwnd <= kMinCwnd)
        return cwnd;
    return std::max({cwnd - static_cast<double>(scale_r), cwnd / 2.0, kMinCwnd});
}

double dctcp_alpha_update(double alpha, double g, double f)
{
    return std::clamp((1.0 - g) * alpha + g * f, 0.0, 1.0);
}

double ideal_window_reduction(double queue, double w_max, double bdp)
{
    return queue * w_max / (bdp + queue);
}

void on_ack_reno(FlowState& f, const AckSample& a)
{
    if (f.in_recovery)
        return;
    if (f.in_slow_start)
        slow_start(f, a);
    else if (a.round_end && a.cwnd_limited)
        f.cwnd += 1.0;
}

void on_ack_dctcp(FlowState& f, const AckSample& a)
{
    f.acked_bytes += a.newly_acked;
    if (a.ece)
        f.marked_bytes += a.newly_acked;
    if (a.round_end) {
        if (f.acked_bytes > 0)
            f.alpha = dctcp_alpha_update(f.alpha, f.params.g,
                                         static_cast<double>(f.marked_bytes) / static_cast<double>(f.acked_bytes));
        f.acked_bytes = 0;
        f.marked_bytes = 0;
    }

    if (a.ece) {
        f.in_slow_start = false;
        if (f.highest_acked >= f.cwr_until) {
            f.cwnd = std::max(kMinCwnd, f.cwnd * (1.0 - f.alpha / 2.0));
            f.ssthresh = f.cwnd;
            f.cwr_until = f.next_seq;
        }
        return;
    }
    if (f.in_recovery)
        return;
    if (f.in_slow_start) {
        slow_start(f, a);
        return;
    }
    if (f.highest_acked < f.cwr_until)
        return;
    if (f.params.algorithm == Algorithm::dctcp_rai)
        reduced_increase(f, a);
    else if (a.round_end && a.cwnd_limited)
        f.cwnd += 1.0;
}

void on_ack_tbtcp(FlowState& f, const AckSample& a)
{
    if (a.ece) {
        f.cwnd = qcd_window(f.cwnd, f.params.scale_r);
        if (f.in_slow_start) {
            f.in_slow_start = false;
            f.ssthresh = f.cwnd;
            f.rai_rtt_counter = 0;
            f.rai_acked = 0;
        }
    } else if (f.in_slow_start && !f.in_recovery) {
        slow_start(f, a);
        return;
    }
    if (!f.in_slow_start && !f.in_recovery)
        reduced_increase(f, a);
}

void on_ack(FlowState& flow, const AckSample& ack)
{
    switch (flow.params.algorithm) {
    case Algorithm::reno: on_ack_reno(flow, ack); break;
    case Algorithm::dctcp:
    case Algorithm::dctcp_rai: on_ack_dctcp(flow, ack); break;
    case Algorithm::tbtcp: on_ack_tbtcp(flow, ack); break;
    }
    flow.cwnd = std::max(flow.cwnd, kMinCwnd);
}

LossResponse on_loss(FlowState& f, LossKind kind)
{
    LossResponse r;
    r.retransmit_seq = f.highest_acked;
    if (kind == LossKind::triple_dup_ack) {
        f.cwnd = std::max(kMinCwnd, f.cwnd / 2.0);
        f.ssthresh = f.cwnd;
        f.in_slow_start = false;
        f.in_recovery = true;
        f.recover = f.next_seq;
        return r;
    }
    f.ssthresh = std::max(kMinCwnd, f.cwnd / 2.0);
    f.cwnd = kMinCwnd;
    f.in_slow_start = true;
    f.in_recovery = false;
    f.dup_acks = 0;
    f.rai_rtt_counter = 0;
    f.rai_acked = 0;
    f.next_seq = f.highest_acked;
    f.round_end = f.highest_acked;
    return r;
}

sim::SimTime rto_interval(const FlowState& f)
{
    if (f.rtt_estimate.ns() == 0)
        return f.params.min_rto;
    return std::max(f.rtt_estimate * 8, f.params.min_rto);
}

} // namespace tbtcp::transport
