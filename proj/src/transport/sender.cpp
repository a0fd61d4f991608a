#include "tbtcp/transport/sender.hpp"

#include <algorithm>
#include <cmath>

namespace tbtcp::transport {

const char* to_string(FlowEvent ev)
{
    switch (ev) {
    case FlowEvent::ece: return "ece";
    case FlowEvent::loss: return "loss";
    case FlowEvent::rto: return "rto";
    case FlowEvent::start: return "start";
    case FlowEvent::finish: return "finish";
    }
    return "?";
}

Sender::Sender(std::uint32_t flow_id, const CongestionParams& params, std::int64_t bytes_to_send)
    : flow_(make_flow_state(flow_id, params, bytes_to_send))
{
}

net::Packet Sender::make_segment(std::int64_t seq, sim::SimTime now) const
{
    net::Packet pkt;
    pkt.flow_id = flow_.flow_id;
    pkt.seq_no = seq;
    const std::int64_t remaining = flow_.bytes_to_send - seq;
    pkt.size = std::min(net::kMss, remaining);
    pkt.sent_at = now;
    pkt.ect = true;
    pkt.last = flow_.bytes_to_send != kUnbounded && seq + pkt.size >= flow_.bytes_to_send;
    pkt.retransmit = seq < flow_.high_water;
    return pkt;
}

void Sender::sample_rtt(sim::SimTime sample)
{
    if (sample.ns() <= 0)
        return;
    if (flow_.rtt_estimate.ns() == 0)
        flow_.rtt_estimate = sample;
    else
        flow_.rtt_estimate = sim::SimTime::from_ns((flow_.rtt_estimate.ns() * 7 + sample.ns()) / 8);
}

AckResult Sender::on_ack(const net::Packet& ack, sim::SimTime now)
{
    AckResult result;
    FlowState& f = flow_;

    if (ack.ack_no > f.highest_acked) {
        AckSample sample;
        sample.newly_acked = ack.ack_no - f.highest_acked;
        sample.ece = ack.ece;
        sample.cwnd_limited = cwnd_limited_;
        f.highest_acked = ack.ack_no;
        f.next_seq = std::max(f.next_seq, f.highest_acked);
        f.dup_acks = 0;
        sample_rtt(now - ack.sent_at);

        if (f.highest_acked > f.round_end) {
            sample.round_end = true;
            f.round_end = f.next_seq;
        }
        if (f.in_recovery) {
            if (f.highest_acked >= f.recover) {
                f.in_recovery = false;
            } else if (f.highest_acked < f.next_seq) {
                // Partial ACK: the next hole is lost too.
                result.retransmits.push_back(make_segment(f.highest_acked, now));
                ++retransmits_;
                bytes_sent_ += static_cast<std::uint64_t>(result.retransmits.back().size);
            }
        }
        transport::on_ack(f, sample);
        result.ece = ack.ece;
        result.newly_acked = sample.newly_acked;
        result.finished = f.finished();
        return result;
    }

    if (ack.ack_no == f.highest_acked && f.in_flight() > 0) {
        if (++f.dup_acks == 3 && !f.in_recovery) {
            const LossResponse r = on_loss(f, LossKind::triple_dup_ack);
            result.loss = true;
            result.retransmits.push_back(make_segment(r.retransmit_seq, now));
            ++retransmits_;
            bytes_sent_ += static_cast<std::uint64_t>(result.retransmits.back().size);
        }
    }
    return result;
}

bool Sender::has_window_room() const
{
    const std::int64_t window = static_cast<std::int64_t>(std::floor(flow_.cwnd)) * net::kMss;
    return flow_.next_seq < flow_.bytes_to_send && flow_.in_flight() < window;
}

void Sender::pace_window(sim::SimTime now, std::vector<net::Packet>& out, std::size_t budget)
{
    FlowState& f = flow_;
    const std::int64_t window = static_cast<std::int64_t>(std::floor(f.cwnd)) * net::kMss;
    std::size_t sent = 0;
    while (f.next_seq < f.bytes_to_send && f.in_flight() < window && sent < budget) {
        ++sent;
        net::Packet pkt = make_segment(f.next_seq, now);
        if (pkt.retransmit)
            ++retransmits_;
        f.next_seq += pkt.size;
        f.high_water = std::max(f.high_water, f.next_seq);
        bytes_sent_ += static_cast<std::uint64_t>(pkt.size);
        out.push_back(pkt);
    }
    cwnd_limited_ = f.in_flight() >= window;
}

void Sender::on_rto(sim::SimTime now, std::vector<net::Packet>& out, std::size_t budget)
{
    on_loss(flow_, LossKind::rto);
    pace_window(now, out, budget);
}

void Sender::stop()
{
    stopped_ = true;
    flow_.bytes_to_send = flow_.high_water;
}

} // namespace tbtcp::transport
