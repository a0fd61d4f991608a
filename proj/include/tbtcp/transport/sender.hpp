#pragma once

#include "tbtcp/net/packet.hpp"
#include "tbtcp/sim/time.hpp"
#include "tbtcp/transport/congestion.hpp"
#include "tbtcp/transport/flow_state.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace tbtcp::transport {

enum class FlowEvent : std::uint8_t { ece, loss, rto, start, finish };

const char* to_string(FlowEvent ev);

struct AckResult {
    bool ece = false;
    bool loss = false;          // fast retransmit triggered
    bool finished = false;      // last byte acknowledged by this ACK
    std::int64_t newly_acked = 0;
    std::vector<net::Packet> retransmits;
};

/// ACK-clocked sender. Owns sequence bookkeeping, duplicate-ACK loss
/// detection and recovery; window arithmetic is delegated to on_ack().
class Sender {
public:
    Sender() = default;
    Sender(std::uint32_t flow_id, const CongestionParams& params, std::int64_t bytes_to_send);

    FlowState& state() { return flow_; }
    const FlowState& state() const { return flow_; }

    AckResult on_ack(const net::Packet& ack, sim::SimTime now);

    /// Emits new segments while in_flight < floor(cwnd) * MSS, at most
    /// `budget` of them (the host's free NIC slots).
    void pace_window(sim::SimTime now, std::vector<net::Packet>& out,
                     std::size_t budget = std::numeric_limits<std::size_t>::max());

    /// True when the last pace_window() stopped on a full window. Window
    /// growth is withheld otherwise, as in kernel TCP.
    bool cwnd_limited() const { return cwnd_limited_; }
    bool has_window_room() const;

    /// Timer expiry: collapse the window and go back to the first unacked byte.
    void on_rto(sim::SimTime now, std::vector<net::Packet>& out,
                std::size_t budget = std::numeric_limits<std::size_t>::max());

    /// Stops offering new data (long-lived flow reached its stop time);
    /// bytes already sent are still recovered.
    void stop();
    bool stopped() const { return stopped_; }

    std::uint64_t bytes_sent() const { return bytes_sent_; }
    std::uint64_t retransmits() const { return retransmits_; }

private:
    net::Packet make_segment(std::int64_t seq, sim::SimTime now) const;
    void sample_rtt(sim::SimTime sample);

    FlowState flow_;
    bool stopped_ = false;
    bool cwnd_limited_ = true;
    std::uint64_t bytes_sent_ = 0;
    std::uint64_t retransmits_ = 0;
};

} // namespace tbtcp::transport
