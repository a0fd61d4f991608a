#pragma once

#include "tbtcp/net/packet.hpp"

#include <cstdint>
#include <optional>
#include <map>

namespace tbtcp::transport {

/// Cumulative-ACK receiver with the ECN-aware delayed ACK: a CE-marked
/// arrival is acknowledged immediately with ECE set (covering everything
/// accumulated so far); otherwise one ACK per `delayed_ack_threshold` packets.
/// Out-of-order and duplicate arrivals are acknowledged immediately.
struct ReceiverState {
    std::uint32_t flow_id = 0;
    int delayed_ack_threshold = 2;
    int pending_unacked = 0;
    std::int64_t cumulative_ack = 0;
    std::map<std::int64_t, std::int64_t> out_of_order;   // buffered segments: seq_no -> end
};

std::optional<net::Packet> on_data_packet(ReceiverState& recv, const net::Packet& pkt);

} // namespace tbtcp::transport
