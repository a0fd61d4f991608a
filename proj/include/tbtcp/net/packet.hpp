#pragma once

#include "tbtcp/sim/time.hpp"

#include <cstdint>

namespace tbtcp::net {

inline constexpr std::int64_t kMss = 1500;     // bytes per data packet (one queue unit)
inline constexpr std::int64_t kAckSize = 64;   // bytes

struct Packet {
    std::uint32_t flow_id = 0;
    std::int64_t seq_no = 0;   // first byte carried
    std::int64_t size = 0;     // bytes on the wire
    std::int64_t ack_no = 0;   // cumulative: next byte expected
    sim::SimTime sent_at;      // data: transmit time; ACK: echoed from the data packet
    bool ect = true;
    bool ce_marked = false;
    bool is_ack = false;
    bool ece = false;
    bool last = false;         // final segment of a finite flow
    bool retransmit = false;

    std::int64_t end_seq() const { return seq_no + size; }
};

} // namespace tbtcp::net
