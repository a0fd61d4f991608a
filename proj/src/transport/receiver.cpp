#include "tbtcp/transport/receiver.hpp"

namespace tbtcp::transport {

namespace {

net::Packet make_ack(ReceiverState& recv, const net::Packet& pkt, bool ece)
{
    net::Packet ack;
    ack.flow_id = recv.flow_id;
    ack.size = net::kAckSize;
    ack.is_ack = true;
    ack.ect = false;
    ack.ece = ece;
    ack.ack_no = recv.cumulative_ack;
    ack.sent_at = pkt.sent_at;
    recv.pending_unacked = 0;
    return ack;
}

} // namespace

std::optional<net::Packet> on_data_packet(ReceiverState& recv, const net::Packet& pkt)
{
    if (pkt.seq_no > recv.cumulative_ack) {
        recv.out_of_order.emplace(pkt.seq_no, pkt.end_seq());
        return make_ack(recv, pkt, pkt.ce_marked);
    }
    if (pkt.end_seq() <= recv.cumulative_ack)
        return make_ack(recv, pkt, pkt.ce_marked);

    recv.cumulative_ack = pkt.end_seq();
    const bool had_hole = !recv.out_of_order.empty();
    while (!recv.out_of_order.empty() && recv.out_of_order.begin()->first <= recv.cumulative_ack) {
        recv.cumulative_ack = std::max(recv.cumulative_ack, recv.out_of_order.begin()->second);
        recv.out_of_order.erase(recv.out_of_order.begin());
    }
    if (had_hole || pkt.ce_marked || pkt.last)
        return make_ack(recv, pkt, pkt.ce_marked);
    if (++recv.pending_unacked >= recv.delayed_ack_threshold)
        return make_ack(recv, pkt, false);
    return std::nullopt;
}

} // namespace tbtcp::transport
