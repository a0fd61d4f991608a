#include "tbtcp/net/link.hpp"

#include "tbtcp/net/packet.hpp"

#include <cmath>

namespace tbtcp::net {

sim::SimTime Link::serialization(std::int64_t bytes) const
{
    const double ns = static_cast<double>(bytes) * 8.0 * 1e9 / bandwidth_bps;
    return sim::SimTime::from_ns(static_cast<std::int64_t>(std::ceil(ns - 1e-9)));
}

double bdp_packets(double bandwidth_bps, sim::SimTime rtt)
{
    return bandwidth_bps * rtt.seconds() / 8.0 / static_cast<double>(kMss);
}

} // namespace tbtcp::net
