#pragma once

#include "tbtcp/sim/time.hpp"

#include <cstdint>

namespace tbtcp::net {

struct Link {
    double bandwidth_bps = 0.0;
    sim::SimTime propagation_delay;

    /// size*8/bandwidth in integer nanoseconds, rounded up.
    sim::SimTime serialization(std::int64_t bytes) const;
};

/// Bandwidth-delay product in packets of kMss bytes.
double bdp_packets(double bandwidth_bps, sim::SimTime rtt);

} // namespace tbtcp::net
