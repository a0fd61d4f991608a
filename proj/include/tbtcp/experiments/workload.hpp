#pragma once

#include "tbtcp/experiments/config.hpp"
#include "tbtcp/sim/rng.hpp"

#include <vector>

namespace tbtcp::experiments {

/// One size from the two-segment log-uniform distribution.
std::int64_t sample_flow_size(const WorkloadSpec& spec, sim::RngStream& rng);

/// Poisson arrivals offering spec.load of `bottleneck_bps`, starting at 0.
/// Deterministic for a given rng state.
std::vector<FlowSpec> generate_workload(const WorkloadSpec& spec, double bottleneck_bps, sim::RngStream& rng);

} // namespace tbtcp::experiments
