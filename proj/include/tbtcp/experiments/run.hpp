#pragma once

#include "tbtcp/experiments/config.hpp"
#include "tbtcp/experiments/metrics.hpp"
#include "tbtcp/net/marking.hpp"

#include <vector>

namespace tbtcp::experiments {

/// Per-flow throughput series are kept only up to this many flows, and only
/// when trace_flows is set or convergence events are requested.
inline constexpr std::size_t kMaxTracedFlows = 64;

/// The queue policy a config asks for, with the BDP resolved.
net::MarkingPolicy build_policy(const ExperimentConfig& cfg);

/// Builds the dumbbell, runs it to cfg.duration and extracts metrics.
/// Deterministic in (cfg, cfg.seed). Throws ConfigError or SimulationError.
MetricsReport run_experiment(const ExperimentConfig& cfg);

/// Runs entries concurrently, one engine each; reports come back in config
/// order and the first failing entry's exception is rethrown.
std::vector<MetricsReport> run_sweep(const std::vector<ExperimentConfig>& configs);

} // namespace tbtcp::experiments
