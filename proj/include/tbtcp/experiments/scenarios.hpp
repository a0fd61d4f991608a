#pragma once

#include "tbtcp/experiments/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tbtcp::experiments {

/// fast: shortened runs at the original link speeds; paper: full durations.
enum class Scale : std::uint8_t { fast, paper };

struct Scenario {
    std::string name;
    std::string description;
    std::vector<ExperimentConfig> runs;
};

std::vector<std::string> scenario_names();

/// The whole catalog at one scale, in scenario_names() order.
std::vector<Scenario> named_scenarios(Scale scale);

std::optional<Scenario> find_scenario(const std::string& name, Scale scale);

/// k = BDP/7 in packets, the usual DCTCP threshold.
double dctcp_threshold(double bandwidth_bps, sim::SimTime rtt);

} // namespace tbtcp::experiments
