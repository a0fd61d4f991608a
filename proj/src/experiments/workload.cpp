#include "tbtcp/experiments/workload.hpp"

#include <algorithm>
#include <cmath>

namespace tbtcp::experiments {

std::int64_t sample_flow_size(const WorkloadSpec& spec, sim::RngStream& rng)
{
    const bool is_short = rng.uniform01() < spec.short_fraction;
    const double lo = static_cast<double>(is_short ? spec.min_size : spec.split_size);
    const double hi = static_cast<double>(is_short ? spec.split_size : spec.max_size);
    const double size = lo * std::exp(rng.uniform01() * std::log(hi / lo));
    // Keep the segment boundary on the short side so the split stays exact.
    const auto s = static_cast<std::int64_t>(std::llround(size));
    return is_short ? std::clamp(s, spec.min_size, spec.split_size - 1) : std::clamp(s, spec.split_size, spec.max_size);
}

std::vector<FlowSpec> generate_workload(const WorkloadSpec& spec, double bottleneck_bps, sim::RngStream& rng)
{
    std::vector<FlowSpec> out;
    out.reserve(static_cast<std::size_t>(spec.flow_count));
    const double rate = spec.load * bottleneck_bps / 8.0 / spec.mean_size();   // flows per second
    double t = 0.0;
    for (int i = 0; i < spec.flow_count; ++i) {
        FlowSpec f;
        f.start = sim::SimTime::from_s(t);
        f.size_bytes = sample_flow_size(spec, rng);
        f.rtt = spec.rtt;
        out.push_back(f);
        t += rng.exponential(1.0 / rate);
    }
    return out;
}

} // namespace tbtcp::experiments
