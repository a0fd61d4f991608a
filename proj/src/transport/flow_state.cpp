#include "tbtcp/transport/flow_state.hpp"

#include <algorithm>
#include <cmath>

namespace tbtcp::transport {

std::string_view to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::reno: return "reno";
    case Algorithm::dctcp: return "dctcp";
    case Algorithm::tbtcp: return "tbtcp";
    case Algorithm::dctcp_rai: return "dctcp_rai";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name)
{
    for (Algorithm a : {Algorithm::reno, Algorithm::dctcp, Algorithm::tbtcp, Algorithm::dctcp_rai})
        if (to_string(a) == name)
            return a;
    return std::nullopt;
}

int CongestionParams::rai_rounds() const
{
    return std::max(1, static_cast<int>(std::lround(1.0 / beta)));
}

FlowState make_flow_state(std::uint32_t flow_id, const CongestionParams& params, std::int64_t bytes_to_send)
{
    FlowState f;
    f.flow_id = flow_id;
    f.params = params;
    f.cwnd = std::max(kMinCwnd, params.initial_cwnd);
    f.alpha = params.initial_alpha;
    f.bytes_to_send = bytes_to_send;
    return f;
}

} // namespace tbtcp::transport
