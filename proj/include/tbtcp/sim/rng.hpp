#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace tbtcp::sim {

/// Deterministic random stream keyed by (seed, stream_id).
///
/// Each randomized component owns its own stream so that adding a component
/// never perturbs another component's sequence. The engine is std::mt19937_64,
/// whose output is fully specified by the standard; the conversion to [0,1)
/// is done here rather than by std::uniform_real_distribution, whose algorithm
/// is implementation-defined.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint32_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint32_t stream_id() const { return stream_id_; }

    /// Next value in [0, 1) with 53 bits of precision.
    double uniform01();

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    /// Exponential variate with the given mean.
    double exponential(double mean);

private:
    std::uint64_t seed_;
    std::uint32_t stream_id_;
    std::mt19937_64 engine_;
};

/// Well-known stream ids. Keep these stable: changing one changes every trace.
namespace streams {
inline constexpr std::uint32_t marking = 1;
inline constexpr std::uint32_t workload = 2;
inline constexpr std::uint32_t start_jitter = 3;
} // namespace streams

} // namespace tbtcp::sim
