#include "tbtcp/sim/rng.hpp"

#include <cmath>

namespace tbtcp::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint32_t stream_id)
    : seed_(seed), stream_id_(stream_id),
      engine_(splitmix64(splitmix64(seed) ^ (static_cast<std::uint64_t>(stream_id) * 0xD1B54A32D192ED03ULL)))
{
}

double RngStream::uniform01()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::below(std::uint64_t n)
{
    if (n <= 1)
        return 0;
    // Rejection sampling keeps the result exactly uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double RngStream::exponential(double mean)
{
    return -mean * std::log1p(-uniform01());
}

} // namespace tbtcp::sim
