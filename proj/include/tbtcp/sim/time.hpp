#pragma once

#include <compare>
#include <cstdint>
#include <limits>

namespace tbtcp::sim {

// Simulated time. Stored in integer nanoseconds; reported in microseconds.
// A 1500B frame at 40Gbps serializes in 300ns, so microsecond ticks would alias.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_ns(std::int64_t ns) { return SimTime{ns}; }
    static constexpr SimTime from_us(double us) { return SimTime{static_cast<std::int64_t>(us * 1e3 + (us >= 0 ? 0.5 : -0.5))}; }
    static constexpr SimTime from_ms(double ms) { return from_us(ms * 1e3); }
    static constexpr SimTime from_s(double s) { return from_us(s * 1e6); }
    static constexpr SimTime infinity() { return SimTime{std::numeric_limits<std::int64_t>::max()}; }

    constexpr std::int64_t ns() const { return ns_; }
    constexpr double us() const { return static_cast<double>(ns_) * 1e-3; }
    constexpr double seconds() const { return static_cast<double>(ns_) * 1e-9; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime o) const { return SimTime{ns_ + o.ns_}; }
    constexpr SimTime operator-(SimTime o) const { return SimTime{ns_ - o.ns_}; }
    constexpr SimTime& operator+=(SimTime o) { ns_ += o.ns_; return *this; }
    constexpr SimTime operator*(std::int64_t k) const { return SimTime{ns_ * k}; }

private:
    constexpr explicit SimTime(std::int64_t ns) : ns_(ns) {}
    std::int64_t ns_ = 0;
};

} // namespace tbtcp::sim
