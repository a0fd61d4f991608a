#include "tbtcp/net/marking.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace tbtcp::net {

double corrected_curve(double q, double bdp, double l, int scale_r)
{
    double p;
    if (q <= l)
        p = 0.0;
    else if (q <= bdp + l)
        p = (q - l) / (bdp - l + q);
    else
        p = 0.5;
    return p / static_cast<double>(scale_r);
}

int step_index(double q, double t_min, double t_max)
{
    const double s = (t_max - t_min) / 8.0;
    const int i = static_cast<int>(std::ceil((q - t_min) / s)) - 1;
    return std::clamp(i, 0, 7);
}

double step_red_curve(double q, double t_min, double t_max, double p_max)
{
    if (q <= t_min)
        return 0.0;
    if (q > t_max)
        return 1.0;
    return p_max * (step_index(q, t_min, t_max) + 0.5) * 0.125;
}

MarkingPolicy make_threshold(double k)
{
    if (k < 0.0)
        throw PolicyError(fmt::format("threshold k must be non-negative, got {}", k));
    return ThresholdMarking{k};
}

MarkingPolicy make_ideal(double bdp, double l, int scale_r)
{
    if (!(bdp > 0.0))
        throw PolicyError(fmt::format("marking bdp must be positive, got {}", bdp));
    if (l < 0.0)
        throw PolicyError(fmt::format("burst threshold l must be non-negative, got {}", l));
    if (scale_r < 1)
        throw PolicyError(fmt::format("scaling factor r must be >= 1, got {}", scale_r));
    return IdealCurveMarking{bdp, l, scale_r};
}

MarkingPolicy make_step_red(double t_min, double t_max, double p_max)
{
    if (t_min < 0.0 || !(t_max > t_min))
        throw PolicyError(fmt::format("need 0 <= t_min < t_max, got t_min={} t_max={}", t_min, t_max));
    if (!(p_max > 0.0) || p_max > 1.0)
        throw PolicyError(fmt::format("p_max must lie in (0, 1], got {}", p_max));
    return StepRedMarking{t_min, t_max, p_max};
}

namespace {

template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

} // namespace

double mark_probability(const MarkingPolicy& policy, double q)
{
    const double p = std::visit(
        Overloaded{
            [](const NoMarking&) { return 0.0; },
            [q](const ThresholdMarking& t) { return q > t.k ? 1.0 : 0.0; },
            [q](const IdealCurveMarking& c) { return corrected_curve(q, c.bdp, c.l, c.scale_r); },
            [q](const StepRedMarking& s) { return step_red_curve(q, s.t_min, s.t_max, s.p_max); },
        },
        policy);
    return std::clamp(p, 0.0, 1.0);
}

std::string describe(const MarkingPolicy& policy)
{
    return std::visit(
        Overloaded{
            [](const NoMarking&) { return std::string("none"); },
            [](const ThresholdMarking& t) { return fmt::format("threshold(k={})", t.k); },
            [](const IdealCurveMarking& c) {
                return fmt::format("ideal(bdp={:.3f},l={},r={})", c.bdp, c.l, c.scale_r);
            },
            [](const StepRedMarking& s) {
                return fmt::format("step_red(t_min={},t_max={},p_max={})", s.t_min, s.t_max, s.p_max);
            },
        },
        policy);
}

} // namespace tbtcp::net
