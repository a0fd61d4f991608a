#pragma once

#include <stdexcept>
#include <string>
#include <variant>

namespace tbtcp::net {

// Curve primitives shared with the curve fitter. Units are whatever the
// caller uses for q (packets in the switch, kilobytes in the fitter).

/// Queue-canceling marking curve with burst threshold l and the 0.5 cap,
/// divided by the scaling factor r:
///   0                    q <= l
///   (q - l)/(bdp - l + q)  l < q <= bdp + l
///   0.5                  q > bdp + l
double corrected_curve(double q, double bdp, double l, int scale_r);

/// Commodity 8-step RED. (t_min, t_max] is split into eight intervals
/// A_i = (t_min + i*s, t_min + (i+1)*s]; interval i marks with
/// p_max * (i + 0.5) / 8. Above t_max everything is marked.
double step_red_curve(double q, double t_min, double t_max, double p_max);

/// Index of the step interval containing q, for t_min < q <= t_max.
int step_index(double q, double t_min, double t_max);

struct NoMarking {};

struct ThresholdMarking {
    double k = 0.0;   // packets; marks when depth > k
};

struct IdealCurveMarking {
    double bdp = 0.0; // packets
    double l = 0.0;   // packets
    int scale_r = 1;
};

struct StepRedMarking {
    double t_min = 0.0;
    double t_max = 0.0;
    double p_max = 1.0;
};

using MarkingPolicy = std::variant<NoMarking, ThresholdMarking, IdealCurveMarking, StepRedMarking>;

class PolicyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Validating constructors; throw PolicyError on degenerate parameters.
MarkingPolicy make_threshold(double k);
MarkingPolicy make_ideal(double bdp, double l = 0.0, int scale_r = 1);
MarkingPolicy make_step_red(double t_min, double t_max, double p_max);

/// Marking probability at instantaneous depth q (packets, before insertion).
double mark_probability(const MarkingPolicy& policy, double q);

std::string describe(const MarkingPolicy& policy);

} // namespace tbtcp::net
