#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tbtcp::curvefit {

/// Fitting problem for a commodity 8-step RED profile. All queue quantities
/// share one unit (kilobytes in the CLI); `l` doubles as the RED t_min in
/// the usual configuration.
struct CurveSpec {
    double bdp = 180.0;
    double l = 138.0;
    double t_min = 138.0;
    double t_max = 550.0;
    int scale_r = 1;
};

class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws SpecError unless 0 <= l, 0 <= t_min < t_max, bdp > 0,
/// t_max > bdp + l and scale_r >= 1.
void validate(const CurveSpec& spec);

struct FitResult {
    double p_max = 0.0;
    double err = 0.0;   // integral of (p - f)^2 over [t_min, t_max], in queue units
};

double corrected_p(const CurveSpec& spec, double q);
double step_f(const CurveSpec& spec, double p_max, double q);

/// Trapezoid quadrature of the squared difference with subinterval width <= step.
double squared_error(const CurveSpec& spec, double p_max, double step = 0.1);

struct FitOptions {
    double quadrature_step = 0.1;
    double grid_step = 0.005;
    int refine_iterations = 60;
};

/// Dense grid over p_max in (0, 1] followed by golden-section refinement
/// around the best grid point.
FitResult fit_pmax(const CurveSpec& spec, const FitOptions& options = {});

/// Parameters to program into the switch plus the sender-side compensation.
struct SwitchConfigRecord {
    double t_min = 0.0;
    double t_max = 0.0;
    double p_max = 0.0;
    int sender_r = 1;   // MSS removed per ECE
    double bdp = 0.0;
    double l = 0.0;
    double err = 0.0;
};

SwitchConfigRecord emit_switch_config(const CurveSpec& spec, const FitResult& fit);

/// [marking] section in the experiment config format (units: KB).
std::string to_config_text(const SwitchConfigRecord& rec);
SwitchConfigRecord switch_config_from_text(const std::string& text);

struct TableRow {
    int r = 1;
    FitResult fit;
    FitResult published;
};

/// Published fits for t_min=138KB, t_max=550KB, BDP=180KB.
std::vector<TableRow> published_table();

/// Refits every published row with the same spec and its r.
std::vector<TableRow> reproduce_table(const FitOptions& options = {});

CurveSpec table_spec(int scale_r);

} // namespace tbtcp::curvefit
