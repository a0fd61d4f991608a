#include "tbtcp/curvefit/curvefit.hpp"

#include "tbtcp/net/marking.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

namespace tbtcp::curvefit {

void validate(const CurveSpec& s)
{
    if (!(s.bdp > 0.0))
        throw SpecError(fmt::format("bdp must be positive (got {})", s.bdp));
    if (s.l < 0.0 || s.t_min < 0.0)
        throw SpecError("l and t_min must be non-negative");
    if (!(s.t_max > s.t_min))
        throw SpecError(fmt::format("t_max ({}) must exceed t_min ({})", s.t_max, s.t_min));
    if (!(s.t_max > s.bdp + s.l))
        throw SpecError(fmt::format("t_max ({}) must exceed bdp + l ({})", s.t_max, s.bdp + s.l));
    if (s.scale_r < 1)
        throw SpecError(fmt::format("scale factor r must be >= 1 (got {})", s.scale_r));
}

double corrected_p(const CurveSpec& spec, double q)
{
    return net::corrected_curve(q, spec.bdp, spec.l, spec.scale_r);
}

double step_f(const CurveSpec& spec, double p_max, double q)
{
    return net::step_red_curve(q, spec.t_min, spec.t_max, p_max);
}

double squared_error(const CurveSpec& spec, double p_max, double step)
{
    // Trapezoid per piece so the step discontinuities sit on nodes; each
    // piece uses its own constant step value, the one-sided limit at both ends.
    const double s = (spec.t_max - spec.t_min) / 8.0;
    std::vector<double> cuts{spec.t_min, spec.t_max};
    for (int i = 1; i < 8; ++i)
        cuts.push_back(spec.t_min + s * i);
    for (double c : {spec.l, spec.bdp + spec.l})
        if (c > spec.t_min && c < spec.t_max)
            cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());

    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k];
        const double b = cuts[k + 1];
        if (b - a <= 0.0)
            continue;
        const double f = step_f(spec, p_max, 0.5 * (a + b));
        auto sq = [&](double q) {
            const double d = corrected_p(spec, q) - f;
            return d * d;
        };
        const auto n = std::max(1L, static_cast<long>(std::ceil((b - a) / step - 1e-9)));
        const double h = (b - a) / static_cast<double>(n);
        double sum = 0.5 * (sq(a) + sq(b));
        for (long i = 1; i < n; ++i)
            sum += sq(a + h * static_cast<double>(i));
        total += sum * h;
    }
    return total;
}

FitResult fit_pmax(const CurveSpec& spec, const FitOptions& opt)
{
    validate(spec);
    auto err = [&](double p) { return squared_error(spec, p, opt.quadrature_step); };

    FitResult best{opt.grid_step, err(opt.grid_step)};
    const auto steps = static_cast<int>(std::lround(1.0 / opt.grid_step));
    for (int i = 2; i <= steps; ++i) {
        const double p = opt.grid_step * i;
        const double e = err(p);
        if (e < best.err)
            best = {p, e};
    }

    // err is unimodal in p_max (quadratic), so golden section converges.
    double lo = std::max(best.p_max - opt.grid_step, 1e-9);
    double hi = std::min(best.p_max + opt.grid_step, 1.0);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - phi * (hi - lo);
    double b = lo + phi * (hi - lo);
    double ea = err(a);
    double eb = err(b);
    for (int i = 0; i < opt.refine_iterations; ++i) {
        if (ea < eb) {
            hi = b;
            b = a;
            eb = ea;
            a = hi - phi * (hi - lo);
            ea = err(a);
        } else {
            lo = a;
            a = b;
            ea = eb;
            b = lo + phi * (hi - lo);
            eb = err(b);
        }
    }
    const double p = 0.5 * (lo + hi);
    const double e = err(p);
    if (e < best.err)
        best = {p, e};
    return best;
}

SwitchConfigRecord emit_switch_config(const CurveSpec& spec, const FitResult& fit)
{
    SwitchConfigRecord rec;
    rec.t_min = spec.t_min;
    rec.t_max = spec.t_max;
    rec.p_max = fit.p_max;
    rec.sender_r = spec.scale_r;
    rec.bdp = spec.bdp;
    rec.l = spec.l;
    rec.err = fit.err;
    return rec;
}

std::string to_config_text(const SwitchConfigRecord& rec)
{
    // "{}" is fmt's shortest round-trip representation.
    return fmt::format("[marking]\n"
                       "policy = step_red\n"
                       "t_min_kb = {}\n"
                       "t_max_kb = {}\n"
                       "p_max = {}\n"
                       "bdp_kb = {}\n"
                       "l_kb = {}\n"
                       "fit_err = {}\n"
                       "[transport]\n"
                       "scale_r = {}\n",
                       rec.t_min, rec.t_max, rec.p_max, rec.bdp, rec.l, rec.err, rec.sender_r);
}

SwitchConfigRecord switch_config_from_text(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::string section;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (line[0] == '[') {
            section = line.substr(1, line.find(']') - 1);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        kv[section + "." + trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto num = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end())
            throw SpecError("switch config missing " + key);
        return std::stod(it->second);
    };
    SwitchConfigRecord rec;
    rec.t_min = num("marking.t_min_kb");
    rec.t_max = num("marking.t_max_kb");
    rec.p_max = num("marking.p_max");
    rec.bdp = num("marking.bdp_kb");
    rec.l = num("marking.l_kb");
    rec.err = num("marking.fit_err");
    rec.sender_r = static_cast<int>(num("transport.scale_r"));
    return rec;
}

CurveSpec table_spec(int scale_r)
{
    return CurveSpec{180.0, 138.0, 138.0, 550.0, scale_r};
}

std::vector<TableRow> published_table()
{
    return {
        {1, {}, {0.70, 6.66}},
        {2, {}, {0.35, 1.67}},
        {3, {}, {0.25, 0.76}},
        {4, {}, {0.20, 0.49}},
    };
}

std::vector<TableRow> reproduce_table(const FitOptions& options)
{
    std::vector<TableRow> rows = published_table();
    for (TableRow& row : rows)
        row.fit = fit_pmax(table_spec(row.r), options);
    return rows;
}

} // namespace tbtcp::curvefit
