#include "tbtcp/cli/svg.hpp"

#include "tbtcp/sim/trace.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tbtcp::cli {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 440;
constexpr double kLeft = 70;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string num(double v)
{
    return sim::fixed(v, 2);
}

std::string tick(double v)
{
    const double a = std::abs(v);
    if (a != 0.0 && (a >= 1e5 || a < 1e-2))
        return fmt::format("{:.2e}", v);
    return a >= 100 ? sim::fixed(v, 0) : sim::fixed(v, 2);
}

struct Frame {
    double x0, x1, y0, y1;

    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void widen(double& lo, double& hi)
{
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
}

std::string open_svg(const ChartText& text)
{
    return fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
                       "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
                       "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
                       "<text x=\"{2}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{3}</text>\n",
                       num(kWidth), num(kHeight), num((kWidth - kRight + kLeft) / 2), escape(text.title));
}

std::string axes(const ChartText& text, const Frame& f, bool x_ticks)
{
    const double xa = kLeft;
    const double xb = kWidth - kRight;
    const double ya = kHeight - kBottom;
    const double yb = kTop;
    std::string s = fmt::format("<g stroke=\"black\" fill=\"none\"><line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>"
                                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{3}\"/></g>\n",
                                num(xa), num(ya), num(xb), num(yb));
    for (int i = 0; i <= 5; ++i) {
        const double yv = f.y0 + (f.y1 - f.y0) * i / 5.0;
        s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", num(xa - 6), num(f.py(yv) + 4),
                         tick(yv));
        if (x_ticks) {
            const double xv = f.x0 + (f.x1 - f.x0) * i / 5.0;
            s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(f.px(xv)),
                             num(ya + 18), tick(xv));
        }
    }
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num((xa + xb) / 2),
                     num(kHeight - 16), escape(text.x_label));
    s += fmt::format("<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
                     num((ya + yb) / 2), escape(text.y_label));
    return s;
}

std::string legend_entry(std::size_t i, const std::string& label)
{
    const double y = kTop + 16.0 * static_cast<double>(i);
    const double x = kWidth - kRight + 14;
    return fmt::format("<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"10\" fill=\"{}\"/>"
                       "<text x=\"{}\" y=\"{}\">{}</text>\n",
                       num(x), num(y), kPalette[i % std::size(kPalette)], num(x + 18), num(y + 10), escape(label));
}

std::string no_data()
{
    return fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"16\" fill=\"#888\">no data</text>\n",
                       num((kWidth - kRight + kLeft) / 2), num((kHeight - kBottom + kTop) / 2));
}

} // namespace

std::string line_chart(const ChartText& text, const std::vector<Series>& series, bool step)
{
    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -x0;
    double y0 = 0.0;
    double y1 = -x0;
    bool any = false;
    for (const Series& s : series)
        for (const auto& [x, y] : s.points) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
            any = true;
        }
    if (!any) {
        x0 = 0.0;
        x1 = 1.0;
        y1 = 1.0;
    }
    widen(x0, x1);
    widen(y0, y1);
    const Frame f{x0, x1, y0, y1 * 1.05};
    std::string svg = open_svg(text) + axes(text, f, true);
    if (!any)
        svg += no_data();
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::string pts;
        double prev_y = 0.0;
        for (std::size_t k = 0; k < series[i].points.size(); ++k) {
            const auto& [x, y] = series[i].points[k];
            if (step && k > 0)
                pts += fmt::format("{},{} ", num(f.px(x)), num(f.py(prev_y)));
            pts += fmt::format("{},{} ", num(f.px(x)), num(f.py(y)));
            prev_y = y;
        }
        svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>\n",
                           kPalette[i % std::size(kPalette)], pts);
        svg += legend_entry(i, series[i].label);
    }
    return svg + "</svg>\n";
}

std::string bar_chart(const ChartText& text, const std::vector<std::string>& legend,
                      const std::vector<BarGroup>& groups)
{
    double y1 = 0.0;
    for (const BarGroup& g : groups)
        for (double v : g.values)
            y1 = std::max(y1, v);
    const bool any = y1 > 0.0;
    if (!any)
        y1 = 1.0;
    const Frame f{0.0, static_cast<double>(std::max<std::size_t>(groups.size(), 1)), 0.0, y1 * 1.05};
    std::string svg = open_svg(text) + axes(text, f, false);
    if (!any)
        svg += no_data();
    const double slot = (kWidth - kLeft - kRight) / static_cast<double>(std::max<std::size_t>(groups.size(), 1));
    const double bar = slot * 0.8 / static_cast<double>(std::max<std::size_t>(legend.size(), 1));
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double base = kLeft + slot * static_cast<double>(g) + slot * 0.1;
        for (std::size_t i = 0; i < groups[g].values.size() && i < legend.size(); ++i) {
            const double top = f.py(groups[g].values[i]);
            svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                               num(base + bar * static_cast<double>(i)), num(top), num(bar * 0.95),
                               num(kHeight - kBottom - top), kPalette[i % std::size(kPalette)]);
        }
        svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(base + slot * 0.4),
                           num(kHeight - kBottom + 18), escape(groups[g].label));
    }
    for (std::size_t i = 0; i < legend.size(); ++i)
        svg += legend_entry(i, legend[i]);
    return svg + "</svg>\n";
}

} // namespace tbtcp::cli
