#pragma once

#include <string>
#include <utility>
#include <vector>

namespace tbtcp::cli {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct ChartText {
    std::string title;
    std::string x_label;
    std::string y_label;
};

/// Polylines over shared axes; `step` draws a right-continuous staircase.
/// An empty series list renders the axes with a "no data" note.
std::string line_chart(const ChartText& text, const std::vector<Series>& series, bool step = false);

struct BarGroup {
    std::string label;
    std::vector<double> values;   // one per legend entry
};

/// Grouped vertical bars, one colour per legend entry.
std::string bar_chart(const ChartText& text, const std::vector<std::string>& legend,
                      const std::vector<BarGroup>& groups);

} // namespace tbtcp::cli
