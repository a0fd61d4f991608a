#include "tbtcp/cli/cli.hpp"
#include "tbtcp/cli/svg.hpp"
#include "tbtcp/experiments/metrics.hpp"
#include "tbtcp/experiments/report.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace tbtcp::cli {

namespace ex = tbtcp::experiments;

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

std::string join(const std::vector<std::string>& cells)
{
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i)
        out += (i ? "," : "") + cells[i];
    return out;
}

double number(const std::string& s, std::size_t row)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size())
            return v;
    } catch (const std::exception&) {
    }
    throw SchemaError("row " + std::to_string(row + 2) + ": not a number: '" + s + "'");
}

enum class Kind { queue_trace, queue_cdf, flow_trace, fct, flows, summary };

std::optional<Kind> kind_from_header(const std::string& header)
{
    const std::pair<std::string, Kind> known[] = {
        {ex::queue_trace_header(), Kind::queue_trace}, {ex::queue_cdf_header(), Kind::queue_cdf},
        {ex::flow_trace_header(), Kind::flow_trace},   {ex::fct_header(), Kind::fct},
        {ex::flows_header(), Kind::flows},             {ex::summary_header(), Kind::summary},
    };
    for (const auto& [h, k] : known)
        if (h == header)
            return k;
    return std::nullopt;
}

std::optional<Kind> kind_from_name(const std::string& file_name)
{
    const std::pair<const char*, Kind> known[] = {
        {ex::kQueueTraceCsv, Kind::queue_trace}, {ex::kQueueCdfCsv, Kind::queue_cdf}, {ex::kFlowTraceCsv, Kind::flow_trace},
        {ex::kFctCsv, Kind::fct},                {ex::kFlowsCsv, Kind::flows},        {ex::kSummaryCsv, Kind::summary},
    };
    for (const auto& [n, k] : known)
        if (file_name == n)
            return k;
    return std::nullopt;
}

// Series keyed by the first column, in order of first appearance.
std::vector<Series> grouped(const CsvTable& t, std::size_t key_cols, std::size_t x, std::size_t y)
{
    std::vector<Series> out;
    std::map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        std::string key = row[0];
        for (std::size_t k = 1; k < key_cols; ++k)
            key += "/" + row[k];
        auto [it, fresh] = index.try_emplace(key, out.size());
        if (fresh)
            out.push_back({key, {}});
        out[it->second].points.emplace_back(number(row[x], r), number(row[y], r));
    }
    return out;
}

std::string fct_chart(const CsvTable& t)
{
    std::vector<std::string> algorithms;
    std::map<std::string, std::vector<ex::FctRecord>> by_algo;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (!by_algo.count(row[2]))
            algorithms.push_back(row[2]);
        ex::FctRecord rec;
        rec.size_bytes = static_cast<std::int64_t>(number(row[0], r));
        rec.fct = sim::SimTime::from_ns(static_cast<std::int64_t>(number(row[1], r) * 1e3));
        by_algo[row[2]].push_back(rec);
    }
    std::vector<BarGroup> groups;
    for (const std::string& a : algorithms) {
        const auto buckets = ex::fct_buckets(by_algo[a]);
        if (groups.empty())
            for (const auto& b : buckets)
                groups.push_back({b.label, {}});
        for (std::size_t i = 0; i < buckets.size(); ++i)
            groups[i].values.push_back(buckets[i].mean_fct_us);
    }
    if (algorithms.empty())
        for (const auto& b : ex::fct_buckets({}))
            groups.push_back({b.label, {}});
    return bar_chart({"Mean flow completion time by size", "flow size", "mean FCT (us)"}, algorithms, groups);
}

} // namespace

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SchemaError("cannot read " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line))
        return t;
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto cells = split(line);
        if (cells.size() != t.header.size())
            throw SchemaError(path + ": row " + std::to_string(t.rows.size() + 2) + " has " +
                              std::to_string(cells.size()) + " fields, header has " +
                              std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

std::string render_plot(const std::string& file_name, const CsvTable& table)
{
    std::optional<Kind> kind;
    if (table.header.empty()) {
        kind = kind_from_name(file_name);
        if (!kind)
            return line_chart({file_name, "", ""}, {});
    } else {
        kind = kind_from_header(join(table.header));
        if (!kind)
            throw SchemaError(file_name + ": unrecognised header '" + join(table.header) + "'");
    }
    switch (*kind) {
    case Kind::queue_trace:
        return line_chart({"Bottleneck queue depth", "time (us)", "queue (packets)"}, grouped(table, 1, 1, 2));
    case Kind::queue_cdf:
        return line_chart({"Queue depth CDF", "queue (packets)", "P(depth <= x)"}, grouped(table, 1, 1, 2), true);
    case Kind::flow_trace:
        return line_chart({"Per-flow throughput", "time (ms)", "throughput (Gbps)"}, grouped(table, 2, 2, 3));
    case Kind::fct: return fct_chart(table);
    case Kind::flows:
        return line_chart({"Throughput against RTT", "rtt (us)", "throughput (Gbps)"}, grouped(table, 1, 2, 3));
    case Kind::summary: {
        std::vector<BarGroup> groups;
        for (std::size_t r = 0; r < table.rows.size(); ++r)
            groups.push_back({table.rows[r][0], {number(table.rows[r][5], r), number(table.rows[r][8], r)}});
        return bar_chart({"Queue depth per run", "run", "packets"}, {"mean queue", "max queue"}, groups);
    }
    }
    return {};
}

} // namespace tbtcp::cli
