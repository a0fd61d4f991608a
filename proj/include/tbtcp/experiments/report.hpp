#pragma once

#include "tbtcp/experiments/metrics.hpp"

#include <string>
#include <vector>

namespace tbtcp::experiments {

/// File names written by write_reports().
inline constexpr const char* kSummaryCsv = "summary.csv";
inline constexpr const char* kQueueTraceCsv = "queue_trace.csv";
inline constexpr const char* kQueueCdfCsv = "queue_cdf.csv";
inline constexpr const char* kFlowTraceCsv = "flow_trace.csv";
inline constexpr const char* kFlowsCsv = "flows.csv";
inline constexpr const char* kFctCsv = "fct.csv";

/// Header row of each report, comma-separated.
std::string summary_header();
std::string queue_trace_header();
std::string queue_cdf_header();
std::string flow_trace_header();
std::string flows_header();
std::string fct_header();

/// One row per run: identity, queue statistics, utilization, Jain index,
/// counters and convergence times in ms ("none" when not converged),
/// separated by ';'.
void write_summary_csv(const std::string& path, const std::vector<MetricsReport>& reports);
void write_queue_trace_csv(const std::string& path, const std::vector<MetricsReport>& reports);
void write_queue_cdf_csv(const std::string& path, const std::vector<MetricsReport>& reports);
void write_flow_trace_csv(const std::string& path, const std::vector<MetricsReport>& reports);
void write_flows_csv(const std::string& path, const std::vector<MetricsReport>& reports);
void write_fct_csv(const std::string& path, const std::vector<MetricsReport>& reports);

/// Writes every report into `dir` (created if missing) and returns the paths
/// in a fixed order. Traces are written only when some run recorded them.
std::vector<std::string> write_reports(const std::string& dir, const std::vector<MetricsReport>& reports);

} // namespace tbtcp::experiments
