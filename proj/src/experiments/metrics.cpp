#include "tbtcp/experiments/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tbtcp::experiments {

using sim::SimTime;

double jain_index(const std::vector<double>& xs)
{
    if (xs.empty())
        throw std::invalid_argument("jain_index needs at least one throughput");
    double sum = 0.0;
    double sq = 0.0;
    for (double x : xs) {
        if (!(x >= 0.0))
            throw std::invalid_argument("jain_index: throughputs must be non-negative");
        sum += x;
        sq += x * x;
    }
    if (sum <= 0.0)
        throw std::invalid_argument("jain_index: all throughputs are zero");
    return sum * sum / (static_cast<double>(xs.size()) * sq);
}

SimTime convergence_time(const ThroughputTrace& trace, SimTime event_time, double band, int hold_windows)
{
    const std::int64_t w = trace.window.ns();
    if (w <= 0 || trace.rates_bps.empty())
        return kNotConverged;
    std::size_t windows = 0;
    for (const auto& r : trace.rates_bps)
        windows = std::max(windows, r.size());

    // A flow counts in a window only if it was active for all of it.
    auto within = [&](std::size_t k) {
        const SimTime lo = SimTime::from_ns(static_cast<std::int64_t>(k) * w);
        const SimTime hi = lo + trace.window;
        std::vector<std::size_t> active;
        for (std::size_t f = 0; f < trace.active.size(); ++f)
            if (trace.active[f].first <= lo && trace.active[f].second >= hi)
                active.push_back(f);
        if (active.empty())
            return false;
        const double share = trace.capacity_bps / static_cast<double>(active.size());
        for (std::size_t f : active) {
            const double r = k < trace.rates_bps[f].size() ? trace.rates_bps[f][k] : 0.0;
            if (std::abs(r - share) > band * share)
                return false;
        }
        return true;
    };

    const auto first = static_cast<std::size_t>((event_time.ns() + w - 1) / w);
    int run = 0;
    for (std::size_t k = first; k < windows; ++k) {
        run = within(k) ? run + 1 : 0;
        if (run == hold_windows) {
            const std::int64_t start = static_cast<std::int64_t>(k + 1 - hold_windows) * w;
            return SimTime::from_ns(std::max<std::int64_t>(0, start - event_time.ns()));
        }
    }
    return kNotConverged;
}

std::vector<FctBucket> fct_buckets(const std::vector<FctRecord>& records)
{
    std::vector<FctBucket> out = {
        {"<100KB", 0, 99'999},
        {"100KB-1MB", 100'000, 1'000'000},
        {">1MB", 1'000'001, std::numeric_limits<std::int64_t>::max()},
    };
    std::vector<double> sum(out.size(), 0.0);
    for (const FctRecord& r : records)
        for (std::size_t b = 0; b < out.size(); ++b)
            if (r.size_bytes >= out[b].min_bytes && r.size_bytes <= out[b].max_bytes) {
                sum[b] += static_cast<double>(r.fct.ns()) / 1e3;
                ++out[b].count;
            }
    for (std::size_t b = 0; b < out.size(); ++b)
        if (out[b].count > 0)
            out[b].mean_fct_us = sum[b] / static_cast<double>(out[b].count);
    return out;
}

void QueueHistogram::add(std::int64_t depth, std::int64_t weight_ns)
{
    if (weight_ns <= 0)
        return;
    const auto d = static_cast<std::size_t>(std::max<std::int64_t>(depth, 0));
    if (d >= weight_.size())
        weight_.resize(d + 1, 0.0);
    weight_[d] += static_cast<double>(weight_ns);
    total_ += static_cast<double>(weight_ns);
    max_ = std::max(max_, static_cast<std::int64_t>(d));
}

double QueueHistogram::mean() const
{
    if (total_ <= 0.0)
        return 0.0;
    double s = 0.0;
    for (std::size_t d = 0; d < weight_.size(); ++d)
        s += static_cast<double>(d) * weight_[d];
    return s / total_;
}

double QueueHistogram::quantile(double q) const
{
    if (total_ <= 0.0)
        return 0.0;
    double acc = 0.0;
    for (std::size_t d = 0; d < weight_.size(); ++d) {
        acc += weight_[d];
        if (acc >= q * total_)
            return static_cast<double>(d);
    }
    return static_cast<double>(weight_.size() - 1);
}

std::vector<std::pair<std::int64_t, double>> QueueHistogram::cdf() const
{
    std::vector<std::pair<std::int64_t, double>> out;
    if (total_ <= 0.0)
        return out;
    double acc = 0.0;
    for (std::size_t d = 0; d < weight_.size(); ++d) {
        if (weight_[d] <= 0.0)
            continue;
        acc += weight_[d];
        out.emplace_back(static_cast<std::int64_t>(d), acc / total_);
    }
    return out;
}

} // namespace tbtcp::experiments
