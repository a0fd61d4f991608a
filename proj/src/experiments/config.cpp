#include "tbtcp/experiments/config.hpp"

#include "tbtcp/net/link.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace tbtcp::experiments {

using sim::SimTime;

double WorkloadSpec::mean_size() const
{
    auto seg = [](double a, double b) { return (b - a) / std::log(b / a); };
    return short_fraction * seg(static_cast<double>(min_size), static_cast<double>(split_size)) +
           (1.0 - short_fraction) * seg(static_cast<double>(split_size), static_cast<double>(max_size));
}

SimTime ExperimentConfig::effective_warmup() const
{
    return warmup.ns() > 0 ? warmup : SimTime::from_ns(duration.ns() / 10);
}

SimTime ExperimentConfig::effective_measure_from() const
{
    return measure_from.ns() > 0 ? measure_from : effective_warmup();
}

SimTime ExperimentConfig::effective_measure_until() const
{
    return measure_until.ns() > 0 ? measure_until : duration;
}

SimTime ExperimentConfig::max_rtt() const
{
    SimTime m;
    for (const FlowSpec& f : flows)
        m = std::max(m, f.rtt);
    if (workload)
        m = std::max(m, workload->rtt);
    return m;
}

double marking_bdp_packets(const ExperimentConfig& cfg)
{
    const MarkingConfig& m = cfg.marking;
    if (m.bdp_basis == BdpBasis::explicit_rtt)
        return net::bdp_packets(cfg.bottleneck_bps, m.bdp_rtt);
    std::vector<SimTime> rtts;
    for (const FlowSpec& f : cfg.flows)
        rtts.push_back(f.rtt);
    if (cfg.workload)
        rtts.push_back(cfg.workload->rtt);
    if (rtts.empty())
        return 0.0;
    SimTime pick;
    switch (m.bdp_basis) {
    case BdpBasis::min_rtt: pick = *std::min_element(rtts.begin(), rtts.end()); break;
    case BdpBasis::max_rtt: pick = *std::max_element(rtts.begin(), rtts.end()); break;
    default: {
        std::int64_t sum = 0;
        for (SimTime t : rtts)
            sum += t.ns();
        pick = SimTime::from_ns(sum / static_cast<std::int64_t>(rtts.size()));
    }
    }
    return net::bdp_packets(cfg.bottleneck_bps, pick);
}

void validate(const ExperimentConfig& cfg)
{
    if (!(cfg.bottleneck_bps > 0.0))
        throw ConfigError("bottleneck bandwidth must be positive", 0, "bottleneck_gbps");
    if (cfg.access_bps < 0.0)
        throw ConfigError("access bandwidth must be non-negative", 0, "access_gbps");
    if (cfg.buffer_packets < 1)
        throw ConfigError("buffer must hold at least one packet", 0, "buffer_packets");
    if (cfg.duration.ns() <= 0)
        throw ConfigError("duration must be positive", 0, "duration_ms");
    if (cfg.effective_warmup() >= cfg.duration)
        throw ConfigError("warmup must end before the run does", 0, "warmup_ms");
    if (cfg.effective_measure_until() > cfg.duration)
        throw ConfigError("measurement window must end within the run", 0, "measure_until_ms");
    if (cfg.effective_measure_from() >= cfg.effective_measure_until())
        throw ConfigError("measurement window must start before it ends", 0, "measure_from_ms");
    if (cfg.delayed_ack < 1)
        throw ConfigError("delayed_ack must be >= 1", 0, "delayed_ack");
    if (cfg.throughput_window.ns() <= 0)
        throw ConfigError("throughput window must be positive", 0, "throughput_window_ms");
    if (!(cfg.transport.beta > 0.0 && cfg.transport.beta <= 1.0))
        throw ConfigError("beta must be in (0, 1]", 0, "beta");
    if (cfg.transport.scale_r < 1)
        throw ConfigError("scale_r must be >= 1", 0, "scale_r");

    const SimTime min_rtt = SimTime::from_ns(
        2 * net::Link{cfg.bottleneck_bps, {}}.serialization(net::kMss).ns());
    for (const FlowSpec& f : cfg.flows) {
        if (f.rtt < min_rtt)
            throw ConfigError(fmt::format("rtt {}us is below two bottleneck serializations ({}us)", f.rtt.us(),
                                          min_rtt.us()),
                              0, "rtt_us");
        if (f.stop <= f.start)
            throw ConfigError("flow stop must follow its start", 0, "stop_ms");
        if (f.size_bytes <= 0)
            throw ConfigError("flow size must be positive", 0, "size_bytes");
    }
    if (cfg.workload) {
        const WorkloadSpec& w = *cfg.workload;
        if (!(w.min_size > 0 && w.min_size < w.split_size && w.split_size < w.max_size))
            throw ConfigError("workload sizes must satisfy 0 < min < split < max", 0, "size");
        if (!(w.short_fraction >= 0.0 && w.short_fraction <= 1.0))
            throw ConfigError("short_fraction must be in [0, 1]", 0, "short_fraction");
        if (!(w.load > 0.0))
            throw ConfigError("load must be positive", 0, "load");
        if (w.flow_count < 0)
            throw ConfigError("workload flow count must be non-negative", 0, "flow_count");
        if (w.rtt < min_rtt)
            throw ConfigError("workload rtt is below two bottleneck serializations", 0, "rtt_us");
    }
    const SimTime max_rtt = cfg.max_rtt();
    if (max_rtt.ns() > 0 && cfg.duration.ns() <= max_rtt.ns() * 100)
        throw ConfigError(fmt::format("duration must exceed 100 RTTs ({}ms)", max_rtt.seconds() * 1e5), 0,
                          "duration_ms");

    const MarkingConfig& m = cfg.marking;
    switch (m.kind) {
    case MarkingKind::threshold:
        if (m.k_packets < 0.0)
            throw ConfigError("k must be non-negative", 0, "k_packets");
        break;
    case MarkingKind::ideal:
        if (m.scale_r < 1)
            throw ConfigError("marking scale_r must be >= 1", 0, "scale_r");
        if (m.l_packets < 0.0)
            throw ConfigError("l must be non-negative", 0, "l_packets");
        if (m.bdp_basis == BdpBasis::explicit_rtt && m.bdp_rtt.ns() <= 0)
            throw ConfigError("bdp_rtt_us must be positive", 0, "bdp_rtt_us");
        break;
    case MarkingKind::step_red:
        if (!(m.t_max > m.t_min && m.t_min >= 0.0))
            throw ConfigError("step_red needs 0 <= t_min < t_max", 0, "t_max");
        if (!(m.p_max > 0.0 && m.p_max <= 1.0))
            throw ConfigError("p_max must be in (0, 1]", 0, "p_max");
        break;
    case MarkingKind::none: break;
    }
}

std::vector<FlowSpec> long_lived(int n, SimTime rtt)
{
    FlowSpec f;
    f.rtt = rtt;
    return std::vector<FlowSpec>(static_cast<std::size_t>(n), f);
}

// ---------------------------------------------------------------------------
// Text format

namespace {

const char* to_string(MarkingKind k)
{
    switch (k) {
    case MarkingKind::none: return "none";
    case MarkingKind::threshold: return "threshold";
    case MarkingKind::ideal: return "ideal";
    case MarkingKind::step_red: return "step_red";
    }
    return "?";
}

const char* to_string(BdpBasis b)
{
    switch (b) {
    case BdpBasis::min_rtt: return "min";
    case BdpBasis::avg_rtt: return "avg";
    case BdpBasis::max_rtt: return "max";
    case BdpBasis::explicit_rtt: return "rtt";
    }
    return "?";
}

std::string num(double v)
{
    return fmt::format("{}", v);
}

std::string ms(SimTime t)
{
    if (t == SimTime::infinity())
        return "none";
    return num(static_cast<double>(t.ns()) / 1e6);
}

std::string us(SimTime t)
{
    return num(static_cast<double>(t.ns()) / 1e3);
}

template <class T, class F>
std::string join_uniform(const std::vector<T>& v, F fmt_one)
{
    if (v.empty())
        return "";
    const bool uniform = std::all_of(v.begin(), v.end(), [&](const T& x) { return fmt_one(x) == fmt_one(v[0]); });
    if (uniform)
        return fmt_one(v[0]);
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ", ";
        out += fmt_one(v[i]);
    }
    return out;
}

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string value;
    int line = 0;
};

class Reader {
public:
    using Section = std::map<std::string, Entry>;

    explicit Reader(const std::string& text)
    {
        std::istringstream in(text);
        std::string raw;
        std::string section;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            std::string s = raw;
            if (const auto hash = s.find('#'); hash != std::string::npos)
                s.resize(hash);
            s = trim(s);
            if (s.empty())
                continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw ConfigError(fmt::format("line {}: malformed section header '{}'", line, s), line);
                section = trim(s.substr(1, s.size() - 2));
                if (!known_section(section))
                    throw ConfigError(fmt::format("line {}: unknown section [{}]", line, section), line, section);
                sections_[section];
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError(fmt::format("line {}: expected key = value", line), line);
            if (section.empty())
                throw ConfigError(fmt::format("line {}: key outside of any section", line), line);
            const std::string key = trim(s.substr(0, eq));
            auto& sec = sections_[section];
            if (sec.contains(key))
                throw ConfigError(fmt::format("line {}: duplicate key '{}'", line, key), line, key);
            sec[key] = Entry{trim(s.substr(eq + 1)), line};
        }
    }

    bool has_section(const std::string& name) const { return sections_.contains(name); }

    // Every key must be consumed; leftovers are misspellings.
    void finish() const
    {
        for (const auto& [sec, keys] : sections_)
            for (const auto& [key, entry] : keys)
                if (!used_.contains(sec + "." + key))
                    throw ConfigError(fmt::format("line {}: unknown key '{}' in [{}]", entry.line, key, sec),
                                      entry.line, key);
    }

    const Entry* get(const std::string& sec, const std::string& key)
    {
        auto s = sections_.find(sec);
        if (s == sections_.end())
            return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end())
            return nullptr;
        used_.insert(sec + "." + key);
        return &k->second;
    }

    double number(const std::string& sec, const std::string& key, double fallback)
    {
        const Entry* e = get(sec, key);
        return e ? parse_number(*e, key) : fallback;
    }

    std::string text(const std::string& sec, const std::string& key, const std::string& fallback)
    {
        const Entry* e = get(sec, key);
        return e ? e->value : fallback;
    }

    bool boolean(const std::string& sec, const std::string& key, bool fallback)
    {
        const Entry* e = get(sec, key);
        if (!e)
            return fallback;
        if (e->value == "true" || e->value == "1")
            return true;
        if (e->value == "false" || e->value == "0")
            return false;
        throw ConfigError(fmt::format("line {}: '{}' expects true or false, got '{}'", e->line, key, e->value),
                          e->line, key);
    }

    // Comma-separated list; `none` maps to +inf.
    std::vector<double> list(const std::string& sec, const std::string& key, int* line_out)
    {
        const Entry* e = get(sec, key);
        std::vector<double> out;
        if (!e)
            return out;
        *line_out = e->line;
        std::string item;
        std::istringstream in(e->value);
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item == "none" || item == "unbounded")
                out.push_back(std::numeric_limits<double>::infinity());
            else
                out.push_back(parse_number(Entry{item, e->line}, key));
        }
        return out;
    }

    static double parse_number(const Entry& e, const std::string& key)
    {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(e.value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != e.value.size() || !std::isfinite(v))
            throw ConfigError(fmt::format("line {}: '{}' expects a number, got '{}'", e.line, key, e.value), e.line,
                              key);
        return v;
    }

private:
    static bool known_section(const std::string& s)
    {
        static const std::set<std::string> names{"experiment", "network", "transport", "marking",
                                                  "flows",      "workload", "metrics"};
        return names.contains(s);
    }

    std::map<std::string, Section> sections_;
    std::set<std::string> used_;
};

SimTime from_ms_value(double v)
{
    return std::isinf(v) ? SimTime::infinity() : SimTime::from_ms(v);
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text)
{
    Reader r(text);
    ExperimentConfig c;

    c.name = r.text("experiment", "name", c.name);
    c.duration = SimTime::from_ms(r.number("experiment", "duration_ms", c.duration.seconds() * 1e3));
    c.warmup = SimTime::from_ms(r.number("experiment", "warmup_ms", 0.0));
    c.seed = static_cast<std::uint64_t>(r.number("experiment", "seed", static_cast<double>(c.seed)));
    c.start_jitter = SimTime::from_us(r.number("experiment", "start_jitter_us", 0.0));

    c.bottleneck_bps = r.number("network", "bottleneck_gbps", c.bottleneck_bps / 1e9) * 1e9;
    c.access_bps = r.number("network", "access_gbps", 0.0) * 1e9;
    c.buffer_packets = static_cast<std::int64_t>(r.number("network", "buffer_packets", 680));

    if (const Entry* e = r.get("transport", "algorithm")) {
        const auto alg = transport::parse_algorithm(e->value);
        if (!alg)
            throw ConfigError(fmt::format("line {}: unknown algorithm '{}' (reno, dctcp, tbtcp, dctcp_rai)", e->line,
                                          e->value),
                              e->line, "algorithm");
        c.transport.algorithm = *alg;
    }
    c.transport.beta = r.number("transport", "beta", c.transport.beta);
    c.transport.scale_r = static_cast<int>(r.number("transport", "scale_r", c.transport.scale_r));
    c.transport.g = r.number("transport", "g", c.transport.g);
    c.transport.initial_alpha = r.number("transport", "initial_alpha", c.transport.initial_alpha);
    c.transport.initial_cwnd = r.number("transport", "initial_cwnd", c.transport.initial_cwnd);
    c.transport.min_rto = SimTime::from_ms(r.number("transport", "min_rto_ms", 10.0));
    c.delayed_ack = static_cast<int>(r.number("transport", "delayed_ack", c.delayed_ack));

    if (const Entry* e = r.get("marking", "policy")) {
        const std::string& v = e->value;
        if (v == "none")
            c.marking.kind = MarkingKind::none;
        else if (v == "threshold")
            c.marking.kind = MarkingKind::threshold;
        else if (v == "ideal")
            c.marking.kind = MarkingKind::ideal;
        else if (v == "step_red")
            c.marking.kind = MarkingKind::step_red;
        else
            throw ConfigError(
                fmt::format("line {}: unknown policy '{}' (none, threshold, ideal, step_red)", e->line, v), e->line,
                "policy");
    }
    c.marking.k_packets = r.number("marking", "k_packets", 0.0);
    if (const Entry* e = r.get("marking", "bdp_basis")) {
        const std::string& v = e->value;
        if (v == "min")
            c.marking.bdp_basis = BdpBasis::min_rtt;
        else if (v == "avg")
            c.marking.bdp_basis = BdpBasis::avg_rtt;
        else if (v == "max")
            c.marking.bdp_basis = BdpBasis::max_rtt;
        else if (v == "rtt")
            c.marking.bdp_basis = BdpBasis::explicit_rtt;
        else
            throw ConfigError(fmt::format("line {}: unknown bdp_basis '{}' (min, avg, max, rtt)", e->line, v),
                              e->line, "bdp_basis");
    }
    c.marking.bdp_rtt = SimTime::from_us(r.number("marking", "bdp_rtt_us", 0.0));
    c.marking.l_packets = r.number("marking", "l_packets", 0.0);
    c.marking.scale_r = static_cast<int>(r.number("marking", "scale_r", 1));
    c.marking.t_min = r.number("marking", "t_min_packets", 0.0);
    c.marking.t_max = r.number("marking", "t_max_packets", 0.0);
    c.marking.p_max = r.number("marking", "p_max", 1.0);

    if (r.has_section("flows")) {
        const int count = static_cast<int>(r.number("flows", "count", 0));
        if (count < 0)
            throw ConfigError("flows.count must be non-negative", 0, "count");
        c.flows.assign(static_cast<std::size_t>(count), FlowSpec{});
        // A single value broadcasts to every flow.
        auto apply = [&](const std::string& key, const std::function<void(FlowSpec&, double)>& set) {
            int line = 0;
            const std::vector<double> vals = r.list("flows", key, &line);
            if (vals.empty())
                return;
            if (vals.size() != 1 && vals.size() != c.flows.size())
                throw ConfigError(fmt::format("line {}: '{}' has {} values for {} flows", line, key, vals.size(),
                                              c.flows.size()),
                                  line, key);
            for (std::size_t i = 0; i < c.flows.size(); ++i)
                set(c.flows[i], vals.size() == 1 ? vals[0] : vals[i]);
        };
        apply("rtt_us", [](FlowSpec& f, double v) { f.rtt = SimTime::from_us(v); });
        apply("start_ms", [](FlowSpec& f, double v) { f.start = SimTime::from_ms(v); });
        apply("stop_ms", [](FlowSpec& f, double v) { f.stop = from_ms_value(v); });
        apply("size_bytes", [](FlowSpec& f, double v) {
            f.size_bytes = std::isinf(v) ? transport::kUnbounded : static_cast<std::int64_t>(v);
        });
    }

    if (r.has_section("workload")) {
        WorkloadSpec w;
        w.min_size = static_cast<std::int64_t>(r.number("workload", "min_size_bytes", static_cast<double>(w.min_size)));
        w.split_size =
            static_cast<std::int64_t>(r.number("workload", "split_size_bytes", static_cast<double>(w.split_size)));
        w.max_size = static_cast<std::int64_t>(r.number("workload", "max_size_bytes", static_cast<double>(w.max_size)));
        w.short_fraction = r.number("workload", "short_fraction", w.short_fraction);
        w.load = r.number("workload", "load", w.load);
        w.flow_count = static_cast<int>(r.number("workload", "flow_count", w.flow_count));
        w.rtt = SimTime::from_us(r.number("workload", "rtt_us", w.rtt.us()));
        c.workload = w;
    }

    c.measure_from = SimTime::from_ms(r.number("metrics", "measure_from_ms", 0.0));
    c.measure_until = SimTime::from_ms(r.number("metrics", "measure_until_ms", 0.0));
    c.throughput_window = SimTime::from_ms(r.number("metrics", "throughput_window_ms", 10.0));
    {
        int line = 0;
        for (double v : r.list("metrics", "convergence_events_ms", &line))
            c.convergence_events.push_back(SimTime::from_ms(v));
    }
    c.trace_queue = r.boolean("metrics", "trace_queue", false);
    c.trace_flows = r.boolean("metrics", "trace_flows", false);
    c.trace_queue_events = r.boolean("metrics", "trace_queue_events", false);

    r.finish();
    validate(c);
    return c;
}

std::string to_config_text(const ExperimentConfig& c)
{
    std::string o;
    auto line = [&o](std::string_view key, const std::string& value) { o += fmt::format("{} = {}\n", key, value); };

    o += "[experiment]\n";
    line("name", c.name);
    line("duration_ms", ms(c.duration));
    line("warmup_ms", ms(c.warmup));
    line("seed", fmt::format("{}", c.seed));
    line("start_jitter_us", us(c.start_jitter));

    o += "\n[network]\n";
    line("bottleneck_gbps", num(c.bottleneck_bps / 1e9));
    line("access_gbps", num(c.access_bps / 1e9));
    line("buffer_packets", fmt::format("{}", c.buffer_packets));

    o += "\n[transport]\n";
    line("algorithm", std::string(transport::to_string(c.transport.algorithm)));
    line("beta", num(c.transport.beta));
    line("scale_r", fmt::format("{}", c.transport.scale_r));
    line("g", num(c.transport.g));
    line("initial_alpha", num(c.transport.initial_alpha));
    line("initial_cwnd", num(c.transport.initial_cwnd));
    line("min_rto_ms", ms(c.transport.min_rto));
    line("delayed_ack", fmt::format("{}", c.delayed_ack));

    o += "\n[marking]\n";
    line("policy", to_string(c.marking.kind));
    switch (c.marking.kind) {
    case MarkingKind::threshold: line("k_packets", num(c.marking.k_packets)); break;
    case MarkingKind::ideal:
        line("bdp_basis", to_string(c.marking.bdp_basis));
        if (c.marking.bdp_basis == BdpBasis::explicit_rtt)
            line("bdp_rtt_us", us(c.marking.bdp_rtt));
        line("l_packets", num(c.marking.l_packets));
        line("scale_r", fmt::format("{}", c.marking.scale_r));
        break;
    case MarkingKind::step_red:
        line("t_min_packets", num(c.marking.t_min));
        line("t_max_packets", num(c.marking.t_max));
        line("p_max", num(c.marking.p_max));
        break;
    case MarkingKind::none: break;
    }

    if (!c.flows.empty()) {
        o += "\n[flows]\n";
        line("count", fmt::format("{}", c.flows.size()));
        line("rtt_us", join_uniform(c.flows, [](const FlowSpec& f) { return us(f.rtt); }));
        line("start_ms", join_uniform(c.flows, [](const FlowSpec& f) { return ms(f.start); }));
        line("stop_ms", join_uniform(c.flows, [](const FlowSpec& f) { return ms(f.stop); }));
        line("size_bytes", join_uniform(c.flows, [](const FlowSpec& f) {
                 return f.size_bytes == transport::kUnbounded ? std::string("unbounded")
                                                                : fmt::format("{}", f.size_bytes);
             }));
    }

    if (c.workload) {
        const WorkloadSpec& w = *c.workload;
        o += "\n[workload]\n";
        line("min_size_bytes", fmt::format("{}", w.min_size));
        line("split_size_bytes", fmt::format("{}", w.split_size));
        line("max_size_bytes", fmt::format("{}", w.max_size));
        line("short_fraction", num(w.short_fraction));
        line("load", num(w.load));
        line("flow_count", fmt::format("{}", w.flow_count));
        line("rtt_us", us(w.rtt));
    }

    o += "\n[metrics]\n";
    line("measure_from_ms", ms(c.measure_from));
    line("measure_until_ms", ms(c.measure_until));
    line("throughput_window_ms", ms(c.throughput_window));
    if (!c.convergence_events.empty()) {
        std::string ev;
        for (std::size_t i = 0; i < c.convergence_events.size(); ++i)
            ev += (i ? ", " : "") + ms(c.convergence_events[i]);
        line("convergence_events_ms", ev);
    }
    line("trace_queue", c.trace_queue ? "true" : "false");
    line("trace_flows", c.trace_flows ? "true" : "false");
    line("trace_queue_events", c.trace_queue_events ? "true" : "false");
    return o;
}

std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t config_hash(const ExperimentConfig& cfg)
{
    return fnv1a(to_config_text(cfg));
}

} // namespace tbtcp::experiments
