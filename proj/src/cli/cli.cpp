#include "tbtcp/cli/cli.hpp"

#include "tbtcp/curvefit/curvefit.hpp"
#include "tbtcp/experiments/report.hpp"
#include "tbtcp/experiments/run.hpp"
#include "tbtcp/experiments/scenarios.hpp"
#include "tbtcp/sim/engine.hpp"
#include "tbtcp/sim/trace.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace tbtcp::cli {

namespace ex = tbtcp::experiments;
namespace fs = std::filesystem;
using sim::fixed;

namespace {

constexpr const char* kManifest = "manifest.json";

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string describe(const ex::ConfigError& e)
{
    std::string where;
    if (e.line() > 0)
        where += fmt::format("line {}: ", e.line());
    if (!e.field().empty())
        where += fmt::format("field '{}': ", e.field());
    return where + e.what();
}

std::string convergence_list(const std::vector<sim::SimTime>& times)
{
    std::string out;
    for (std::size_t i = 0; i < times.size(); ++i)
        out += (i ? " " : "") +
               (ex::converged(times[i]) ? fixed(static_cast<double>(times[i].ns()) / 1e6, 1) + "ms" : "none");
    return out;
}

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    bool fast = false;
};

int cmd_run(const Globals& g, const std::string& target, std::ostream& out, std::ostream& err)
{
    std::vector<ex::ExperimentConfig> configs;
    const bool from_config = fs::is_regular_file(target);
    if (from_config) {
        try {
            configs.push_back(ex::parse_config_text(slurp(target)));
        } catch (const ex::ConfigError& e) {
            err << target << ": " << describe(e) << '\n';
            return kExitUsage;
        }
    } else {
        auto sc = ex::find_scenario(target, g.fast ? ex::Scale::fast : ex::Scale::paper);
        if (!sc) {
            err << "unknown scenario '" << target << "'; valid names:";
            for (const std::string& n : ex::scenario_names())
                err << ' ' << n;
            err << "\n(or pass the path of a config file)\n";
            return kExitUsage;
        }
        configs = sc->runs;
    }
    if (g.seed)
        for (ex::ExperimentConfig& c : configs)
            c.seed = *g.seed;

    std::vector<ex::MetricsReport> reports;
    try {
        for (const ex::ExperimentConfig& c : configs)
            ex::validate(c);
        reports = ex::run_sweep(configs);
    } catch (const ex::ConfigError& e) {
        err << describe(e) << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "simulation failed: " << e.what() << '\n';
        return kExitSimulation;
    }

    RunManifest m;
    m.target = target;
    m.from_config = from_config;
    m.out_dir = g.out_dir;
    m.seed = g.seed;
    m.fast = g.fast;
    try {
        for (const std::string& p : ex::write_reports(g.out_dir, reports)) {
            const std::string bytes = slurp(p);
            m.files.push_back({fs::path(p).filename().string(), bytes.size(), ex::fnv1a(bytes)});
        }
        std::ofstream(fs::path(g.out_dir) / kManifest, std::ios::binary | std::ios::trunc) << to_json(m);
    } catch (const std::exception& e) {
        err << "cannot write reports: " << e.what() << '\n';
        return kExitSimulation;
    }

    for (const ex::MetricsReport& r : reports) {
        out << fmt::format("{:<28} util={} mean_q={} p99_q={} max_q={} jain={}", r.name, fixed(r.utilization, 4),
                           fixed(r.mean_queue, 2), fixed(r.p99_queue, 0), r.max_queue, fixed(r.jain, 3));
        if (!r.convergence_times.empty())
            out << " converge=" << convergence_list(r.convergence_times);
        out << '\n';
    }
    out << "wrote " << m.files.size() << " files and " << kManifest << " to " << g.out_dir << '\n';
    return kExitOk;
}

struct FitFlags {
    double bdp = 180.0;
    std::optional<double> l;
    double t_min = 138.0;
    double t_max = 550.0;
    int r = 1;
    bool table1 = false;
    bool emit = false;
};

int cmd_fit(const FitFlags& f, std::ostream& out, std::ostream& err)
{
    namespace cf = tbtcp::curvefit;
    try {
        if (f.table1) {
            out << fmt::format("{:>2} {:>10} {:>10} {:>16} {:>14}\n", "r", "p_max", "err", "published_p_max",
                               "published_err");
            for (const cf::TableRow& row : cf::reproduce_table())
                out << fmt::format("{:>2} {:>10} {:>10} {:>16} {:>14}\n", row.r, fixed(row.fit.p_max, 4),
                                   fixed(row.fit.err, 4), fixed(row.published.p_max, 2), fixed(row.published.err, 2));
            return kExitOk;
        }
        cf::CurveSpec spec;
        spec.bdp = f.bdp;
        spec.l = f.l.value_or(f.t_min);
        spec.t_min = f.t_min;
        spec.t_max = f.t_max;
        spec.scale_r = f.r;
        const cf::FitResult fit = cf::fit_pmax(spec);
        out << "p_max = " << fixed(fit.p_max, 6) << '\n' << "err = " << fixed(fit.err, 6) << '\n';
        if (f.emit)
            out << cf::to_config_text(cf::emit_switch_config(spec, fit));
        return kExitOk;
    } catch (const cf::SpecError& e) {
        err << "invalid curve: " << e.what() << '\n';
        return kExitUsage;
    }
}

int cmd_plot(const std::vector<std::string>& files, const std::string& out_dir, std::ostream& out, std::ostream& err)
{
    int status = kExitOk;
    for (const std::string& file : files) {
        try {
            const std::string name = fs::path(file).filename().string();
            const std::string svg = render_plot(name, read_csv(file));
            fs::path target = fs::path(file).replace_extension(".svg");
            if (!out_dir.empty()) {
                fs::create_directories(out_dir);
                target = fs::path(out_dir) / target.filename();
            }
            std::ofstream(target, std::ios::binary | std::ios::trunc) << svg;
            out << "wrote " << target.string() << '\n';
        } catch (const SchemaError& e) {
            err << file << ": " << e.what() << '\n';
            status = kExitUsage;
        }
    }
    return status;
}

int cmd_list(const std::string& write_dir, std::ostream& out)
{
    for (const ex::Scenario& sc : ex::named_scenarios(ex::Scale::paper)) {
        out << fmt::format("{:<18} {}\n", sc.name, sc.description);
        for (const ex::ExperimentConfig& c : sc.runs)
            out << "    " << c.name << '\n';
    }
    if (write_dir.empty())
        return kExitOk;
    fs::create_directories(write_dir);
    std::size_t written = 0;
    for (ex::Scale scale : {ex::Scale::fast, ex::Scale::paper}) {
        const char* tag = scale == ex::Scale::fast ? "fast" : "paper";
        for (const ex::Scenario& sc : ex::named_scenarios(scale))
            for (const ex::ExperimentConfig& c : sc.runs) {
                const fs::path p = fs::path(write_dir) / tag / (c.name + ".conf");
                fs::create_directories(p.parent_path());
                std::ofstream(p, std::ios::binary | std::ios::trunc)
                    << "# scenario " << sc.name << " (" << tag << " scale): " << sc.description << "\n"
                    << "# run with: tbtcp run " << p.generic_string() << "\n\n"
                    << ex::to_config_text(c);
                ++written;
            }
    }
    out << "wrote " << written << " configs under " << write_dir << '\n';
    return kExitOk;
}

} // namespace

std::string to_json(const RunManifest& m)
{
    nlohmann::ordered_json j;
    j["target"] = m.target;
    j["from_config"] = m.from_config;
    j["out_dir"] = m.out_dir;
    j["seed"] = m.seed ? nlohmann::ordered_json(*m.seed) : nlohmann::ordered_json(nullptr);
    j["scale"] = m.fast ? "fast" : "paper";
    j["files"] = nlohmann::ordered_json::array();
    for (const ManifestEntry& f : m.files)
        j["files"].push_back({{"path", f.path}, {"bytes", f.bytes}, {"fnv1a", fmt::format("{:016x}", f.fnv1a)}});
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text)
{
    const auto j = nlohmann::json::parse(text);
    RunManifest m;
    m.target = j.at("target").get<std::string>();
    m.from_config = j.at("from_config").get<bool>();
    m.out_dir = j.at("out_dir").get<std::string>();
    if (!j.at("seed").is_null())
        m.seed = j.at("seed").get<std::uint64_t>();
    m.fast = j.at("scale").get<std::string>() == "fast";
    for (const auto& f : j.at("files"))
        m.files.push_back({f.at("path").get<std::string>(), f.at("bytes").get<std::uint64_t>(),
                           std::stoull(f.at("fnv1a").get<std::string>(), nullptr, 16)});
    return m;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Packet-level simulator for tiny-buffer data center congestion control", "tbtcp"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Override the seed of every run");
    app.add_option("--out", g.out_dir, "Output directory for reports")->capture_default_str();
    app.add_flag("--fast", g.fast, "Use the shortened desk-scale variants of named scenarios");

    std::string target;
    auto* run = app.add_subcommand("run", "Run a named scenario or a config file");
    run->add_option("target", target, "Scenario name or config path")->required();

    FitFlags fit;
    auto* fitc = app.add_subcommand("fit", "Fit a commodity RED step profile to the corrected marking curve");
    fitc->add_option("--bdp-kb", fit.bdp, "Bandwidth-delay product (KB)")->capture_default_str();
    fitc->add_option("--l-kb", fit.l, "Curve offset l (KB); defaults to t_min");
    fitc->add_option("--tmin-kb", fit.t_min, "RED t_min (KB)")->capture_default_str();
    fitc->add_option("--tmax-kb", fit.t_max, "RED t_max (KB)")->capture_default_str();
    fitc->add_option("--r", fit.r, "Scaling factor r")->capture_default_str();
    fitc->add_flag("--table1", fit.table1, "Refit the published table rows and print both");
    fitc->add_flag("--emit", fit.emit, "Also print the [marking] config section");

    std::vector<std::string> csvs;
    std::string plot_out;
    auto* plot = app.add_subcommand("plot", "Render report CSVs as SVG charts");
    plot->add_option("files", csvs, "Report CSV files")->required();
    plot->add_option("--svg-dir", plot_out, "Write SVGs here instead of next to the inputs");

    std::string write_dir;
    auto* list = app.add_subcommand("list-scenarios", "List the scenario catalog");
    list->add_option("--write-configs", write_dir, "Dump every run as a commented config file under this directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << "run with --help for usage\n";
        return kExitUsage;
    }
    if (*seed_opt)
        g.seed = seed;

    if (*run)
        return cmd_run(g, target, out, err);
    if (*fitc)
        return cmd_fit(fit, out, err);
    if (*plot)
        return cmd_plot(csvs, plot_out, out, err);
    return cmd_list(write_dir, out);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    return run_cli(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

} // namespace tbtcp::cli
