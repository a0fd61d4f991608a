#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tbtcp/cli/cli.hpp"
#include "tbtcp/cli/svg.hpp"
#include "tbtcp/experiments/config.hpp"
#include "tbtcp/experiments/scenarios.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tbtcp;
using namespace tbtcp::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("tbtcp_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text)
{
    std::ofstream(p, std::ios::binary | std::ios::trunc) << text;
}

const char* const kSmallConfig = R"(# two DCTCP flows
[experiment]
name = small
duration_ms = 30

[network]
bottleneck_gbps = 10

[transport]
algorithm = dctcp

[marking]
policy = threshold
k_packets = 10

[flows]
count = 2
rtt_us = 80, 120
size_bytes = 1000000, unbounded

[metrics]
trace_queue = true
)";

} // namespace

TEST_SUITE("fit")
{
    TEST_CASE("table mode prints one row per scaling factor")
    {
        const Result r = invoke({"fit", "--table1"});
        CHECK(r.code == kExitOk);
        std::istringstream lines(r.out);
        std::string line;
        int rows = 0;
        while (std::getline(lines, line))
            ++rows;
        CHECK(rows == 5);
        CHECK(r.out.find("published_err") != std::string::npos);
    }

    TEST_CASE("single fit near the published probability")
    {
        const Result r =
            invoke({"fit", "--bdp-kb", "180", "--l-kb", "138", "--tmin-kb", "138", "--tmax-kb", "550", "--r", "1"});
        REQUIRE(r.code == kExitOk);
        const auto at = r.out.find("p_max = ");
        REQUIRE(at != std::string::npos);
        const double p = std::stod(r.out.substr(at + 8));
        CHECK(p == doctest::Approx(0.7).epsilon(0.05 / 0.7));
    }

    TEST_CASE("invalid input exits 2")
    {
        CHECK(invoke({"fit", "--tmax-kb", "100", "--tmin-kb", "138"}).code == kExitUsage);
        CHECK(invoke({"fit", "--r", "0"}).code == kExitUsage);
        CHECK(invoke({"fit", "--bdp-kb", "lots"}).code == kExitUsage);
        CHECK(invoke({"fit", "--nonsense"}).code == kExitUsage);
        CHECK(invoke({}).code == kExitUsage);
    }
}

TEST_SUITE("run")
{
    TEST_CASE("unknown scenario lists the valid names")
    {
        const Result r = invoke({"run", "no-such-thing"});
        CHECK(r.code == kExitUsage);
        for (const std::string& n : experiments::scenario_names())
            CHECK(r.err.find(n) != std::string::npos);
    }

    TEST_CASE("config parse errors report the line")
    {
        const fs::path dir = scratch("bad");
        spit(dir / "bad.conf", "[experiment]\nname = x\nduration_ms = soon\n");
        const Result r = invoke({"run", (dir / "bad.conf").string(), "--out", (dir / "out").string()});
        CHECK(r.code == kExitUsage);
        CHECK(r.err.find("line 3") != std::string::npos);
        CHECK(r.err.find("duration_ms") != std::string::npos);
        fs::remove_all(dir);
    }

    TEST_CASE("config run writes reports and a stable manifest")
    {
        const fs::path dir = scratch("run");
        spit(dir / "small.conf", kSmallConfig);
        const Result a = invoke({"run", (dir / "small.conf").string(), "--out", (dir / "a").string(), "--seed", "9"});
        REQUIRE(a.code == kExitOk);
        const Result b = invoke({"--seed", "9", "--out", (dir / "b").string(), "run", (dir / "small.conf").string()});
        REQUIRE(b.code == kExitOk);
        const RunManifest ma = manifest_from_json(slurp(dir / "a" / "manifest.json"));
        const RunManifest mb = manifest_from_json(slurp(dir / "b" / "manifest.json"));
        CHECK(ma.from_config);
        CHECK(ma.seed == std::optional<std::uint64_t>(9));
        REQUIRE(ma.files.size() == mb.files.size());
        REQUIRE(ma.files.size() >= 4);
        for (std::size_t i = 0; i < ma.files.size(); ++i) {
            CHECK(ma.files[i].path == mb.files[i].path);
            CHECK(ma.files[i].fnv1a == mb.files[i].fnv1a);
            CHECK(ma.files[i].fnv1a == experiments::fnv1a(slurp(dir / "a" / ma.files[i].path)));
        }
        CHECK(fs::exists(dir / "a" / "fct.csv"));
        CHECK(to_json(manifest_from_json(to_json(ma))) == to_json(ma));
        fs::remove_all(dir);
    }

    TEST_CASE("named scenario at fast scale with a seed override")
    {
        const fs::path dir = scratch("sweep");
        const Result r = invoke({"run", "beta-sweep", "--fast", "--seed", "7", "--out", dir.string()});
        REQUIRE(r.code == kExitOk);
        std::istringstream summary(slurp(dir / "summary.csv"));
        std::string line;
        int rows = -1;
        while (std::getline(summary, line)) {
            if (rows >= 0)
                CHECK(line.find(",tbtcp,") != std::string::npos);
            ++rows;
        }
        CHECK(rows == 3);
        fs::remove_all(dir);
    }

    TEST_CASE("an unwritable output directory is not a usage error")
    {
        const fs::path dir = scratch("unwritable");
        spit(dir / "small.conf", kSmallConfig);
        spit(dir / "occupied", "a file, not a directory");
        const Result r = invoke({"run", (dir / "small.conf").string(), "--out", (dir / "occupied").string()});
        CHECK(r.code == kExitSimulation);
        fs::remove_all(dir);
    }
}

TEST_SUITE("plot")
{
    TEST_CASE("empty csv renders a no-data chart")
    {
        const fs::path dir = scratch("plot_empty");
        spit(dir / "queue_trace.csv", "");
        spit(dir / "fct.csv", "size_bytes,fct_us,algorithm\n");
        const Result r = invoke({"plot", (dir / "queue_trace.csv").string(), (dir / "fct.csv").string()});
        CHECK(r.code == kExitOk);
        CHECK(slurp(dir / "queue_trace.svg").find("no data") != std::string::npos);
        CHECK(slurp(dir / "fct.svg").find("no data") != std::string::npos);
        fs::remove_all(dir);
    }

    TEST_CASE("schema mismatch exits 2")
    {
        const fs::path dir = scratch("plot_bad");
        spit(dir / "x.csv", "a,b\n1,2\n");
        spit(dir / "fct.csv", "size_bytes,fct_us,algorithm\n1000,abc,tbtcp\n");
        spit(dir / "queue_cdf.csv", "name,depth,cdf\nrun,1\n");
        CHECK(invoke({"plot", (dir / "x.csv").string()}).code == kExitUsage);
        CHECK(invoke({"plot", (dir / "fct.csv").string()}).code == kExitUsage);
        CHECK(invoke({"plot", (dir / "queue_cdf.csv").string()}).code == kExitUsage);
        CHECK(invoke({"plot", (dir / "missing.csv").string()}).code == kExitUsage);
        fs::remove_all(dir);
    }

    TEST_CASE("fct chart groups buckets per algorithm")
    {
        CsvTable t;
        t.header = {"size_bytes", "fct_us", "algorithm"};
        t.rows = {{"5000", "100.0", "tbtcp"}, {"2000000", "900.0", "tbtcp"}, {"5000", "120.0", "dctcp"}};
        const std::string svg = render_plot("fct.csv", t);
        CHECK(svg.find(">tbtcp<") != std::string::npos);
        CHECK(svg.find(">dctcp<") != std::string::npos);
        CHECK(svg.find("&gt;1MB") != std::string::npos);
        CHECK(svg.find("no data") == std::string::npos);
    }

    TEST_CASE("queue trace renders one series per run")
    {
        CsvTable t;
        t.header = {"name", "time_us", "queue_pkts", "event"};
        t.rows = {{"a", "0.0", "1", "sample"}, {"a", "100.0", "3", "sample"}, {"b", "0.0", "2", "enq"}};
        const std::string svg = render_plot("queue_trace.csv", t);
        std::size_t lines = 0;
        for (auto at = svg.find("<polyline"); at != std::string::npos; at = svg.find("<polyline", at + 1))
            ++lines;
        CHECK(lines == 2);
    }

    TEST_CASE("charts are deterministic text")
    {
        const std::vector<Series> s = {{"x", {{0, 0}, {1, 2}, {2, 1}}}};
        CHECK(line_chart({"t", "x", "y"}, s) == line_chart({"t", "x", "y"}, s));
        CHECK(line_chart({"t<&>", "", ""}, {}).find("t&lt;&amp;&gt;") != std::string::npos);
    }
}

TEST_SUITE("list-scenarios")
{
    TEST_CASE("lists every scenario and dumps parseable configs")
    {
        const fs::path dir = scratch("configs");
        const Result r = invoke({"list-scenarios", "--write-configs", dir.string()});
        REQUIRE(r.code == kExitOk);
        for (const std::string& n : experiments::scenario_names())
            CHECK(r.out.find(n) != std::string::npos);
        for (const experiments::Scenario& sc : experiments::named_scenarios(experiments::Scale::fast))
            for (const experiments::ExperimentConfig& c : sc.runs) {
                const fs::path p = dir / "fast" / (c.name + ".conf");
                REQUIRE(fs::exists(p));
                const std::string text = slurp(p);
                CHECK(text.rfind("# scenario " + sc.name, 0) == 0);
                CHECK(experiments::config_hash(experiments::parse_config_text(text)) == experiments::config_hash(c));
            }
        fs::remove_all(dir);
    }
}
