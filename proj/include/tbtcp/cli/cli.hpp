#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tbtcp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;        // bad flags, config parse errors, unknown scenario, bad CSV
inline constexpr int kExitSimulation = 3;   // the simulation itself failed

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct ManifestEntry {
    std::string path;   // relative to the output directory
    std::uint64_t bytes = 0;
    std::uint64_t fnv1a = 0;
};

struct RunManifest {
    std::string target;   // scenario name or config path
    bool from_config = false;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool fast = false;
    std::vector<ManifestEntry> files;
};

/// Stable JSON: fixed key order, no timestamps.
std::string to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CsvTable {
    std::vector<std::string> header;   // empty for a zero-byte file
    std::vector<std::vector<std::string>> rows;
};

/// Throws SchemaError on ragged rows or an unreadable file.
CsvTable read_csv(const std::string& path);

/// SVG for one report CSV, chosen by its header (or by `file_name` when the
/// file is empty). Throws SchemaError for an unknown or mismatched header.
std::string render_plot(const std::string& file_name, const CsvTable& table);

} // namespace tbtcp::cli
