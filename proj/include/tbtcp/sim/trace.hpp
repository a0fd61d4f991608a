#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>

namespace tbtcp::sim {

/// Append-only CSV writer. Numeric fields are fixed-precision decimal so that
/// identical runs produce byte-identical files.
class CsvSink {
public:
    CsvSink() = default;
    CsvSink(const std::string& path, std::initializer_list<std::string_view> header);

    bool is_open() const { return out_.is_open(); }
    std::uint64_t rows() const { return rows_; }

    /// Writes one row; fields must already be formatted.
    void row(std::initializer_list<std::string_view> fields);
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
    std::uint64_t rows_ = 0;
};

/// Fixed-precision decimal formatting used by all CSV emitters.
std::string fixed(double v, int precision = 3);

} // namespace tbtcp::sim
