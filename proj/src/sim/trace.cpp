#include "tbtcp/sim/trace.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace tbtcp::sim {

CsvSink::CsvSink(const std::string& path, std::initializer_list<std::string_view> header)
    : out_(path, std::ios::out | std::ios::trunc | std::ios::binary)
{
    if (!out_)
        throw std::runtime_error("cannot open " + path);
    bool first = true;
    for (std::string_view h : header) {
        if (!first)
            out_ << ',';
        out_ << h;
        first = false;
    }
    out_ << '\n';
}

void CsvSink::row(std::initializer_list<std::string_view> fields)
{
    bool first = true;
    for (std::string_view f : fields) {
        if (!first)
            out_ << ',';
        out_ << f;
        first = false;
    }
    out_ << '\n';
    ++rows_;
}

std::string fixed(double v, int precision)
{
    std::string s = fmt::format("{:.{}f}", v, precision);
    // Avoid "-0.000" so that sign noise never changes a file hash.
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos)
        s.erase(0, 1);
    return s;
}

} // namespace tbtcp::sim
