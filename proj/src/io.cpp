#include "valuation_lab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "valuation_lab/errors.hpp"

namespace vlab::io {

std::string fmt(double x) {
    if (std::isnan(x)) return {};
    if (x == 0.0) return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

std::vector<std::string_view> lines(std::string_view content) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= content.size()) {
        auto pos = content.find('\n', start);
        auto line = content.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    while (!out.empty() && out.back().find_first_not_of(" \t") == std::string_view::npos) out.pop_back();
    return out;
}

bool parse_double(std::string_view cell, double& out) {
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
    if (cell.empty()) return false;
    if (cell.front() == '+') cell.remove_prefix(1);
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return res.ec == std::errc{} && res.ptr == cell.data() + cell.size() && std::isfinite(out);
}

bool parse_int(std::string_view cell, int& out) {
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
    if (cell.empty()) return false;
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return res.ec == std::errc{} && res.ptr == cell.data() + cell.size();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

}  // namespace vlab::io
