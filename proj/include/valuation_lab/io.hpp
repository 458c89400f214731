#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vlab::io {

/// Shortest round-trip decimal form; NaN becomes an empty string.
[[nodiscard]] std::string fmt(double x);

[[nodiscard]] std::vector<std::string_view> split_csv_line(std::string_view line);

/// Splits into lines, strips '\r', drops trailing blank lines.
[[nodiscard]] std::vector<std::string_view> lines(std::string_view content);

/// Parse a full decimal cell; returns false on any trailing garbage.
[[nodiscard]] bool parse_double(std::string_view cell, double& out);
[[nodiscard]] bool parse_int(std::string_view cell, int& out);

[[nodiscard]] std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace vlab::io
