#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wallmem {

std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

/// Shortest representation that round-trips; "inf" / "-inf" / "nan" otherwise.
std::string format_double(double v);

/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

}  // namespace wallmem
