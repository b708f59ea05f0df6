#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace graphrl {

/// Shortest round-trip decimal form of a double. Every file the library
/// writes goes through this, so reruns produce byte-identical output.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line);
double parse_double_field(const std::string& field, const std::string& context);
std::int64_t parse_int_field(const std::string& field, const std::string& context);

/// Accepts integer epoch seconds or ISO-8601 ("2023-01-31T08:00:00",
/// space separator and trailing 'Z' allowed). Returns epoch seconds (UTC).
std::int64_t parse_timestamp(const std::string& field);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace graphrl
