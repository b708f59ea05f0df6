#include "graphrl/io_util.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "graphrl/errors.hpp"

namespace graphrl {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (const char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

double parse_double_field(const std::string& field, const std::string& context) {
    if (field.empty()) {
        throw ValidationError("empty field in " + context);
    }
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + field.size()) {
        throw ValidationError("cannot parse number '" + field + "' in " + context);
    }
    return v;
}

std::int64_t parse_int_field(const std::string& field, const std::string& context) {
    if (field.empty()) {
        throw ValidationError("empty field in " + context);
    }
    const char* begin = field.c_str();
    char* end = nullptr;
    const long long v = std::strtoll(begin, &end, 10);
    if (end != begin + field.size()) {
        throw ValidationError("cannot parse integer '" + field + "' in " + context);
    }
    return static_cast<std::int64_t>(v);
}

std::int64_t parse_timestamp(const std::string& field) {
    if (field.empty()) {
        throw ValidationError("empty timestamp field");
    }
    // Plain integer epoch seconds (optionally signed).
    bool integral = true;
    for (std::size_t i = 0; i < field.size(); ++i) {
        const char c = field[i];
        if (i == 0 && (c == '-' || c == '+')) continue;
        if (c < '0' || c > '9') {
            integral = false;
            break;
        }
    }
    if (integral) {
        return parse_int_field(field, "timestamp");
    }
    // ISO-8601, 'T' or space separated, optional trailing 'Z'.
    std::tm tm{};
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    char sep = 0;
    const int matched = std::sscanf(field.c_str(), "%d-%d-%d%c%d:%d:%d", &year, &month, &day,
                                    &sep, &hour, &minute, &second);
    if (matched != 7 || (sep != 'T' && sep != ' ')) {
        throw ValidationError("cannot parse timestamp '" + field +
                              "' (expected epoch seconds or ISO-8601)");
    }
    tm.tm_year = year - 1900;
    tm.tm_mon = month - 1;
    tm.tm_mday = day;
    tm.tm_hour = hour;
    tm.tm_min = minute;
    tm.tm_sec = second;
    const time_t t = timegm(&tm);
    return static_cast<std::int64_t>(t);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write file: " + path);
    }
    out << content;
    if (!out) {
        throw ValidationError("write failed: " + path);
    }
}

} // namespace graphrl
