#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cohort2d::csv {

// Minimal CSV helpers. Fields are comma separated with no quoting; every
// file format in this project is numeric or YYYY-MM dates plus plain names.

std::vector<std::string> split(std::string_view line);

std::string trim(std::string_view s);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

/// Shortest representation that parses back to the identical double.
std::string format_double(double value);

/// Reads all non-empty lines; throws Error{IoFailure} when the file cannot be opened.
std::vector<std::string> read_lines(const std::string &path);

/// Writes the whole buffer; throws Error{IoFailure} on failure.
void write_file(const std::string &path, const std::string &content);

} // namespace cohort2d::csv
