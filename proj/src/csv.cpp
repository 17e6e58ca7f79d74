#include "cohort2d/csv.hpp"

#include "cohort2d/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cohort2d::csv {

std::vector<std::string> split(std::string_view line) {
	std::vector<std::string> fields;
	std::size_t start = 0;
	while (true) {
		const auto pos = line.find(',', start);
		if (pos == std::string_view::npos) {
			fields.emplace_back(trim(line.substr(start)));
			break;
		}
		fields.emplace_back(trim(line.substr(start, pos - start)));
		start = pos + 1;
	}
	return fields;
}

std::string trim(std::string_view s) {
	const auto first = s.find_first_not_of(" \t\r\n");
	if (first == std::string_view::npos) {
		return {};
	}
	const auto last = s.find_last_not_of(" \t\r\n");
	return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_double(std::string_view s) {
	if (s.empty()) {
		return std::nullopt;
	}
	if (s.front() == '+') {
		s.remove_prefix(1);
	}
	double value = 0.0;
	const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
	if (ec != std::errc{} || ptr != s.data() + s.size()) {
		return std::nullopt;
	}
	return value;
}

std::optional<long long> parse_int(std::string_view s) {
	if (s.empty()) {
		return std::nullopt;
	}
	long long value = 0;
	const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
	if (ec != std::errc{} || ptr != s.data() + s.size()) {
		return std::nullopt;
	}
	return value;
}

std::string format_double(double value) {
	if (std::isnan(value)) {
		return "nan";
	}
	if (std::isinf(value)) {
		return value > 0 ? "inf" : "-inf";
	}
	char buf[64];
	const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
	return std::string(buf, ptr);
}

std::vector<std::string> read_lines(const std::string &path) {
	std::ifstream in(path);
	if (!in) {
		throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for reading");
	}
	std::vector<std::string> lines;
	std::string line;
	while (std::getline(in, line)) {
		if (!trim(line).empty()) {
			lines.push_back(line);
		}
	}
	return lines;
}

void write_file(const std::string &path, const std::string &content) {
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out) {
		throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
	}
	out << content;
	if (!out) {
		throw Error(ErrorCode::IoFailure, "write to '" + path + "' failed");
	}
}

} // namespace cohort2d::csv
