#include "cohort2d/cohort_matrix.hpp"

#include "cohort2d/csv.hpp"
#include "cohort2d/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <utility>

namespace cohort2d {

namespace {

std::string cell_name(CohortMonth cohort, long long u) {
	return "(" + cohort.to_string() + ", u=" + std::to_string(u) + ")";
}

void validate_value(const Record &r) {
	if (r.u < 0) {
		throw Error(ErrorCode::MalformedRow, "negative months_since_event at " + cell_name(r.cohort, r.u));
	}
	if (!std::isfinite(r.value)) {
		throw Error(ErrorCode::MalformedRow, "non-finite value at " + cell_name(r.cohort, r.u));
	}
	if (r.value < 0.0) {
		throw Error(ErrorCode::NegativeValue, "negative value at " + cell_name(r.cohort, r.u));
	}
}

} // namespace

std::optional<CohortMonth> CohortMonth::parse(std::string_view text) {
	const std::string s = csv::trim(text);
	if (s.size() != 7 || s[4] != '-') {
		return std::nullopt;
	}
	const auto year = csv::parse_int(std::string_view(s).substr(0, 4));
	const auto month = csv::parse_int(std::string_view(s).substr(5, 2));
	if (!year || !month || *month < 1 || *month > 12 || *year < 0) {
		return std::nullopt;
	}
	return CohortMonth{static_cast<int>(*year), static_cast<int>(*month)};
}

CohortMonth CohortMonth::from_index(int index) {
	const int year = index >= 0 ? index / 12 : (index - 11) / 12;
	return CohortMonth{year, index - year * 12 + 1};
}

std::string CohortMonth::to_string() const {
	char buf[16];
	std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
	return buf;
}

CohortMatrix::CohortMatrix(CohortMonth first_cohort, std::size_t cohort_count, std::size_t horizon_count,
                           CohortMonth prediction_month, std::vector<std::optional<double>> values,
                           double scale_factor)
    : first_cohort_(first_cohort), cohort_count_(cohort_count), horizon_count_(horizon_count),
      prediction_month_(prediction_month), values_(std::move(values)), scale_factor_(scale_factor) {
	if (horizon_count_ == 0) {
		throw Error(ErrorCode::MalformedRow, "horizon count must be at least 1");
	}
	if (values_.size() != cohort_count_ * horizon_count_) {
		throw Error(ErrorCode::DimensionMismatch, "value grid does not match cohort_count x horizon_count");
	}
	if (!(scale_factor_ > 0.0) || !std::isfinite(scale_factor_)) {
		throw Error(ErrorCode::MalformedRow, "scale factor must be positive and finite");
	}
	for (std::size_t t = 0; t < cohort_count_; ++t) {
		for (std::size_t u = 0; u < horizon_count_; ++u) {
			const auto &v = values_[t * horizon_count_ + u];
			if (is_known(t, u) && !v) {
				throw Error(ErrorCode::StaircaseGap, "known cell " + cell_name(cohort(t), u) + " has no value");
			}
			if (!is_known(t, u) && v) {
				throw Error(ErrorCode::MalformedRow,
				            "cell " + cell_name(cohort(t), u) + " holds a value but is not yet known as of " +
				                prediction_month_.to_string());
			}
			if (v && !std::isfinite(*v)) {
				throw Error(ErrorCode::MalformedRow, "non-finite value at " + cell_name(cohort(t), u));
			}
			if (v && *v < 0.0) {
				throw Error(ErrorCode::NegativeValue, "negative value at " + cell_name(cohort(t), u));
			}
		}
	}
}

CohortMatrix CohortMatrix::empty(std::size_t horizon_count, CohortMonth prediction_month) {
	return CohortMatrix(prediction_month, 0, horizon_count, prediction_month, {});
}

std::vector<CohortMonth> CohortMatrix::cohorts() const {
	std::vector<CohortMonth> out;
	out.reserve(cohort_count_);
	for (std::size_t t = 0; t < cohort_count_; ++t) {
		out.push_back(cohort(t));
	}
	return out;
}

std::optional<double> CohortMatrix::value(std::size_t t, std::size_t u) const {
	if (t >= cohort_count_ || u >= horizon_count_) {
		throw Error(ErrorCode::IndexOutOfRange, "cell (" + std::to_string(t) + ", " + std::to_string(u) + ") out of range");
	}
	return values_[t * horizon_count_ + u];
}

std::optional<std::size_t> CohortMatrix::row_of(CohortMonth c) const noexcept {
	const int offset = c - first_cohort_;
	if (offset < 0 || static_cast<std::size_t>(offset) >= cohort_count_) {
		return std::nullopt;
	}
	return static_cast<std::size_t>(offset);
}

std::size_t CohortMatrix::known_count() const noexcept {
	return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](const auto &v) { return v.has_value(); }));
}

CellStatus cell_status(const CohortMatrix &m, std::size_t t, std::size_t u) {
	if (t >= m.cohort_count() || u >= m.horizon_count()) {
		throw Error(ErrorCode::IndexOutOfRange, "cell (" + std::to_string(t) + ", " + std::to_string(u) + ") out of range");
	}
	return m.is_known(t, u) ? CellStatus::Known : CellStatus::Unknown;
}

ColumnSeries column_series(const CohortMatrix &m, std::size_t u) {
	if (u >= m.horizon_count()) {
		throw Error(ErrorCode::IndexOutOfRange, "column " + std::to_string(u) + " out of range");
	}
	ColumnSeries out;
	for (std::size_t t = 0; t < m.cohort_count(); ++t) {
		if (const auto v = m.value(t, u)) {
			out.known.push_back(*v);
		} else {
			out.unknown_rows.push_back(t);
		}
	}
	return out;
}

CohortMatrix load_records(std::span<const Record> rows, const LoadOptions &options) {
	if (rows.empty()) {
		if (options.prediction_month && options.horizon_count) {
			return CohortMatrix::empty(*options.horizon_count, *options.prediction_month);
		}
		throw Error(ErrorCode::MalformedRow, "no records to load");
	}
	CohortMonth first = rows.front().cohort;
	CohortMonth last = rows.front().cohort;
	int max_u = 0;
	int latest_event = rows.front().cohort.index();
	for (const auto &r : rows) {
		validate_value(r);
		first = std::min(first, r.cohort);
		last = std::max(last, r.cohort);
		max_u = std::max(max_u, r.u);
		latest_event = std::max(latest_event, r.cohort.index() + r.u);
	}
	if (options.last_cohort) {
		if (*options.last_cohort < last) {
			throw Error(ErrorCode::MalformedRow, "last_cohort " + options.last_cohort->to_string() +
			                                         " precedes observed cohort " + last.to_string());
		}
		last = *options.last_cohort;
	}
	const std::size_t horizon = options.horizon_count.value_or(static_cast<std::size_t>(max_u) + 1);
	const CohortMonth prediction = options.prediction_month.value_or(CohortMonth::from_index(latest_event + 1));
	const std::size_t count = static_cast<std::size_t>(last - first) + 1;

	std::vector<std::optional<double>> values(count * horizon);
	for (const auto &r : rows) {
		if (static_cast<std::size_t>(r.u) >= horizon) {
			throw Error(ErrorCode::MalformedRow, "months_since_event beyond horizon at " + cell_name(r.cohort, r.u));
		}
		auto &slot = values[static_cast<std::size_t>(r.cohort - first) * horizon + static_cast<std::size_t>(r.u)];
		if (slot) {
			throw Error(ErrorCode::DuplicateCell, "duplicate cell " + cell_name(r.cohort, r.u));
		}
		if (r.cohort.index() + r.u >= prediction.index()) {
			throw Error(ErrorCode::MalformedRow, "value supplied for " + cell_name(r.cohort, r.u) +
			                                         " which is unknown as of " + prediction.to_string());
		}
		slot = r.value;
	}
	for (std::size_t t = 0; t < count; ++t) {
		for (std::size_t u = 0; u < horizon; ++u) {
			const CohortMonth c = first + static_cast<int>(t);
			if (c.index() + static_cast<int>(u) < prediction.index() && !values[t * horizon + u]) {
				throw Error(ErrorCode::StaircaseGap, "missing known cell " + cell_name(c, static_cast<long long>(u)));
			}
		}
	}
	CohortMatrix m(first, count, horizon, prediction, std::move(values));
	return options.max_scale ? max_scaled(m) : m;
}

CohortMatrix advance_prediction_month(const CohortMatrix &m, std::span<const Record> new_rows) {
	const CohortMonth now = m.prediction_month();
	const std::size_t horizon = m.horizon_count();
	const CohortMonth first = m.cohort_count() == 0 ? now : m.first_cohort();
	if (m.cohort_count() > 0 && (first + static_cast<int>(m.cohort_count())) < now) {
		throw Error(ErrorCode::MalformedRow, "matrix rows end before " + now.to_string() +
		                                         "; cannot add a non-contiguous cohort");
	}
	const std::size_t count = std::max(m.cohort_count(), static_cast<std::size_t>(now - first) + 1);

	std::vector<std::optional<double>> values(count * horizon);
	for (std::size_t t = 0; t < m.cohort_count(); ++t) {
		for (std::size_t u = 0; u < horizon; ++u) {
			values[t * horizon + u] = m.values()[t * horizon + u];
		}
	}
	std::set<std::pair<int, int>> seen;
	for (const auto &r : new_rows) {
		validate_value(r);
		if (!seen.emplace(r.cohort.index(), r.u).second) {
			throw Error(ErrorCode::DuplicateCell, "duplicate cell " + cell_name(r.cohort, r.u));
		}
		const int offset = r.cohort - first;
		if (offset < 0 || static_cast<std::size_t>(offset) >= count || static_cast<std::size_t>(r.u) >= horizon) {
			throw Error(ErrorCode::MalformedRow, "cell " + cell_name(r.cohort, r.u) + " outside the matrix");
		}
		auto &slot = values[static_cast<std::size_t>(offset) * horizon + static_cast<std::size_t>(r.u)];
		const int event = r.cohort.index() + r.u;
		if (event < now.index()) {
			if (slot && *slot != r.value) {
				throw Error(ErrorCode::ConflictingValue, "value for " + cell_name(r.cohort, r.u) +
				                                             " disagrees with the known cell");
			}
			continue;
		}
		if (event > now.index()) {
			throw Error(ErrorCode::MalformedRow, "cell " + cell_name(r.cohort, r.u) + " is not on the new diagonal");
		}
		slot = r.value;
	}
	for (std::size_t t = 0; t < count; ++t) {
		const int u = now - (first + static_cast<int>(t));
		if (u >= 0 && static_cast<std::size_t>(u) < horizon && !values[t * horizon + static_cast<std::size_t>(u)]) {
			throw Error(ErrorCode::MissingDiagonalCell,
			            "missing diagonal cell " + cell_name(first + static_cast<int>(t), u));
		}
	}
	return CohortMatrix(first, count, horizon, now + 1, std::move(values), m.scale_factor());
}

CohortMatrix max_scaled(const CohortMatrix &m) {
	double peak = 0.0;
	for (const auto &v : m.values()) {
		if (v) {
			peak = std::max(peak, *v);
		}
	}
	if (peak <= 0.0) {
		return m;
	}
	auto values = m.values();
	for (auto &v : values) {
		if (v) {
			*v /= peak;
		}
	}
	return CohortMatrix(m.first_cohort(), m.cohort_count(), m.horizon_count(), m.prediction_month(),
	                    std::move(values), m.scale_factor() * peak);
}

CohortMatrix truncate_columns(const CohortMatrix &m, std::size_t horizon_count) {
	if (horizon_count == 0 || horizon_count > m.horizon_count()) {
		throw Error(ErrorCode::IndexOutOfRange, "cannot truncate to " + std::to_string(horizon_count) + " columns");
	}
	std::vector<std::optional<double>> values;
	values.reserve(m.cohort_count() * horizon_count);
	for (std::size_t t = 0; t < m.cohort_count(); ++t) {
		for (std::size_t u = 0; u < horizon_count; ++u) {
			values.push_back(m.values()[t * m.horizon_count() + u]);
		}
	}
	return CohortMatrix(m.first_cohort(), m.cohort_count(), horizon_count, m.prediction_month(), std::move(values),
	                    m.scale_factor());
}

std::vector<Record> known_records(const CohortMatrix &m) {
	std::vector<Record> out;
	for (std::size_t t = 0; t < m.cohort_count(); ++t) {
		for (std::size_t u = 0; u < m.horizon_count(); ++u) {
			if (const auto v = m.values()[t * m.horizon_count() + u]) {
				out.push_back(Record{m.cohort(t), static_cast<int>(u), *v});
			}
		}
	}
	return out;
}

std::vector<Record> parse_long_csv(std::span<const std::string> lines) {
	if (lines.empty()) {
		throw Error(ErrorCode::MalformedRow, "values CSV is empty; header required");
	}
	const auto header = csv::split(lines.front());
	if (header != std::vector<std::string>{"cohort_month", "months_since_event", "value"}) {
		throw Error(ErrorCode::MalformedRow, "values CSV header must be cohort_month,months_since_event,value");
	}
	std::vector<Record> out;
	out.reserve(lines.size() - 1);
	for (std::size_t i = 1; i < lines.size(); ++i) {
		const auto fields = csv::split(lines[i]);
		const auto where = " on line " + std::to_string(i + 1);
		if (fields.size() != 3) {
			throw Error(ErrorCode::MalformedRow, "expected 3 fields" + where);
		}
		const auto cohort = CohortMonth::parse(fields[0]);
		const auto u = csv::parse_int(fields[1]);
		const auto value = csv::parse_double(fields[2]);
		if (!cohort || !u || !value || *u < 0 || *u > 100000) {
			throw Error(ErrorCode::MalformedRow, "unparseable row '" + lines[i] + "'" + where);
		}
		Record r{*cohort, static_cast<int>(*u), *value};
		validate_value(r);
		out.push_back(r);
	}
	return out;
}

std::string to_long_csv(const CohortMatrix &m) {
	std::string out = "cohort_month,months_since_event,value\n";
	for (const auto &r : known_records(m)) {
		out += r.cohort.to_string() + "," + std::to_string(r.u) + "," + csv::format_double(r.value) + "\n";
	}
	return out;
}

std::string to_wide_csv(const CohortMatrix &m) {
	std::string out = "cohort_month";
	for (std::size_t u = 0; u < m.horizon_count(); ++u) {
		out += ",u" + std::to_string(u);
	}
	out += "\n";
	for (std::size_t t = 0; t < m.cohort_count(); ++t) {
		out += m.cohort(t).to_string();
		for (std::size_t u = 0; u < m.horizon_count(); ++u) {
			out += ",";
			if (const auto v = m.values()[t * m.horizon_count() + u]) {
				out += csv::format_double(*v);
			}
		}
		out += "\n";
	}
	return out;
}

CohortMatrix parse_wide_csv(std::span<const std::string> lines, const LoadOptions &options) {
	if (lines.empty()) {
		throw Error(ErrorCode::MalformedRow, "wide CSV is empty; header required");
	}
	const auto header = csv::split(lines.front());
	if (header.size() < 2 || header.front() != "cohort_month") {
		throw Error(ErrorCode::MalformedRow, "wide CSV header must start with cohort_month,u0");
	}
	for (std::size_t j = 1; j < header.size(); ++j) {
		if (header[j] != "u" + std::to_string(j - 1)) {
			throw Error(ErrorCode::MalformedRow, "unexpected wide CSV column '" + header[j] + "'");
		}
	}
	std::vector<Record> records;
	std::optional<CohortMonth> last;
	for (std::size_t i = 1; i < lines.size(); ++i) {
		const auto fields = csv::split(lines[i]);
		const auto cohort = CohortMonth::parse(fields.front());
		if (fields.size() != header.size() || !cohort) {
			throw Error(ErrorCode::MalformedRow, "malformed wide CSV line " + std::to_string(i + 1));
		}
		last = last ? std::max(*last, *cohort) : *cohort;
		for (std::size_t j = 1; j < fields.size(); ++j) {
			if (fields[j].empty()) {
				continue;
			}
			const auto v = csv::parse_double(fields[j]);
			if (!v) {
				throw Error(ErrorCode::MalformedRow, "unparseable value '" + fields[j] + "' on line " + std::to_string(i + 1));
			}
			records.push_back(Record{*cohort, static_cast<int>(j - 1), *v});
		}
	}
	LoadOptions opts = options;
	if (!opts.horizon_count) {
		opts.horizon_count = header.size() - 1;
	}
	if (!opts.last_cohort && last) {
		opts.last_cohort = last;
	}
	return load_records(records, opts);
}

CohortMatrix read_values_csv(const std::string &path, const LoadOptions &options) {
	const auto lines = csv::read_lines(path);
	const auto records = parse_long_csv(lines);
	return load_records(records, options);
}

CohortCovariates::CohortCovariates(std::vector<std::string> names, std::map<CohortMonth, std::vector<double>> rows)
    : names_(std::move(names)), rows_(std::move(rows)) {
	std::set<std::string> unique(names_.begin(), names_.end());
	if (unique.size() != names_.size()) {
		throw Error(ErrorCode::InvalidCovariates, "duplicate covariate names");
	}
	for (const auto &[cohort, values] : rows_) {
		if (values.size() != names_.size()) {
			throw Error(ErrorCode::InvalidCovariates, "covariate row for " + cohort.to_string() + " has " +
			                                              std::to_string(values.size()) + " values, expected " +
			                                              std::to_string(names_.size()));
		}
		for (double v : values) {
			if (!std::isfinite(v)) {
				throw Error(ErrorCode::InvalidCovariates, "non-finite covariate for " + cohort.to_string());
			}
		}
	}
}

const std::vector<double> &CohortCovariates::row(CohortMonth cohort) const {
	const auto it = rows_.find(cohort);
	if (it == rows_.end()) {
		throw Error(ErrorCode::CovariateMissing, "no covariates for cohort " + cohort.to_string());
	}
	return it->second;
}

std::optional<std::size_t> CohortCovariates::index_of(std::string_view name) const {
	const auto it = std::find(names_.begin(), names_.end(), name);
	if (it == names_.end()) {
		return std::nullopt;
	}
	return static_cast<std::size_t>(it - names_.begin());
}

CohortCovariates CohortCovariates::select(std::span<const std::string> names) const {
	std::vector<std::size_t> idx;
	for (const auto &name : names) {
		const auto i = index_of(name);
		if (!i) {
			throw Error(ErrorCode::CovariateMissing, "unknown covariate '" + name + "'");
		}
		idx.push_back(*i);
	}
	std::map<CohortMonth, std::vector<double>> rows;
	for (const auto &[cohort, values] : rows_) {
		auto &out = rows[cohort];
		for (std::size_t i : idx) {
			out.push_back(values[i]);
		}
	}
	return CohortCovariates(std::vector<std::string>(names.begin(), names.end()), std::move(rows));
}

void CohortCovariates::require_cover(const CohortMatrix &m) const {
	for (std::size_t t = 0; t < m.cohort_count(); ++t) {
		if (!has(m.cohort(t))) {
			throw Error(ErrorCode::CovariateMissing, "no covariates for cohort " + m.cohort(t).to_string());
		}
	}
}

CohortCovariates parse_covariates_csv(std::span<const std::string> lines) {
	if (lines.empty()) {
		throw Error(ErrorCode::InvalidCovariates, "covariates CSV is empty; header required");
	}
	auto header = csv::split(lines.front());
	if (header.empty() || header.front() != "cohort_month") {
		throw Error(ErrorCode::InvalidCovariates, "covariates CSV header must start with cohort_month");
	}
	std::vector<std::string> names(header.begin() + 1, header.end());
	std::map<CohortMonth, std::vector<double>> rows;
	for (std::size_t i = 1; i < lines.size(); ++i) {
		const auto fields = csv::split(lines[i]);
		const auto cohort = CohortMonth::parse(fields.front());
		if (fields.size() != header.size() || !cohort) {
			throw Error(ErrorCode::InvalidCovariates, "malformed covariates line " + std::to_string(i + 1));
		}
		std::vector<double> values;
		for (std::size_t j = 1; j < fields.size(); ++j) {
			const auto v = csv::parse_double(fields[j]);
			if (!v) {
				throw Error(ErrorCode::InvalidCovariates, "unparseable covariate '" + fields[j] + "' on line " +
				                                              std::to_string(i + 1));
			}
			values.push_back(*v);
		}
		if (!rows.emplace(*cohort, std::move(values)).second) {
			throw Error(ErrorCode::InvalidCovariates, "duplicate covariate row for " + cohort->to_string());
		}
	}
	return CohortCovariates(std::move(names), std::move(rows));
}

CohortCovariates read_covariates_csv(const std::string &path) {
	return parse_covariates_csv(csv::read_lines(path));
}

std::string to_covariates_csv(const CohortCovariates &cov) {
	std::string out = "cohort_month";
	for (const auto &name : cov.names()) {
		out += "," + name;
	}
	out += "\n";
	for (const auto &[cohort, values] : cov.rows()) {
		out += cohort.to_string();
		for (double v : values) {
			out += "," + csv::format_double(v);
		}
		out += "\n";
	}
	return out;
}

} // namespace cohort2d
