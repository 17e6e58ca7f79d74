#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cohort2d {

/// Calendar month a cohort was attributed to. Arithmetic is in whole months.
struct CohortMonth {
	int year = 1970;
	int month = 1; // 1..12

	static std::optional<CohortMonth> parse(std::string_view text); // "YYYY-MM"
	static CohortMonth from_index(int index);

	/// Months since year 0; differences of indices are month distances.
	int index() const noexcept { return year * 12 + (month - 1); }
	std::string to_string() const;

	CohortMonth operator+(int months) const { return from_index(index() + months); }
	CohortMonth operator-(int months) const { return from_index(index() - months); }
	friend int operator-(const CohortMonth &a, const CohortMonth &b) { return a.index() - b.index(); }

	auto operator<=>(const CohortMonth &) const = default;
};

enum class CellStatus { Known, Unknown };

/// One long-format observation: revenue of `cohort` in its u-th month since the event.
struct Record {
	CohortMonth cohort;
	int u = 0;
	double value = 0.0;
};

struct LoadOptions {
	std::optional<CohortMonth> prediction_month; // default: latest event month + 1
	std::optional<std::size_t> horizon_count;    // default: max u + 1
	std::optional<CohortMonth> last_cohort;      // extend rows past the last observed cohort
	bool max_scale = false;
};

/// Cohort-by-horizon grid ("run-off triangle") tied to a prediction month.
///
/// Row t is cohort first_cohort + t, column u is months since the event. A
/// cell is known iff its event month cohort(t) + u lies strictly before the
/// prediction month; known cells always hold a value and unknown cells never
/// do. The constructor enforces this, so every instance satisfies the
/// staircase shape. Instances are immutable.
class CohortMatrix {
public:
	CohortMatrix(CohortMonth first_cohort, std::size_t cohort_count, std::size_t horizon_count,
	             CohortMonth prediction_month, std::vector<std::optional<double>> values,
	             double scale_factor = 1.0);

	/// Zero-row matrix; the next advance adds `prediction_month` as its first cohort.
	static CohortMatrix empty(std::size_t horizon_count, CohortMonth prediction_month);

	std::size_t cohort_count() const noexcept { return cohort_count_; }
	std::size_t horizon_count() const noexcept { return horizon_count_; }
	CohortMonth first_cohort() const noexcept { return first_cohort_; }
	CohortMonth cohort(std::size_t t) const { return first_cohort_ + static_cast<int>(t); }
	std::vector<CohortMonth> cohorts() const;
	CohortMonth prediction_month() const noexcept { return prediction_month_; }

	/// Divisor applied at ingestion (1 when unscaled); multiply to recover currency units.
	double scale_factor() const noexcept { return scale_factor_; }

	bool is_known(std::size_t t, std::size_t u) const noexcept {
		return cohort(t).index() + static_cast<int>(u) < prediction_month_.index();
	}
	std::optional<double> value(std::size_t t, std::size_t u) const;
	std::optional<std::size_t> row_of(CohortMonth cohort) const noexcept;
	std::size_t known_count() const noexcept;

	const std::vector<std::optional<double>> &values() const noexcept { return values_; }

	bool operator==(const CohortMatrix &) const = default;

private:
	CohortMonth first_cohort_;
	std::size_t cohort_count_;
	std::size_t horizon_count_;
	CohortMonth prediction_month_;
	std::vector<std::optional<double>> values_; // row-major, cohort_count x horizon_count
	double scale_factor_;
};

CellStatus cell_status(const CohortMatrix &m, std::size_t t, std::size_t u);

struct ColumnSeries {
	std::vector<double> known;              // rows 0..known.size()-1
	std::vector<std::size_t> unknown_rows;  // ascending, directly after the known prefix
};

ColumnSeries column_series(const CohortMatrix &m, std::size_t u);

CohortMatrix load_records(std::span<const Record> rows, const LoadOptions &options = {});

/// Adds the diagonal that becomes known when the prediction month steps forward
/// by one, plus the u = 0 cell of the newly elapsed cohort.
CohortMatrix advance_prediction_month(const CohortMatrix &m, std::span<const Record> new_rows);

/// Copy with every value divided by the largest known value (scale_factor records the divisor).
CohortMatrix max_scaled(const CohortMatrix &m);

/// Copy restricted to the first `horizon_count` columns.
CohortMatrix truncate_columns(const CohortMatrix &m, std::size_t horizon_count);

std::vector<Record> known_records(const CohortMatrix &m);

// CSV formats: long `cohort_month,months_since_event,value` and wide
// `cohort_month,u0..u{U-1}` with empty fields for unknown cells.
std::vector<Record> parse_long_csv(std::span<const std::string> lines);
std::string to_long_csv(const CohortMatrix &m);
std::string to_wide_csv(const CohortMatrix &m);
CohortMatrix parse_wide_csv(std::span<const std::string> lines, const LoadOptions &options = {});
CohortMatrix read_values_csv(const std::string &path, const LoadOptions &options = {});

/// Per-cohort real-valued features (the X_k regressors of the 2D model).
class CohortCovariates {
public:
	CohortCovariates() = default;
	CohortCovariates(std::vector<std::string> names, std::map<CohortMonth, std::vector<double>> rows);

	const std::vector<std::string> &names() const noexcept { return names_; }
	std::size_t feature_count() const noexcept { return names_.size(); }
	bool empty() const noexcept { return rows_.empty(); }
	bool has(CohortMonth cohort) const { return rows_.contains(cohort); }
	const std::vector<double> &row(CohortMonth cohort) const;
	std::optional<std::size_t> index_of(std::string_view name) const;
	const std::map<CohortMonth, std::vector<double>> &rows() const noexcept { return rows_; }

	/// Projection onto `names`, in that order. Unknown names raise CovariateMissing.
	CohortCovariates select(std::span<const std::string> names) const;

	/// Throws CovariateMissing unless every cohort of `m` has a row.
	void require_cover(const CohortMatrix &m) const;

	bool operator==(const CohortCovariates &) const = default;

private:
	std::vector<std::string> names_;
	std::map<CohortMonth, std::vector<double>> rows_;
};

CohortCovariates parse_covariates_csv(std::span<const std::string> lines);
CohortCovariates read_covariates_csv(const std::string &path);
std::string to_covariates_csv(const CohortCovariates &cov);

} // namespace cohort2d
