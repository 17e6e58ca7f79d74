#pragma once

#include "cohort2d/cohort_matrix.hpp"

#include <span>
#include <string>
#include <vector>

namespace cohort2d {

double rmse(std::span<const double> actuals, std::span<const double> predictions);
double mae(std::span<const double> actuals, std::span<const double> predictions);

/// Symmetric MAPE in percent: mean of 200|a - p| / (|a| + |p|), a pair with
/// a == p == 0 contributes 0. Always within [0, 200].
double smape(std::span<const double> actuals, std::span<const double> predictions);

/// sMAPE contribution of a single pair.
double smape_term(double actual, double predicted);

/// One scored forecast cell.
struct ErrorRecord {
	CohortMonth prediction_month;
	CohortMonth cohort;
	int u = 0;
	int horizon = 1;
	double actual = 0.0;
	double predicted = 0.0;
	std::string model_name;
};

enum class GroupBy { Horizon, PredictionMonth, Cohort, Model };
enum class Metric { Rmse, Mae, Smape };

std::string_view to_string(Metric metric);

/// Per-group metric. `dispersion` and `median` are over per-record
/// contributions: |error| for MAE and RMSE, the sMAPE term for sMAPE.
struct AggregateRow {
	std::string key;
	double value = 0.0;
	std::size_t count = 0;
	double dispersion = 0.0; // population standard deviation
	double median = 0.0;
};

/// Rows are ordered by key (numerically for horizons).
std::vector<AggregateRow> aggregate(std::span<const ErrorRecord> records, GroupBy group_by, Metric metric);

/// Metric and spread over a flat set of records.
AggregateRow summarize(std::span<const ErrorRecord> records, Metric metric, std::string key = {});

} // namespace cohort2d
