#include "cohort2d/metrics.hpp"

#include "cohort2d/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cohort2d {

namespace {

void validate_lengths(std::span<const double> actuals, std::span<const double> predictions) {
	if (actuals.empty()) {
		throw Error(ErrorCode::EmptyInput, "metric needs at least one pair");
	}
	if (actuals.size() != predictions.size()) {
		throw Error(ErrorCode::LengthMismatch, "actuals and predictions differ in length");
	}
}

double contribution(const ErrorRecord &r, Metric metric) {
	switch (metric) {
	case Metric::Rmse:
	case Metric::Mae: return std::abs(r.actual - r.predicted);
	case Metric::Smape: return smape_term(r.actual, r.predicted);
	}
	return 0.0;
}

double median_of(std::vector<double> v) {
	std::sort(v.begin(), v.end());
	const std::size_t n = v.size();
	return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string group_key(const ErrorRecord &r, GroupBy group_by) {
	switch (group_by) {
	case GroupBy::Horizon: return std::to_string(r.horizon);
	case GroupBy::PredictionMonth: return r.prediction_month.to_string();
	case GroupBy::Cohort: return r.cohort.to_string();
	case GroupBy::Model: return r.model_name;
	}
	return {};
}

} // namespace

double rmse(std::span<const double> actuals, std::span<const double> predictions) {
	validate_lengths(actuals, predictions);
	double sum = 0.0;
	for (std::size_t i = 0; i < actuals.size(); ++i) {
		const double diff = actuals[i] - predictions[i];
		sum += diff * diff;
	}
	return std::sqrt(sum / static_cast<double>(actuals.size()));
}

double mae(std::span<const double> actuals, std::span<const double> predictions) {
	validate_lengths(actuals, predictions);
	double sum = 0.0;
	for (std::size_t i = 0; i < actuals.size(); ++i) {
		sum += std::abs(actuals[i] - predictions[i]);
	}
	return sum / static_cast<double>(actuals.size());
}

double smape_term(double actual, double predicted) {
	const double denom = std::abs(actual) + std::abs(predicted);
	if (denom == 0.0) {
		return 0.0;
	}
	return 200.0 * std::abs(actual - predicted) / denom;
}

double smape(std::span<const double> actuals, std::span<const double> predictions) {
	validate_lengths(actuals, predictions);
	double sum = 0.0;
	for (std::size_t i = 0; i < actuals.size(); ++i) {
		sum += smape_term(actuals[i], predictions[i]);
	}
	return sum / static_cast<double>(actuals.size());
}

std::string_view to_string(Metric metric) {
	switch (metric) {
	case Metric::Rmse: return "rmse";
	case Metric::Mae: return "mae";
	case Metric::Smape: return "smape";
	}
	return "unknown";
}

AggregateRow summarize(std::span<const ErrorRecord> records, Metric metric, std::string key) {
	if (records.empty()) {
		throw Error(ErrorCode::EmptyInput, "no records to summarize");
	}
	std::vector<double> contrib;
	contrib.reserve(records.size());
	for (const auto &r : records) {
		contrib.push_back(contribution(r, metric));
	}
	const double n = static_cast<double>(contrib.size());
	double mean = 0.0;
	double sq = 0.0;
	for (double c : contrib) {
		mean += c;
		sq += c * c;
	}
	mean /= n;
	double var = 0.0;
	for (double c : contrib) {
		var += (c - mean) * (c - mean);
	}
	var /= n;

	AggregateRow row;
	row.key = std::move(key);
	row.count = contrib.size();
	row.value = metric == Metric::Rmse ? std::sqrt(sq / n) : mean;
	row.dispersion = std::sqrt(var);
	row.median = median_of(std::move(contrib));
	return row;
}

std::vector<AggregateRow> aggregate(std::span<const ErrorRecord> records, GroupBy group_by, Metric metric) {
	if (records.empty()) {
		throw Error(ErrorCode::EmptyInput, "no records to aggregate");
	}
	// Horizons sort numerically; everything else sorts lexically, which is
	// chronological for YYYY-MM keys.
	std::map<std::pair<long long, std::string>, std::vector<ErrorRecord>> groups;
	for (const auto &r : records) {
		const long long order = group_by == GroupBy::Horizon ? r.horizon : 0;
		groups[{order, group_key(r, group_by)}].push_back(r);
	}
	std::vector<AggregateRow> out;
	out.reserve(groups.size());
	for (const auto &[key, members] : groups) {
		out.push_back(summarize(members, metric, key.second));
	}
	return out;
}

} // namespace cohort2d
