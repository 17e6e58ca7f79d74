#pragma once

#include "cohort2d/baselines.hpp"
#include "cohort2d/cohort_matrix.hpp"
#include "cohort2d/filled_matrix.hpp"
#include "cohort2d/forecaster2d.hpp"
#include "cohort2d/metrics.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace cohort2d {

inline constexpr std::string_view kVersion = "0.1.0";

enum class ModelKind { TwoD, Naive, Drift, Linear, Imported };

std::string_view to_string(ModelKind kind);

/// A prediction produced outside this tool: `cohort_month,u,value,model_name`.
struct ImportedPrediction {
	CohortMonth cohort;
	int u = 0;
	double value = 0.0;
	std::string model_name;
};

std::vector<ImportedPrediction> parse_imported_csv(std::span<const std::string> lines);
std::vector<ImportedPrediction> read_imported_csv(const std::string &path);

struct ModelSpec {
	std::string name;
	ModelKind kind = ModelKind::TwoD;
	Forecast2DConfig two_d;                 // TwoD
	std::vector<std::string> feature_names; // Linear
	// Imported: predictions made as of `imported_month`; the model is scored at that month only.
	std::vector<ImportedPrediction> imported;
	std::optional<CohortMonth> imported_month;

	static ModelSpec two_d_model(std::string name, Forecast2DConfig cfg = {});
	static ModelSpec baseline(std::string name, ModelKind kind, std::vector<std::string> features = {});
};

/// One ModelSpec per distinct model_name in `rows`.
std::vector<ModelSpec> imported_models(const std::vector<ImportedPrediction> &rows, CohortMonth prediction_month);

struct BacktestPlan {
	CohortMatrix truth;
	CohortCovariates covariates;
	CohortMonth start_month;
	CohortMonth end_month; // inclusive
	std::vector<ModelSpec> models;
	std::size_t horizon_count = 12;

	/// Throws InvalidPlan for an empty or uncovered range, missing models or bad horizon.
	void validate() const;
};

struct Diagnostic {
	std::string level; // "warn" or "info"
	std::string code;
	std::string message;

	std::string to_line() const; // level=... code=... msg=...
};

struct BacktestReport {
	std::vector<ErrorRecord> records; // sorted by prediction month, model, cohort, u
	std::vector<std::string> model_names;
	std::vector<CohortMonth> prediction_months;
	std::size_t truth_gaps = 0;
	std::size_t missing_predictions = 0;
	std::size_t model_failures = 0;
	std::vector<Diagnostic> diagnostics;
	double scale_factor = 1.0;
};

/// Matrix as it looked at `prediction_month`: cohorts up to the previous
/// month, only cells whose event month has elapsed.
CohortMatrix masked_matrix(const CohortMatrix &truth, CohortMonth prediction_month, std::size_t horizon_count);

/// Runs one model on a masked matrix. Imported models only write the cells they supply.
FilledMatrix run_model(const ModelSpec &spec, const CohortMatrix &masked, const CohortCovariates &cov);

/// Rolling-origin evaluation over [start_month, end_month]. A model that
/// throws for one month loses that month's records; the run continues.
BacktestReport run(const BacktestPlan &plan);

struct ModelSummary {
	std::string model;
	std::size_t count = 0;
	AggregateRow mae;
	AggregateRow rmse;
	AggregateRow smape;
};

/// Table-style per-model summary over all records (count 0 when a model has none).
std::vector<ModelSummary> summarize_models(const BacktestReport &report);

/// Per-model sMAPE restricted to each prediction month's newest cohort (u <= 12).
/// Throws EmptySlice when no record qualifies.
std::vector<AggregateRow> newest_cohort_slice(const BacktestReport &report);

/// Edges of the relative-error histogram: 5%-wide bins over [-100, 100) plus
/// an underflow and an overflow bin.
inline constexpr int kHistogramBins = 40;
inline constexpr double kHistogramWidth = 5.0;
int histogram_bin(double pct_error); // 0 underflow, 1..40 regular, 41 overflow

/// 100 * (predicted - actual) / |actual|; 0 when both are 0, +-inf when only actual is.
double pct_error(double actual, double predicted);

/// Writes records.csv, summary.csv, by_horizon.csv, by_prediction_month.csv,
/// error_histogram.csv, newest_cohort.csv and manifest.json into `directory`.
void emit_report(const BacktestReport &report, const std::string &directory, const nlohmann::json &manifest_extra = {});

} // namespace cohort2d
