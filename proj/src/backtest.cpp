#include "cohort2d/backtest.hpp"

#include "cohort2d/csv.hpp"
#include "cohort2d/error.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <set>
#include <tuple>

namespace cohort2d {

namespace {

std::string fmt(double v) {
	return csv::format_double(v);
}

std::vector<ErrorRecord> records_of(const BacktestReport &report, const std::string &model) {
	std::vector<ErrorRecord> out;
	for (const auto &r : report.records) {
		if (r.model_name == model) {
			out.push_back(r);
		}
	}
	return out;
}

std::string grouped_csv(const BacktestReport &report, GroupBy group_by, const std::string &key_name) {
	std::string out = "model," + key_name + ",count,mae,rmse,smape_mean,smape_std,smape_median\n";
	for (const auto &model : report.model_names) {
		const auto records = records_of(report, model);
		if (records.empty()) {
			continue;
		}
		const auto mae_rows = aggregate(records, group_by, Metric::Mae);
		const auto rmse_rows = aggregate(records, group_by, Metric::Rmse);
		const auto smape_rows = aggregate(records, group_by, Metric::Smape);
		for (std::size_t i = 0; i < mae_rows.size(); ++i) {
			out += model + "," + mae_rows[i].key + "," + std::to_string(mae_rows[i].count) + "," +
			       fmt(mae_rows[i].value) + "," + fmt(rmse_rows[i].value) + "," + fmt(smape_rows[i].value) + "," +
			       fmt(smape_rows[i].dispersion) + "," + fmt(smape_rows[i].median) + "\n";
		}
	}
	return out;
}

} // namespace

std::string_view to_string(ModelKind kind) {
	switch (kind) {
	case ModelKind::TwoD: return "2d";
	case ModelKind::Naive: return "naive";
	case ModelKind::Drift: return "drift";
	case ModelKind::Linear: return "linear";
	case ModelKind::Imported: return "imported";
	}
	return "unknown";
}

std::vector<ImportedPrediction> parse_imported_csv(std::span<const std::string> lines) {
	if (lines.empty() ||
	    csv::split(lines.front()) != std::vector<std::string>{"cohort_month", "u", "value", "model_name"}) {
		throw Error(ErrorCode::MalformedRow, "imported predictions header must be cohort_month,u,value,model_name");
	}
	std::vector<ImportedPrediction> out;
	for (std::size_t i = 1; i < lines.size(); ++i) {
		const auto f = csv::split(lines[i]);
		if (f.size() != 4) {
			throw Error(ErrorCode::MalformedRow, "expected 4 fields on line " + std::to_string(i + 1));
		}
		const auto cohort = CohortMonth::parse(f[0]);
		const auto u = csv::parse_int(f[1]);
		const auto value = csv::parse_double(f[2]);
		if (!cohort || !u || *u < 0 || !value || !std::isfinite(*value) || f[3].empty()) {
			throw Error(ErrorCode::MalformedRow, "unparseable imported prediction on line " + std::to_string(i + 1));
		}
		out.push_back(ImportedPrediction{*cohort, static_cast<int>(*u), *value, f[3]});
	}
	return out;
}

std::vector<ImportedPrediction> read_imported_csv(const std::string &path) {
	return parse_imported_csv(csv::read_lines(path));
}

ModelSpec ModelSpec::two_d_model(std::string name, Forecast2DConfig cfg) {
	ModelSpec spec;
	spec.name = std::move(name);
	spec.kind = ModelKind::TwoD;
	spec.two_d = std::move(cfg);
	return spec;
}

ModelSpec ModelSpec::baseline(std::string name, ModelKind kind, std::vector<std::string> features) {
	ModelSpec spec;
	spec.name = std::move(name);
	spec.kind = kind;
	spec.feature_names = std::move(features);
	return spec;
}

std::vector<ModelSpec> imported_models(const std::vector<ImportedPrediction> &rows, CohortMonth prediction_month) {
	std::map<std::string, ModelSpec> by_name;
	for (const auto &r : rows) {
		auto &spec = by_name[r.model_name];
		spec.name = r.model_name;
		spec.kind = ModelKind::Imported;
		spec.imported_month = prediction_month;
		spec.imported.push_back(r);
	}
	std::vector<ModelSpec> out;
	for (auto &[name, spec] : by_name) {
		out.push_back(std::move(spec));
	}
	return out;
}

void BacktestPlan::validate() const {
	const auto fail = [](const std::string &msg) { throw Error(ErrorCode::InvalidPlan, msg); };
	if (end_month < start_month) {
		fail("empty backtest range " + start_month.to_string() + " .. " + end_month.to_string());
	}
	if (truth.cohort_count() < 2) {
		fail("ground truth needs at least two cohorts");
	}
	const CohortMonth earliest = truth.first_cohort() + 2;
	if (start_month < earliest) {
		fail("start month " + start_month.to_string() + " precedes " + earliest.to_string() +
		     ", the first month with two cohorts of first-month data");
	}
	const CohortMonth last_cohort = truth.cohort(truth.cohort_count() - 1);
	const CohortMonth coverage = std::min(truth.prediction_month(), last_cohort + 1);
	if (coverage < end_month) {
		fail("end month " + end_month.to_string() + " is beyond ground-truth coverage " + coverage.to_string());
	}
	if (horizon_count == 0 || horizon_count > truth.horizon_count()) {
		fail("horizon count must be between 1 and the truth matrix's " + std::to_string(truth.horizon_count()) +
		     " columns");
	}
	if (models.empty()) {
		fail("no models to evaluate");
	}
	std::set<std::string> names;
	for (const auto &m : models) {
		if (m.name.empty() || !names.insert(m.name).second) {
			fail("model names must be non-empty and unique ('" + m.name + "')");
		}
		if (m.kind == ModelKind::Imported && !m.imported_month) {
			fail("imported model '" + m.name + "' has no prediction month");
		}
	}
}

std::string Diagnostic::to_line() const {
	return "level=" + level + " code=" + code + " msg=" + message;
}

CohortMatrix masked_matrix(const CohortMatrix &truth, CohortMonth prediction_month, std::size_t horizon_count) {
	const CohortMonth first = truth.first_cohort();
	const CohortMonth last = std::min(truth.cohort(truth.cohort_count() - 1), prediction_month - 1);
	if (last < first) {
		return CohortMatrix::empty(horizon_count, prediction_month);
	}
	const auto count = static_cast<std::size_t>(last - first) + 1;
	std::vector<std::optional<double>> values(count * horizon_count);
	for (std::size_t t = 0; t < count; ++t) {
		for (std::size_t u = 0; u < horizon_count; ++u) {
			if ((first + static_cast<int>(t)).index() + static_cast<int>(u) < prediction_month.index()) {
				values[t * horizon_count + u] = truth.value(t, u);
			}
		}
	}
	return CohortMatrix(first, count, horizon_count, prediction_month, std::move(values), truth.scale_factor());
}

FilledMatrix run_model(const ModelSpec &spec, const CohortMatrix &masked, const CohortCovariates &cov) {
	switch (spec.kind) {
	case ModelKind::TwoD: return fill_matrix(masked, cov, spec.two_d);
	case ModelKind::Naive: return naive_fill(masked);
	case ModelKind::Drift: return drift_fill(masked);
	case ModelKind::Linear: return linear_fill(masked, cov, spec.feature_names);
	case ModelKind::Imported: {
		FilledMatrix out(masked);
		for (const auto &p : spec.imported) {
			const auto t = masked.row_of(p.cohort);
			if (!t || static_cast<std::size_t>(p.u) >= masked.horizon_count()) {
				continue;
			}
			if (out.provenance(*t, static_cast<std::size_t>(p.u)) == Provenance::Pending) {
				out.set_prediction(*t, static_cast<std::size_t>(p.u), p.value);
			}
		}
		return out;
	}
	}
	throw Error(ErrorCode::InvalidConfig, "unknown model kind");
}

BacktestReport run(const BacktestPlan &plan) {
	plan.validate();
	BacktestReport report;
	report.scale_factor = plan.truth.scale_factor();
	for (const auto &m : plan.models) {
		report.model_names.push_back(m.name);
	}
	std::sort(report.model_names.begin(), report.model_names.end());

	for (CohortMonth month = plan.start_month; month <= plan.end_month; month = month + 1) {
		report.prediction_months.push_back(month);
		const CohortMatrix masked = masked_matrix(plan.truth, month, plan.horizon_count);
		for (const auto &spec : plan.models) {
			if (spec.kind == ModelKind::Imported && spec.imported_month != month) {
				continue;
			}
			std::optional<FilledMatrix> filled;
			try {
				filled.emplace(run_model(spec, masked, plan.covariates));
			} catch (const std::exception &e) {
				++report.model_failures;
				report.diagnostics.push_back(
				    {"warn", "ModelFailure", spec.name + " at " + month.to_string() + ": " + e.what()});
				continue;
			}
			for (std::size_t t = 0; t < masked.cohort_count(); ++t) {
				for (std::size_t u = 0; u < masked.horizon_count(); ++u) {
					const auto prov = filled->provenance(t, u);
					if (prov == Provenance::Observed) {
						continue;
					}
					if (prov == Provenance::Pending) {
						++report.missing_predictions;
						continue;
					}
					const auto truth_row = plan.truth.row_of(masked.cohort(t));
					if (!truth_row || !plan.truth.is_known(*truth_row, u)) {
						++report.truth_gaps;
						continue;
					}
					report.records.push_back(ErrorRecord{month, masked.cohort(t), static_cast<int>(u),
					                                     filled->horizon(t, u), *plan.truth.value(*truth_row, u),
					                                     filled->value(t, u), spec.name});
				}
			}
		}
	}
	if (report.truth_gaps > 0) {
		report.diagnostics.push_back({"info", "TruthGap", std::to_string(report.truth_gaps) +
		                                                      " predicted cells had no ground truth and were not scored"});
	}
	if (report.missing_predictions > 0) {
		report.diagnostics.push_back({"info", "MissingPrediction", std::to_string(report.missing_predictions) +
		                                                               " unknown cells had no prediction"});
	}
	std::sort(report.records.begin(), report.records.end(), [](const ErrorRecord &a, const ErrorRecord &b) {
		return std::tie(a.prediction_month, a.model_name, a.cohort, a.u) <
		       std::tie(b.prediction_month, b.model_name, b.cohort, b.u);
	});
	return report;
}

std::vector<ModelSummary> summarize_models(const BacktestReport &report) {
	std::vector<ModelSummary> out;
	for (const auto &model : report.model_names) {
		ModelSummary s;
		s.model = model;
		const auto records = records_of(report, model);
		s.count = records.size();
		if (!records.empty()) {
			s.mae = summarize(records, Metric::Mae, model);
			s.rmse = summarize(records, Metric::Rmse, model);
			s.smape = summarize(records, Metric::Smape, model);
		}
		out.push_back(std::move(s));
	}
	return out;
}

std::vector<AggregateRow> newest_cohort_slice(const BacktestReport &report) {
	std::vector<ErrorRecord> slice;
	for (const auto &r : report.records) {
		if (r.cohort == r.prediction_month - 1 && r.u <= 12) {
			slice.push_back(r);
		}
	}
	if (slice.empty()) {
		throw Error(ErrorCode::EmptySlice, "no records for the newest cohort of any prediction month");
	}
	return aggregate(slice, GroupBy::Model, Metric::Smape);
}

double pct_error(double actual, double predicted) {
	if (actual == 0.0) {
		if (predicted == 0.0) {
			return 0.0;
		}
		return predicted > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
	}
	return 100.0 * (predicted - actual) / std::abs(actual);
}

int histogram_bin(double pct) {
	const double lower = -kHistogramWidth * kHistogramBins / 2.0;
	if (pct < lower) {
		return 0;
	}
	const double upper = -lower;
	if (pct >= upper) {
		return kHistogramBins + 1;
	}
	const int bin = static_cast<int>(std::floor((pct - lower) / kHistogramWidth));
	return 1 + std::clamp(bin, 0, kHistogramBins - 1);
}

void emit_report(const BacktestReport &report, const std::string &directory, const nlohmann::json &manifest_extra) {
	std::error_code ec;
	std::filesystem::create_directories(directory, ec);
	if (ec) {
		throw Error(ErrorCode::IoFailure, "cannot create report directory '" + directory + "': " + ec.message());
	}
	const auto path = [&](const char *name) { return (std::filesystem::path(directory) / name).string(); };

	std::string records = "prediction_month,cohort_month,u,horizon,model,actual,predicted,error,pct_error\n";
	for (const auto &r : report.records) {
		records += r.prediction_month.to_string() + "," + r.cohort.to_string() + "," + std::to_string(r.u) + "," +
		           std::to_string(r.horizon) + "," + r.model_name + "," + fmt(r.actual) + "," + fmt(r.predicted) + "," +
		           fmt(r.predicted - r.actual) + "," + fmt(pct_error(r.actual, r.predicted)) + "\n";
	}
	csv::write_file(path("records.csv"), records);

	std::string summary = "model,count,mae_mean,mae_std,rmse,rmse_std,smape_mean,smape_std,smape_median,status\n";
	for (const auto &s : summarize_models(report)) {
		if (s.count == 0) {
			summary += s.model + ",0,,,,,,,,no_data\n";
			continue;
		}
		summary += s.model + "," + std::to_string(s.count) + "," + fmt(s.mae.value) + "," + fmt(s.mae.dispersion) + "," +
		           fmt(s.rmse.value) + "," + fmt(s.rmse.dispersion) + "," + fmt(s.smape.value) + "," +
		           fmt(s.smape.dispersion) + "," + fmt(s.smape.median) + ",ok\n";
	}
	csv::write_file(path("summary.csv"), summary);

	csv::write_file(path("by_horizon.csv"), grouped_csv(report, GroupBy::Horizon, "horizon"));
	csv::write_file(path("by_prediction_month.csv"), grouped_csv(report, GroupBy::PredictionMonth, "prediction_month"));

	std::string histogram = "model,bin,lower,upper,count\n";
	for (const auto &model : report.model_names) {
		std::vector<std::size_t> counts(kHistogramBins + 2, 0);
		for (const auto &r : report.records) {
			if (r.model_name == model) {
				++counts[static_cast<std::size_t>(histogram_bin(pct_error(r.actual, r.predicted)))];
			}
		}
		for (int b = 0; b < kHistogramBins + 2; ++b) {
			const double lower = b == 0 ? -std::numeric_limits<double>::infinity()
			                            : -kHistogramWidth * kHistogramBins / 2.0 + (b - 1) * kHistogramWidth;
			const double upper = b == kHistogramBins + 1 ? std::numeric_limits<double>::infinity()
			                                             : -kHistogramWidth * kHistogramBins / 2.0 + b * kHistogramWidth;
			histogram += model + "," + std::to_string(b) + "," + fmt(lower) + "," + fmt(upper) + "," +
			             std::to_string(counts[static_cast<std::size_t>(b)]) + "\n";
		}
	}
	csv::write_file(path("error_histogram.csv"), histogram);

	std::string newest = "model,count,smape_mean,smape_std,smape_median,status\n";
	std::map<std::string, AggregateRow> slice;
	try {
		for (auto &row : newest_cohort_slice(report)) {
			slice.emplace(row.key, row);
		}
	} catch (const Error &e) {
		if (e.code() != ErrorCode::EmptySlice) {
			throw;
		}
	}
	for (const auto &model : report.model_names) {
		const auto it = slice.find(model);
		if (it == slice.end()) {
			newest += model + ",0,,,,no_data\n";
			continue;
		}
		newest += model + "," + std::to_string(it->second.count) + "," + fmt(it->second.value) + "," +
		          fmt(it->second.dispersion) + "," + fmt(it->second.median) + ",ok\n";
	}
	csv::write_file(path("newest_cohort.csv"), newest);

	nlohmann::json manifest = manifest_extra.is_object() ? manifest_extra : nlohmann::json::object();
	manifest["version"] = std::string(kVersion);
	manifest["models"] = report.model_names;
	std::vector<std::string> months;
	for (const auto &m : report.prediction_months) {
		months.push_back(m.to_string());
	}
	manifest["prediction_months"] = months;
	manifest["record_count"] = report.records.size();
	manifest["truth_gaps"] = report.truth_gaps;
	manifest["missing_predictions"] = report.missing_predictions;
	manifest["model_failures"] = report.model_failures;
	manifest["scaled"] = report.scale_factor != 1.0;
	manifest["scale_factor"] = report.scale_factor;
	manifest["smape_definition"] = "mean of 200*|a-p|/(|a|+|p|), 0 when a=p=0";
	std::vector<std::string> diagnostics;
	for (const auto &d : report.diagnostics) {
		diagnostics.push_back(d.to_line());
	}
	manifest["diagnostics"] = diagnostics;
	csv::write_file(path("manifest.json"), manifest.dump(2) + "\n");
}

} // namespace cohort2d
