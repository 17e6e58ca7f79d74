#include "cohort2d/forecaster2d.hpp"

#include "cohort2d/error.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cohort2d {

namespace {

std::vector<std::string> regressor_names(const Forecast2DConfig &cfg) {
	std::vector<std::string> names;
	if (cfg.include_prev_column) {
		names.emplace_back("prev_column");
	}
	names.insert(names.end(), cfg.covariate_names.begin(), cfg.covariate_names.end());
	if (cfg.include_calendar_trend) {
		names.emplace_back("calendar_trend");
	}
	return names;
}

void use_fallback(FilledMatrix &working, std::size_t u, const Forecast2DConfig &cfg, const std::string &why) {
	fill_column_fallback(working, u, cfg.fallback);
	working.diagnostics().back().message = why;
}

void fit_column(FilledMatrix &working, std::size_t u, const ColumnSeries &series, const CohortCovariates &cov,
                const Forecast2DConfig &cfg) {
	const std::size_t known = series.known.size();
	std::vector<std::size_t> known_rows(known);
	std::iota(known_rows.begin(), known_rows.end(), std::size_t{0});
	const auto &future_rows = series.unknown_rows;
	const int h = static_cast<int>(future_rows.size());

	Eigen::MatrixXd x_known = build_exog_column(working, u, known_rows, cov, cfg);
	Eigen::MatrixXd x_future = build_exog_column(working, u, future_rows, cov, cfg);
	Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(series.known.data(), static_cast<Eigen::Index>(known));

	double scale = y.cwiseAbs().maxCoeff();
	if (cfg.include_prev_column) {
		scale = std::max({scale, x_known.col(0).cwiseAbs().maxCoeff(),
		                  h > 0 ? x_future.col(0).cwiseAbs().maxCoeff() : 0.0});
	}
	if (!(scale > 0.0)) {
		scale = 1.0;
	}
	y /= scale;
	if (cfg.include_prev_column) {
		x_known.col(0) /= scale;
		x_future.col(0) /= scale;
	}

	const auto names = regressor_names(cfg);
	const auto kept = detail::independent_columns(Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(known), 1), x_known);
	std::vector<std::string> dropped;
	for (Eigen::Index j = 0; j < x_known.cols(); ++j) {
		if (std::find(kept.begin(), kept.end(), j) == kept.end()) {
			dropped.push_back(names[static_cast<std::size_t>(j)]);
		}
	}
	Eigen::MatrixXd xk(static_cast<Eigen::Index>(known), static_cast<Eigen::Index>(kept.size()));
	Eigen::MatrixXd xf(h, static_cast<Eigen::Index>(kept.size()));
	for (std::size_t j = 0; j < kept.size(); ++j) {
		xk.col(static_cast<Eigen::Index>(j)) = x_known.col(kept[j]);
		xf.col(static_cast<Eigen::Index>(j)) = x_future.col(kept[j]);
	}

	arimax::OrderSelection selection;
	Eigen::VectorXd preds;
	try {
		selection = arimax::select_order(y, xk, cfg.estimation);
		preds = arimax::forecast(selection.best, y, xk, xf, h) * scale;
	} catch (const Error &e) {
		switch (e.code()) {
		case ErrorCode::InsufficientData:
		case ErrorCode::NoFeasibleOrder:
		case ErrorCode::NonFiniteValue:
		case ErrorCode::SingularDesign:
		case ErrorCode::InsufficientHistory:
			use_fallback(working, u, cfg, std::string(to_string(e.code())) + ": " + e.what());
			working.diagnostics().back().dropped_features = dropped;
			return;
		default:
			throw;
		}
	}
	if (!preds.allFinite()) {
		use_fallback(working, u, cfg, "non-finite forecast");
		return;
	}

	ColumnDiagnostics diag;
	diag.u = u;
	diag.method = "arimax";
	diag.order = selection.best.order;
	diag.converged = selection.best.converged;
	diag.message = selection.best.diagnostic;
	diag.dropped_features = std::move(dropped);
	for (int i = 0; i < h; ++i) {
		double v = preds(i);
		if (v < 0.0) {
			v = 0.0;
			++diag.floored;
		}
		working.set_prediction(future_rows[static_cast<std::size_t>(i)], u, v);
		diag.predicted_rows.push_back(future_rows[static_cast<std::size_t>(i)]);
	}
	working.diagnostics().push_back(std::move(diag));
}

} // namespace

void Forecast2DConfig::validate() const {
	if (horizon_count && *horizon_count == 0) {
		throw Error(ErrorCode::InvalidConfig, "horizon count must be at least 1");
	}
	estimation.validate();
	fallback.validate();
}

Eigen::MatrixXd build_exog_column(const FilledMatrix &working, std::size_t u, std::span<const std::size_t> rows,
                                  const CohortCovariates &cov, const Forecast2DConfig &cfg) {
	if (cfg.include_prev_column && u == 0) {
		throw Error(ErrorCode::PreviousColumnIncomplete, "column 0 has no previous column");
	}
	std::vector<std::size_t> cov_idx;
	for (const auto &name : cfg.covariate_names) {
		const auto i = cov.index_of(name);
		if (!i) {
			throw Error(ErrorCode::CovariateMissing, "unknown covariate '" + name + "'");
		}
		cov_idx.push_back(*i);
	}
	const Eigen::Index cols = (cfg.include_prev_column ? 1 : 0) + static_cast<Eigen::Index>(cov_idx.size()) +
	                          (cfg.include_calendar_trend ? 1 : 0);
	const CohortMatrix &base = working.base();
	Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), cols);
	for (std::size_t r = 0; r < rows.size(); ++r) {
		const std::size_t t = rows[r];
		const auto row = static_cast<Eigen::Index>(r);
		Eigen::Index c = 0;
		if (cfg.include_prev_column) {
			X(row, c++) = working.value(t, u - 1);
		}
		if (!cov_idx.empty()) {
			const auto &features = cov.row(base.cohort(t));
			for (std::size_t i : cov_idx) {
				X(row, c++) = features[i];
			}
		}
		if (cfg.include_calendar_trend) {
			X(row, c++) = static_cast<double>(base.cohort(t).index() + static_cast<int>(u) - base.prediction_month().index());
		}
	}
	return X;
}

FilledMatrix fill_matrix(const CohortMatrix &m, const CohortCovariates &cov, const Forecast2DConfig &cfg) {
	cfg.validate();
	if (cfg.horizon_count && *cfg.horizon_count > m.horizon_count()) {
		throw Error(ErrorCode::InvalidConfig, "horizon count " + std::to_string(*cfg.horizon_count) +
		                                          " exceeds the matrix's " + std::to_string(m.horizon_count()) +
		                                          " columns");
	}
	const CohortMatrix base = cfg.horizon_count ? truncate_columns(m, *cfg.horizon_count) : m;
	if (!cfg.covariate_names.empty()) {
		cov.select(cfg.covariate_names).require_cover(base);
	}

	FilledMatrix working(base);
	for (std::size_t u = 0; u < base.horizon_count() && !working.is_complete(); ++u) {
		const ColumnSeries series = column_series(base, u);
		if (series.unknown_rows.empty()) {
			continue;
		}
		if (series.known.empty()) {
			throw Error(ErrorCode::ColumnUnfittable, "column " + std::to_string(u) + " has no known cells");
		}
		if (u == 0) {
			use_fallback(working, u, cfg, "first column has no predecessor");
			continue;
		}
		fit_column(working, u, series, cov, cfg);
	}
	return working;
}

} // namespace cohort2d
