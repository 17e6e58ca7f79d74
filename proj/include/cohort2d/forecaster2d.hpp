#pragma once

#include "cohort2d/arimax.hpp"
#include "cohort2d/baselines.hpp"
#include "cohort2d/cohort_matrix.hpp"
#include "cohort2d/filled_matrix.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cohort2d {

struct Forecast2DConfig {
	/// Columns to fill; unset means every column of the input matrix.
	std::optional<std::size_t> horizon_count;
	arimax::EstimationConfig estimation;
	std::vector<std::string> covariate_names;
	FallbackPolicy fallback;
	/// Regress each column on the completed previous column (observed + predicted).
	bool include_prev_column = true;
	/// Adds the cell's event month as a linear calendar-time regressor.
	bool include_calendar_trend = false;

	void validate() const;
};

/// Completes the unknown region column by column.
///
/// Column u is modelled along the cohort axis as an ARIMAX series whose
/// regressors are the same row's value in column u - 1 and the selected
/// cohort covariates. The order is chosen by AIC per column, all unknown rows
/// of the column are forecast in one multi-step call, and the finished column
/// feeds the next one. Column 0 has no predecessor, so its unknown cells (a
/// cohort without a first month yet) use the fallback policy, as does any
/// column too short for every order in the grid.
///
/// Each column is fit on values divided by the largest magnitude of the
/// column and its predecessor so that AIC comparisons do not depend on the
/// currency unit. Negative predictions are raised to zero.
///
/// Runtime is linear in the column count for a fixed row count and order grid.
FilledMatrix fill_matrix(const CohortMatrix &m, const CohortCovariates &cov, const Forecast2DConfig &cfg);

/// Regressor rows for `rows` of column u: previous-column value first (when
/// enabled), then covariates in `covariate_names` order, then the calendar
/// trend (when enabled).
Eigen::MatrixXd build_exog_column(const FilledMatrix &working, std::size_t u, std::span<const std::size_t> rows,
                                  const CohortCovariates &cov, const Forecast2DConfig &cfg);

} // namespace cohort2d
