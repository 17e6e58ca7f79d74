#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace cohort2d::arimax {

struct ModelOrder {
	int p = 0; // autoregressive lags
	int d = 0; // differences
	int q = 0; // moving-average lags

	/// p + q == 0: regression with mean plus exogenous terms only.
	bool is_regression_only() const noexcept { return p + q == 0; }
	std::string to_string() const;

	auto operator<=>(const ModelOrder &) const = default;
};

/// Parameters of y_t = mu + sum phi_i y_{t-i} - sum theta_j e_{t-j} + beta' x_t + e_t
/// on the d-times differenced series (x differenced alongside y).
struct ArimaxFit {
	ModelOrder order;
	double mu = 0.0;
	Eigen::VectorXd phi;
	Eigen::VectorXd theta;
	Eigen::VectorXd beta;
	double sse = 0.0;
	double sigma2 = 0.0;
	int n_obs = 0; // residual terms entering the sum of squares
	double aic = 0.0;
	bool converged = false;
	int iterations = 0;
	std::string diagnostic;

	int parameter_count() const noexcept {
		return 1 + order.p + order.q + static_cast<int>(beta.size());
	}
};

struct EstimationConfig {
	int max_iterations = 500;
	double gradient_tolerance = 1e-8;
	std::vector<ModelOrder> order_grid = default_order_grid();
	bool enforce_stationarity = true;
	double min_obs_per_param = 3.0;

	/// p in {0,1,2}, d in {0,1}, q in {0,1}.
	static std::vector<ModelOrder> default_order_grid();
	void validate() const;
};

inline constexpr double kSigma2Floor = 1e-12;

Eigen::VectorXd difference(const Eigen::VectorXd &series, int d);
Eigen::MatrixXd difference_rows(const Eigen::MatrixXd &rows, int d);
Eigen::VectorXd undifference(const Eigen::VectorXd &diff_forecasts, const Eigen::VectorXd &last_levels);

/// Packed parameter layout: [mu, phi_1..phi_p, theta_1..theta_q, beta_1..beta_K].
struct CssValue {
	double sse = 0.0;
	Eigen::VectorXd gradient;
};

/// Conditional sum of squares with zero pre-sample residuals; residuals run
/// over t = p..n-1 (0-based). The gradient comes from differentiating the
/// same recursion.
CssValue css_objective(const Eigen::VectorXd &params, const Eigen::VectorXd &y, const Eigen::MatrixXd &X,
                       const ModelOrder &order);

/// Residual series e_t (zeros for t < p) under the given packed parameters.
Eigen::VectorXd css_residuals(const Eigen::VectorXd &params, const Eigen::VectorXd &y, const Eigen::MatrixXd &X,
                              const ModelOrder &order);

Eigen::VectorXd pack(const ArimaxFit &fit);

/// Observations required after differencing for `order` with `exog_count` regressors.
bool has_sufficient_data(std::size_t n, std::size_t exog_count, const ModelOrder &order, const EstimationConfig &cfg);

ArimaxFit fit(const Eigen::VectorXd &y, const Eigen::MatrixXd &X, const ModelOrder &order,
              const EstimationConfig &cfg = {});

/// Iterated h-step forecast with future innovations at zero, returned in level
/// space. `x_history` holds the regressors aligned with `y_history`; it may be
/// empty when the model has no regressors, or when d == 0 and q == 0.
/// `x_future` needs h rows when the model has regressors.
Eigen::VectorXd forecast(const ArimaxFit &fit, const Eigen::VectorXd &y_history, const Eigen::MatrixXd &x_history,
                         const Eigen::MatrixXd &x_future, int h);

struct OrderSelection {
	ArimaxFit best;
	std::vector<ArimaxFit> candidates; // every feasible fit, grid order
};

/// Minimum-AIC order over the feasible part of the grid. Ties go to the
/// smallest p + q + d, then the smallest q.
OrderSelection select_order(const Eigen::VectorXd &y, const Eigen::MatrixXd &X, const EstimationConfig &cfg = {});

/// Partial autocorrelations in (-1, 1) to coefficients of a stable lag
/// polynomial, with the Jacobian d coef / d pacf.
struct PacfMap {
	Eigen::VectorXd coef;
	Eigen::MatrixXd jacobian;
};
PacfMap pacf_to_coef(const Eigen::VectorXd &pacf);

/// Inverse of pacf_to_coef; returns false when the polynomial is not stable.
bool coef_to_pacf(const Eigen::VectorXd &coef, Eigen::VectorXd &pacf);

} // namespace cohort2d::arimax
