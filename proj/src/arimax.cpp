#include "cohort2d/arimax.hpp"

#include "cohort2d/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace cohort2d::arimax {

namespace {

// Largest partial autocorrelation magnitude treated as interior.
constexpr double kBoundaryPacf = 0.999;
// Starting values are pulled inside this radius so tanh^-1 stays finite.
constexpr double kInitPacfClip = 0.95;

bool all_finite(const Eigen::MatrixXd &m) {
	return m.allFinite();
}

double rms(const Eigen::VectorXd &v) {
	if (v.size() == 0) {
		return 1.0;
	}
	const double r = std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
	return r > 0.0 && std::isfinite(r) ? r : 1.0;
}

/// Least squares with column pivoting; collinear columns get a zero coefficient.
Eigen::VectorXd least_squares(const Eigen::MatrixXd &A, const Eigen::VectorXd &b) {
	Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
	return qr.solve(b);
}

int design_rank(const Eigen::MatrixXd &design) {
	Eigen::MatrixXd scaled = design;
	for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
		const double norm = scaled.col(j).norm();
		if (norm > 0.0) {
			scaled.col(j) /= norm;
		}
	}
	Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
	qr.setThreshold(1e-10);
	return static_cast<int>(qr.rank());
}

/// Shrinks `coef` towards zero until the lag polynomial is stable, then
/// returns its partial autocorrelations clipped into the interior.
Eigen::VectorXd stable_pacf(Eigen::VectorXd coef) {
	Eigen::VectorXd pacf;
	for (int attempt = 0; attempt < 20; ++attempt) {
		if (coef_to_pacf(coef, pacf)) {
			return pacf.cwiseMax(-kInitPacfClip).cwiseMin(kInitPacfClip);
		}
		coef *= 0.5;
	}
	return Eigen::VectorXd::Zero(coef.size());
}

/// Lagged-regressor design for y_t, t = start..n-1: [1, y_{t-1..t-p}, extra_{t-1..t-q}, X_t].
/// `extra_sign` multiplies the lagged extra columns.
Eigen::MatrixXd lag_design(const Eigen::VectorXd &y, const Eigen::VectorXd &extra, const Eigen::MatrixXd &X, int p,
                           int q, int start) {
	const int n = static_cast<int>(y.size());
	const int K = static_cast<int>(X.cols());
	Eigen::MatrixXd A(n - start, 1 + p + q + K);
	for (int t = start; t < n; ++t) {
		const int r = t - start;
		A(r, 0) = 1.0;
		for (int i = 1; i <= p; ++i) {
			A(r, i) = t - i >= 0 ? y(t - i) : 0.0;
		}
		for (int j = 1; j <= q; ++j) {
			A(r, p + j) = t - j >= 0 ? -extra(t - j) : 0.0;
		}
		for (int k = 0; k < K; ++k) {
			A(r, 1 + p + q + k) = X(t, k);
		}
	}
	return A;
}

/// Hannan-Rissanen start: long autoregression for residual proxies, then one
/// least-squares pass over all coefficients. With q == 0 this is the exact
/// conditional least-squares solution.
Eigen::VectorXd hannan_rissanen(const Eigen::VectorXd &y, const Eigen::MatrixXd &X, const ModelOrder &order) {
	const int n = static_cast<int>(y.size());
	const int K = static_cast<int>(X.cols());
	const int p = order.p;
	const int q = order.q;
	Eigen::VectorXd params = Eigen::VectorXd::Zero(1 + p + q + K);

	if (q == 0) {
		const Eigen::MatrixXd A = lag_design(y, Eigen::VectorXd(), X, p, 0, p);
		return least_squares(A, y.tail(n - p));
	}

	Eigen::VectorXd proxy = Eigen::VectorXd::Zero(n);
	const int long_order = std::min(std::max(p + q + 1, 2), (n - K - 1) / 3);
	if (long_order >= 1) {
		const Eigen::MatrixXd A = lag_design(y, Eigen::VectorXd(), X, long_order, 0, long_order);
		const Eigen::VectorXd coef = least_squares(A, y.tail(n - long_order));
		proxy.tail(n - long_order) = y.tail(n - long_order) - A * coef;
	}
	int start = std::max(p, long_order + q);
	if (n - start < 1 + p + q + K + 2) {
		start = std::max(p, q);
	}
	const Eigen::MatrixXd A = lag_design(y, proxy, X, p, q, start);
	params = least_squares(A, y.tail(n - start));
	if (!all_finite(params)) {
		params.setZero();
	}
	return params;
}

struct Reparam {
	ModelOrder order;
	int exog = 0;
	bool stationary = true;

	int size() const { return 1 + order.p + order.q + exog; }

	Eigen::VectorXd to_params(const Eigen::VectorXd &w, Eigen::MatrixXd *jac_ar = nullptr,
	                          Eigen::MatrixXd *jac_ma = nullptr) const {
		Eigen::VectorXd params = w;
		if (!stationary) {
			return params;
		}
		const auto map_block = [&](int offset, int len, Eigen::MatrixXd *jac) {
			if (len == 0) {
				return;
			}
			const Eigen::VectorXd r = w.segment(offset, len).array().tanh().matrix();
			const PacfMap m = pacf_to_coef(r);
			params.segment(offset, len) = m.coef;
			if (jac) {
				*jac = m.jacobian * (1.0 - r.array().square()).matrix().asDiagonal();
			}
		};
		map_block(1, order.p, jac_ar);
		map_block(1 + order.p, order.q, jac_ma);
		return params;
	}

	Eigen::VectorXd from_params(const Eigen::VectorXd &params) const {
		Eigen::VectorXd w = params;
		if (!stationary) {
			return w;
		}
		const auto map_block = [&](int offset, int len) {
			if (len == 0) {
				return;
			}
			const Eigen::VectorXd r = stable_pacf(params.segment(offset, len));
			w.segment(offset, len) = r.array().atanh().matrix();
		};
		map_block(1, order.p);
		map_block(1 + order.p, order.q);
		return w;
	}

	bool on_boundary(const Eigen::VectorXd &w) const {
		if (!stationary) {
			return false;
		}
		const int len = order.p + order.q;
		return len > 0 && (w.segment(1, len).array().tanh().abs() > kBoundaryPacf).any();
	}
};

struct Objective {
	const Eigen::VectorXd &y;
	const Eigen::MatrixXd &X;
	const Reparam &reparam;
	double scale; // 1 / residual count

	/// Returns +inf when the recursion diverges.
	double operator()(const Eigen::VectorXd &w, Eigen::VectorXd &grad) const {
		Eigen::MatrixXd jac_ar;
		Eigen::MatrixXd jac_ma;
		const Eigen::VectorXd params = reparam.to_params(w, &jac_ar, &jac_ma);
		CssValue v;
		try {
			v = css_objective(params, y, X, reparam.order);
		} catch (const Error &) {
			return std::numeric_limits<double>::infinity();
		}
		if (!std::isfinite(v.sse) || !all_finite(v.gradient)) {
			return std::numeric_limits<double>::infinity();
		}
		grad = v.gradient * scale;
		const int p = reparam.order.p;
		const int q = reparam.order.q;
		if (reparam.stationary && p > 0) {
			grad.segment(1, p) = jac_ar.transpose() * grad.segment(1, p);
		}
		if (reparam.stationary && q > 0) {
			grad.segment(1 + p, q) = jac_ma.transpose() * grad.segment(1 + p, q);
		}
		return v.sse * scale;
	}
};

struct MinimizeResult {
	Eigen::VectorXd w;
	double value = 0.0;
	double gradient_norm = 0.0;
	int iterations = 0;
	bool converged = false;
	bool stalled = false;
};

/// BFGS with Armijo backtracking. Stops on gradient norm, iteration budget,
/// or when no step along the steepest-descent direction decreases the objective.
MinimizeResult minimize_bfgs(const Objective &objective, Eigen::VectorXd w, int max_iterations, double tolerance) {
	const Eigen::Index n = w.size();
	Eigen::VectorXd g(n);
	double f = objective(w, g);
	if (!std::isfinite(f)) {
		throw Error(ErrorCode::NonFiniteValue, "objective is not finite at the starting point");
	}
	Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
	bool h_is_identity = true;
	MinimizeResult result;

	int it = 0;
	for (; it < max_iterations; ++it) {
		if (g.norm() < tolerance) {
			result.converged = true;
			break;
		}
		Eigen::VectorXd dir = -H * g;
		double slope = g.dot(dir);
		if (!(slope < 0.0)) {
			H.setIdentity();
			h_is_identity = true;
			dir = -g;
			slope = -g.squaredNorm();
		}
		double step = 1.0;
		bool accepted = false;
		Eigen::VectorXd w_new;
		Eigen::VectorXd g_new(n);
		double f_new = f;
		for (int ls = 0; ls < 60; ++ls) {
			w_new = w + step * dir;
			f_new = objective(w_new, g_new);
			if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
				accepted = true;
				break;
			}
			step *= 0.5;
		}
		if (!accepted) {
			if (!h_is_identity) {
				H.setIdentity();
				h_is_identity = true;
				continue;
			}
			result.stalled = true;
			break;
		}
		const Eigen::VectorXd s = w_new - w;
		const Eigen::VectorXd yv = g_new - g;
		const double sy = s.dot(yv);
		if (sy > 1e-12 * s.norm() * yv.norm()) {
			if (h_is_identity) {
				H *= sy / yv.squaredNorm();
			}
			const double rho = 1.0 / sy;
			const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
			H = (I - rho * s * yv.transpose()) * H * (I - rho * yv * s.transpose()) + rho * s * s.transpose();
			h_is_identity = false;
		}
		w = w_new;
		f = f_new;
		g = g_new;
	}
	result.w = w;
	result.value = f;
	result.gradient_norm = g.norm();
	result.iterations = it;
	// A stall with a near-zero gradient means the minimum is resolved to
	// machine precision.
	if (result.stalled && result.gradient_norm < 1e-6) {
		result.converged = true;
	}
	return result;
}

} // namespace

std::string ModelOrder::to_string() const {
	return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
}

std::vector<ModelOrder> EstimationConfig::default_order_grid() {
	std::vector<ModelOrder> grid;
	for (int d = 0; d <= 1; ++d) {
		for (int p = 0; p <= 2; ++p) {
			for (int q = 0; q <= 1; ++q) {
				grid.push_back(ModelOrder{p, d, q});
			}
		}
	}
	return grid;
}

void EstimationConfig::validate() const {
	if (max_iterations < 1 || !(gradient_tolerance > 0.0) || !(min_obs_per_param > 0.0)) {
		throw Error(ErrorCode::InvalidConfig, "estimation tolerances and limits must be positive");
	}
	if (order_grid.empty()) {
		throw Error(ErrorCode::InvalidConfig, "order grid is empty");
	}
	for (const auto &o : order_grid) {
		if (o.p < 0 || o.d < 0 || o.q < 0) {
			throw Error(ErrorCode::InvalidConfig, "negative model order " + o.to_string());
		}
	}
}

Eigen::VectorXd difference(const Eigen::VectorXd &series, int d) {
	if (d < 0) {
		throw Error(ErrorCode::InvalidConfig, "negative differencing order");
	}
	if (series.size() <= d) {
		throw Error(ErrorCode::SeriesTooShort, "series of length " + std::to_string(series.size()) +
		                                           " cannot be differenced " + std::to_string(d) + " times");
	}
	Eigen::VectorXd out = series;
	for (int k = 0; k < d; ++k) {
		const Eigen::Index m = out.size() - 1;
		out = (out.tail(m) - out.head(m)).eval();
	}
	return out;
}

Eigen::MatrixXd difference_rows(const Eigen::MatrixXd &rows, int d) {
	if (rows.rows() <= d) {
		throw Error(ErrorCode::SeriesTooShort, "regressor block too short to difference");
	}
	Eigen::MatrixXd out = rows;
	for (int k = 0; k < d; ++k) {
		const Eigen::Index m = out.rows() - 1;
		out = (out.bottomRows(m) - out.topRows(m)).eval();
	}
	return out;
}

Eigen::VectorXd undifference(const Eigen::VectorXd &diff_forecasts, const Eigen::VectorXd &last_levels) {
	const int d = static_cast<int>(last_levels.size());
	// anchors[k] = last value of the k-th difference of the history tail
	std::vector<double> anchors(static_cast<std::size_t>(d));
	Eigen::VectorXd level = last_levels;
	for (int k = 0; k < d; ++k) {
		anchors[static_cast<std::size_t>(k)] = level(level.size() - 1);
		if (level.size() > 1) {
			const Eigen::Index m = level.size() - 1;
			level = (level.tail(m) - level.head(m)).eval();
		}
	}
	Eigen::VectorXd out = diff_forecasts;
	for (int k = d - 1; k >= 0; --k) {
		double acc = anchors[static_cast<std::size_t>(k)];
		for (Eigen::Index i = 0; i < out.size(); ++i) {
			acc += out(i);
			out(i) = acc;
		}
	}
	return out;
}

CssValue css_objective(const Eigen::VectorXd &params, const Eigen::VectorXd &y, const Eigen::MatrixXd &X,
                       const ModelOrder &order) {
	const int n = static_cast<int>(y.size());
	const int p = order.p;
	const int q = order.q;
	const int K = static_cast<int>(X.cols());
	const int P = 1 + p + q + K;
	if (params.size() != P) {
		throw Error(ErrorCode::DimensionMismatch, "parameter vector has " + std::to_string(params.size()) +
		                                              " entries, expected " + std::to_string(P));
	}
	if (K > 0 && X.rows() != n) {
		throw Error(ErrorCode::DimensionMismatch, "regressor rows do not match series length");
	}
	const double mu = params(0);
	const auto phi = params.segment(1, p);
	const auto theta = params.segment(1 + p, q);
	const auto beta = params.segment(1 + p + q, K);

	Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
	Eigen::MatrixXd de = Eigen::MatrixXd::Zero(P, n); // column t holds d e_t / d params
	CssValue out;
	out.gradient = Eigen::VectorXd::Zero(P);
	for (int t = p; t < n; ++t) {
		double et = y(t) - mu;
		auto dt = de.col(t);
		dt(0) = -1.0;
		for (int i = 1; i <= p; ++i) {
			et -= phi(i - 1) * y(t - i);
			dt(i) = -y(t - i);
		}
		for (int k = 0; k < K; ++k) {
			et -= beta(k) * X(t, k);
			dt(1 + p + q + k) = -X(t, k);
		}
		for (int j = 1; j <= q && t - j >= 0; ++j) {
			et += theta(j - 1) * e(t - j);
			dt(p + j) += e(t - j);
			dt += theta(j - 1) * de.col(t - j);
		}
		if (!std::isfinite(et)) {
			throw Error(ErrorCode::NonFiniteValue, "residual recursion diverged at t=" + std::to_string(t));
		}
		e(t) = et;
		out.sse += et * et;
		out.gradient += 2.0 * et * dt;
	}
	if (!std::isfinite(out.sse)) {
		throw Error(ErrorCode::NonFiniteValue, "sum of squares overflowed");
	}
	return out;
}

Eigen::VectorXd css_residuals(const Eigen::VectorXd &params, const Eigen::VectorXd &y, const Eigen::MatrixXd &X,
                              const ModelOrder &order) {
	const int n = static_cast<int>(y.size());
	const int p = order.p;
	const int q = order.q;
	const int K = static_cast<int>(X.cols());
	if (params.size() != 1 + p + q + K || (K > 0 && X.rows() != n)) {
		throw Error(ErrorCode::DimensionMismatch, "residual inputs have inconsistent dimensions");
	}
	Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
	for (int t = p; t < n; ++t) {
		double et = y(t) - params(0);
		for (int i = 1; i <= p; ++i) {
			et -= params(i) * y(t - i);
		}
		for (int j = 1; j <= q && t - j >= 0; ++j) {
			et += params(p + j) * e(t - j);
		}
		for (int k = 0; k < K; ++k) {
			et -= params(1 + p + q + k) * X(t, k);
		}
		e(t) = et;
	}
	return e;
}

Eigen::VectorXd pack(const ArimaxFit &fit) {
	const int p = fit.order.p;
	const int q = fit.order.q;
	const auto K = fit.beta.size();
	Eigen::VectorXd params(1 + p + q + K);
	params(0) = fit.mu;
	params.segment(1, p) = fit.phi;
	params.segment(1 + p, q) = fit.theta;
	params.segment(1 + p + q, K) = fit.beta;
	return params;
}

PacfMap pacf_to_coef(const Eigen::VectorXd &pacf) {
	const int p = static_cast<int>(pacf.size());
	PacfMap out;
	out.coef = Eigen::VectorXd::Zero(p);
	out.jacobian = Eigen::MatrixXd::Zero(p, p);
	for (int k = 0; k < p; ++k) {
		const double r = pacf(k);
		const Eigen::VectorXd prev = out.coef.head(k);
		const Eigen::MatrixXd prev_jac = out.jacobian.topRows(k);
		for (int j = 0; j < k; ++j) {
			out.coef(j) = prev(j) - r * prev(k - 1 - j);
			out.jacobian.row(j) = prev_jac.row(j) - r * prev_jac.row(k - 1 - j);
			out.jacobian(j, k) -= prev(k - 1 - j);
		}
		out.coef(k) = r;
		out.jacobian.row(k).setZero();
		out.jacobian(k, k) = 1.0;
	}
	return out;
}

bool coef_to_pacf(const Eigen::VectorXd &coef, Eigen::VectorXd &pacf) {
	const int p = static_cast<int>(coef.size());
	pacf = Eigen::VectorXd::Zero(p);
	Eigen::VectorXd a = coef;
	for (int k = p - 1; k >= 0; --k) {
		const double r = a(k);
		if (!std::isfinite(r) || std::abs(r) >= 1.0) {
			return false;
		}
		pacf(k) = r;
		Eigen::VectorXd next(k);
		for (int j = 0; j < k; ++j) {
			next(j) = (a(j) + r * a(k - 1 - j)) / (1.0 - r * r);
		}
		a = next;
	}
	return true;
}

bool has_sufficient_data(std::size_t n, std::size_t exog_count, const ModelOrder &order, const EstimationConfig &cfg) {
	const double params = static_cast<double>(order.p + order.q + static_cast<int>(exog_count) + 1);
	return static_cast<double>(n) >= cfg.min_obs_per_param * params;
}

ArimaxFit fit(const Eigen::VectorXd &y, const Eigen::MatrixXd &X, const ModelOrder &order,
              const EstimationConfig &cfg) {
	cfg.validate();
	if (order.p < 0 || order.d < 0 || order.q < 0) {
		throw Error(ErrorCode::InvalidConfig, "negative model order " + order.to_string());
	}
	const int K = static_cast<int>(X.cols());
	if (K > 0 && X.rows() != y.size()) {
		throw Error(ErrorCode::DimensionMismatch, "regressor rows (" + std::to_string(X.rows()) +
		                                              ") do not match series length (" + std::to_string(y.size()) + ")");
	}
	if (!all_finite(y) || !all_finite(X)) {
		throw Error(ErrorCode::NonFiniteValue, "series or regressors contain non-finite values");
	}
	const Eigen::VectorXd yd = difference(y, order.d);
	const Eigen::MatrixXd Xd = K > 0 ? difference_rows(X, order.d) : Eigen::MatrixXd(yd.size(), 0);
	const int n = static_cast<int>(yd.size());
	if (!has_sufficient_data(static_cast<std::size_t>(n), static_cast<std::size_t>(K), order, cfg)) {
		throw Error(ErrorCode::InsufficientData, std::to_string(n) + " observations are too few for order " +
		                                             order.to_string() + " with " + std::to_string(K) + " regressors");
	}
	if (K > 0) {
		Eigen::MatrixXd design(n, K + 1);
		design.col(0).setOnes();
		design.rightCols(K) = Xd;
		if (design_rank(design) < K + 1) {
			throw Error(ErrorCode::SingularDesign, "regressors are collinear with each other or the intercept");
		}
	}

	// Fit on unit-scale data; phi and theta are scale free.
	const double sy = rms(yd);
	Eigen::VectorXd sx = Eigen::VectorXd::Ones(K);
	Eigen::MatrixXd Xs = Xd;
	for (int k = 0; k < K; ++k) {
		sx(k) = rms(Xd.col(k));
		Xs.col(k) /= sx(k);
	}
	const Eigen::VectorXd ys = yd / sy;

	Reparam reparam{order, K, cfg.enforce_stationarity};
	Eigen::VectorXd start = hannan_rissanen(ys, Xs, order);
	Eigen::VectorXd w0 = reparam.from_params(start);
	const int residual_count = n - order.p;
	const Objective objective{ys, Xs, reparam, 1.0 / residual_count};
	Eigen::VectorXd probe(w0.size());
	if (!std::isfinite(objective(w0, probe))) {
		// An explosive MA start; restart from the autoregressive part only.
		start.segment(1 + order.p, order.q).setZero();
		w0 = reparam.from_params(start);
	}
	const MinimizeResult opt = minimize_bfgs(objective, w0, cfg.max_iterations, cfg.gradient_tolerance);

	const Eigen::VectorXd params_s = reparam.to_params(opt.w);
	ArimaxFit out;
	out.order = order;
	out.mu = params_s(0) * sy;
	out.phi = params_s.segment(1, order.p);
	out.theta = params_s.segment(1 + order.p, order.q);
	out.beta = params_s.segment(1 + order.p + order.q, K);
	for (int k = 0; k < K; ++k) {
		out.beta(k) *= sy / sx(k);
	}
	out.n_obs = residual_count;
	out.sse = css_objective(pack(out), yd, Xd, order).sse;
	const int k_params = out.parameter_count();
	out.sigma2 = std::max(out.sse / static_cast<double>(residual_count - k_params), kSigma2Floor);
	out.aic = residual_count * std::log(out.sigma2) + 2.0 * (k_params + 1);
	out.iterations = opt.iterations;
	out.converged = opt.converged;
	if (reparam.on_boundary(opt.w)) {
		out.converged = false;
		out.diagnostic = "stationarity boundary reached";
	} else if (!opt.converged) {
		out.diagnostic = opt.stalled ? "line search stalled with gradient norm " + std::to_string(opt.gradient_norm)
		                             : "iteration limit reached with gradient norm " + std::to_string(opt.gradient_norm);
	}
	return out;
}

Eigen::VectorXd forecast(const ArimaxFit &fit, const Eigen::VectorXd &y_history, const Eigen::MatrixXd &x_history,
                         const Eigen::MatrixXd &x_future, int h) {
	const int p = fit.order.p;
	const int d = fit.order.d;
	const int q = fit.order.q;
	const int K = static_cast<int>(fit.beta.size());
	if (h < 0) {
		throw Error(ErrorCode::DimensionMismatch, "negative forecast horizon");
	}
	if (K > 0 && (x_future.rows() != h || x_future.cols() != K)) {
		throw Error(ErrorCode::DimensionMismatch, "future regressors must be " + std::to_string(h) + " x " +
		                                              std::to_string(K));
	}
	if (y_history.size() < d + p) {
		throw Error(ErrorCode::InsufficientHistory, "history of " + std::to_string(y_history.size()) +
		                                                " values cannot seed order " + fit.order.to_string());
	}
	const bool needs_x_history = K > 0 && (q > 0 || d > 0);
	if (needs_x_history) {
		if (x_history.rows() == 0) {
			throw Error(ErrorCode::InsufficientHistory, "regressor history required for differencing or MA terms");
		}
		if (x_history.rows() != y_history.size() || x_history.cols() != K) {
			throw Error(ErrorCode::DimensionMismatch, "regressor history does not align with the series history");
		}
	}
	if (h == 0) {
		return Eigen::VectorXd(0);
	}

	Eigen::VectorXd yd = y_history.size() > d ? difference(y_history, d) : Eigen::VectorXd(0);
	Eigen::VectorXd resid = Eigen::VectorXd::Zero(yd.size());
	if (q > 0 && yd.size() > 0) {
		const Eigen::MatrixXd xd_hist = K > 0 ? difference_rows(x_history, d) : Eigen::MatrixXd(yd.size(), 0);
		resid = css_residuals(pack(fit), yd, xd_hist, fit.order);
	}
	Eigen::MatrixXd xd_future = Eigen::MatrixXd(h, K);
	if (K > 0) {
		if (d > 0) {
			Eigen::MatrixXd joined(d + h, K);
			joined.topRows(d) = x_history.bottomRows(d);
			joined.bottomRows(h) = x_future;
			xd_future = difference_rows(joined, d);
		} else {
			xd_future = x_future;
		}
	}

	const Eigen::Index n = yd.size();
	Eigen::VectorXd path(n + h);
	path.head(n) = yd;
	Eigen::VectorXd shocks = Eigen::VectorXd::Zero(n + h);
	shocks.head(n) = resid;
	for (int s = 0; s < h; ++s) {
		const Eigen::Index t = n + s;
		double v = fit.mu;
		for (int i = 1; i <= p; ++i) {
			v += fit.phi(i - 1) * path(t - i);
		}
		for (int j = 1; j <= q; ++j) {
			if (t - j >= 0) {
				v -= fit.theta(j - 1) * shocks(t - j);
			}
		}
		for (int k = 0; k < K; ++k) {
			v += fit.beta(k) * xd_future(s, k);
		}
		path(t) = v;
	}
	return undifference(path.tail(h), y_history.tail(d));
}

OrderSelection select_order(const Eigen::VectorXd &y, const Eigen::MatrixXd &X, const EstimationConfig &cfg) {
	cfg.validate();
	const auto K = static_cast<std::size_t>(X.cols());
	OrderSelection out;
	const ArimaxFit *best = nullptr;
	const auto key = [](const ArimaxFit &f) {
		return std::make_tuple(f.order.p + f.order.q + f.order.d, f.order.q);
	};
	for (const auto &order : cfg.order_grid) {
		if (y.size() <= order.d ||
		    !has_sufficient_data(static_cast<std::size_t>(y.size() - order.d), K, order, cfg)) {
			continue;
		}
		try {
			out.candidates.push_back(fit(y, X, order, cfg));
		} catch (const Error &e) {
			switch (e.code()) {
			case ErrorCode::SingularDesign:
			case ErrorCode::InsufficientData:
			case ErrorCode::SeriesTooShort:
			case ErrorCode::NonFiniteValue:
				continue;
			default:
				throw;
			}
		}
	}
	for (const auto &candidate : out.candidates) {
		if (!best) {
			best = &candidate;
			continue;
		}
		const double tie = 1e-9 * std::max(1.0, std::abs(best->aic));
		if (candidate.aic < best->aic - tie ||
		    (std::abs(candidate.aic - best->aic) <= tie && key(candidate) < key(*best))) {
			best = &candidate;
		}
	}
	if (!best) {
		throw Error(ErrorCode::NoFeasibleOrder, "no order in the grid is feasible for " + std::to_string(y.size()) +
		                                            " observations and " + std::to_string(K) + " regressors");
	}
	out.best = *best;
	return out;
}

} // namespace cohort2d::arimax
