#include "cohort2d/arimax.hpp"
#include "cohort2d/error.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace cohort2d;
using namespace cohort2d::arimax;

namespace {

ErrorCode code_of(const auto &fn) {
	try {
		fn();
	} catch (const Error &e) {
		return e.code();
	}
	FAIL("expected cohort2d::Error");
	return ErrorCode::InvalidConfig;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
	Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
	Eigen::Index i = 0;
	for (double x : v) {
		out(i++) = x;
	}
	return out;
}

Eigen::MatrixXd no_exog(Eigen::Index n) {
	return Eigen::MatrixXd(n, 0);
}

// y_t = c + sum phi_i y_{t-i} + e_t, with a burn-in so the start is forgotten.
Eigen::VectorXd simulate_ar(const std::vector<double> &phi, double c, int n, std::mt19937_64 &rng) {
	std::normal_distribution<double> normal(0.0, 1.0);
	const int burn = 200;
	std::vector<double> y(static_cast<std::size_t>(n + burn), 0.0);
	for (int t = 0; t < n + burn; ++t) {
		double v = c + normal(rng);
		for (std::size_t i = 0; i < phi.size(); ++i) {
			if (t - 1 - static_cast<int>(i) >= 0) {
				v += phi[i] * y[static_cast<std::size_t>(t - 1) - i];
			}
		}
		y[static_cast<std::size_t>(t)] = v;
	}
	Eigen::VectorXd out(n);
	for (int t = 0; t < n; ++t) {
		out(t) = y[static_cast<std::size_t>(t + burn)];
	}
	return out;
}

// Independent residual recursion used as the finite-difference oracle.
double sse_oracle(const Eigen::VectorXd &params, const Eigen::VectorXd &y, const Eigen::MatrixXd &X, int p, int q) {
	const Eigen::Index n = y.size();
	const Eigen::Index K = X.cols();
	std::vector<double> e(static_cast<std::size_t>(n), 0.0);
	double sse = 0.0;
	for (Eigen::Index t = p; t < n; ++t) {
		double r = y(t) - params(0);
		for (int i = 1; i <= p; ++i) {
			r -= params(i) * y(t - i);
		}
		for (Eigen::Index k = 0; k < K; ++k) {
			r -= params(1 + p + q + k) * X(t, k);
		}
		for (int j = 1; j <= q; ++j) {
			if (t - j >= 0) {
				r += params(p + j) * e[static_cast<std::size_t>(t - j)];
			}
		}
		e[static_cast<std::size_t>(t)] = r;
		sse += r * r;
	}
	return sse;
}

} // namespace

TEST_CASE("differencing examples") {
	CHECK(difference(vec({1, 3, 6}), 1) == vec({2, 3}));
	CHECK(difference(vec({1, 3, 6}), 0) == vec({1, 3, 6}));
	CHECK(difference(vec({1, 3, 6, 10}), 2) == vec({1, 1}));
	CHECK(code_of([] { difference(vec({1, 2}), 2); }) == ErrorCode::SeriesTooShort);
}

TEST_CASE("undifferencing examples") {
	CHECK(undifference(vec({4}), vec({6})) == vec({10}));
	CHECK(undifference(Eigen::VectorXd(0), vec({6})).size() == 0);
	// 1, 3, 6, 10 continued by second differences 1, 1: first differences 5, 6, levels 15, 21
	CHECK(undifference(vec({1, 1}), vec({6, 10})) == vec({15, 21}));
}

TEST_CASE("property: differencing round trip") {
	std::mt19937_64 rng(5);
	std::uniform_real_distribution<double> unif(-1.0, 1.0);
	for (int d = 0; d <= 2; ++d) {
		for (int trial = 0; trial < 20; ++trial) {
			const int n = 5 + trial;
			const int k = 1 + trial % 6;
			Eigen::VectorXd x(n + k);
			for (Eigen::Index i = 0; i < x.size(); ++i) {
				x(i) = unif(rng);
			}
			const Eigen::VectorXd diff = difference(x, d);
			const Eigen::VectorXd continuation = diff.tail(k);
			const Eigen::VectorXd rebuilt = undifference(continuation, x.segment(n - d, d));
			CHECK((rebuilt - x.tail(k)).cwiseAbs().maxCoeff() <= 1e-12);
		}
	}
}

TEST_CASE("objective with no lags reduces to the mean") {
	const Eigen::VectorXd y = vec({3, 5, 4, 8, 10});
	const ModelOrder order{0, 0, 0};
	const double mean = y.mean();
	const auto at_mean = css_objective(vec({mean}), y, no_exog(5), order);
	CHECK(at_mean.sse == doctest::Approx((y.array() - mean).square().sum()).epsilon(1e-12));
	CHECK(std::abs(at_mean.gradient(0)) < 1e-9);
	const auto f = fit(y, no_exog(5), order);
	CHECK(f.mu == doctest::Approx(mean).epsilon(1e-9));
}

TEST_CASE("AR(1) without intercept: objective minimum is the OLS slope") {
	std::mt19937_64 rng(17);
	const Eigen::VectorXd y = simulate_ar({0.4}, 0.0, 80, rng);
	const Eigen::Index n = y.size();
	const double slope = y.tail(n - 1).dot(y.head(n - 1)) / y.head(n - 1).squaredNorm();
	const auto v = css_objective(vec({0.0, slope}), y, no_exog(n), ModelOrder{1, 0, 0});
	CHECK(std::abs(v.gradient(1)) < 1e-8 * (1.0 + v.sse));
	// the full fit with intercept matches OLS on [1, y_{t-1}]
	Eigen::MatrixXd A(n - 1, 2);
	A.col(0).setOnes();
	A.col(1) = y.head(n - 1);
	const Eigen::VectorXd beta = A.colPivHouseholderQr().solve(y.tail(n - 1));
	const auto f = fit(y, no_exog(n), ModelOrder{1, 0, 0});
	CHECK(f.mu == doctest::Approx(beta(0)).epsilon(1e-6));
	CHECK(f.phi(0) == doctest::Approx(beta(1)).epsilon(1e-6));
}

TEST_CASE("property: analytic gradient matches central differences") {
	std::mt19937_64 rng(99);
	std::uniform_real_distribution<double> unif(-0.4, 0.4);
	std::normal_distribution<double> normal(0.0, 1.0);
	int checked = 0;
	for (int p = 0; p <= 3; ++p) {
		for (int q = 0; q <= 3; ++q) {
			for (int K = 0; K <= 3; K += 3) {
				const int n = 60;
				Eigen::VectorXd y(n);
				Eigen::MatrixXd X(n, K);
				for (int t = 0; t < n; ++t) {
					y(t) = normal(rng);
					for (int k = 0; k < K; ++k) {
						X(t, k) = normal(rng);
					}
				}
				const ModelOrder order{p, 0, q};
				Eigen::VectorXd params(1 + p + q + K);
				for (Eigen::Index i = 0; i < params.size(); ++i) {
					params(i) = unif(rng);
				}
				const auto v = css_objective(params, y, X, order);
				CHECK(v.sse == doctest::Approx(sse_oracle(params, y, X, p, q)).epsilon(1e-12));
				Eigen::VectorXd fd(params.size());
				for (Eigen::Index i = 0; i < params.size(); ++i) {
					const double step = 1e-6 * (1.0 + std::abs(params(i)));
					Eigen::VectorXd hi = params;
					Eigen::VectorXd lo = params;
					hi(i) += step;
					lo(i) -= step;
					fd(i) = (sse_oracle(hi, y, X, p, q) - sse_oracle(lo, y, X, p, q)) / (2.0 * step);
				}
				const double rel = (v.gradient - fd).norm() / std::max(fd.norm(), 1e-12);
				CHECK(rel < 1e-5);
				++checked;
			}
		}
	}
	CHECK(checked == 32);
}

TEST_CASE("AR(1) estimates are consistent over 50 seeds") {
	double abs_err = 0.0;
	double mean_phi = 0.0;
	for (int seed = 1; seed <= 50; ++seed) {
		std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
		const Eigen::VectorXd y = simulate_ar({0.6}, 0.0, 300, rng);
		const auto f = fit(y, no_exog(300), ModelOrder{1, 0, 0});
		abs_err += std::abs(f.phi(0) - 0.6);
		mean_phi += f.phi(0);
		CHECK(f.converged);
	}
	CHECK(abs_err / 50.0 < 0.10);
	CHECK(std::abs(mean_phi / 50.0 - 0.6) < 0.10);
}

TEST_CASE("regression-only fit recovers intercept and slope") {
	std::mt19937_64 rng(4);
	std::normal_distribution<double> noise(0.0, 0.01);
	std::uniform_real_distribution<double> unif(0.0, 10.0);
	const int n = 50;
	Eigen::VectorXd y(n);
	Eigen::MatrixXd X(n, 1);
	for (int t = 0; t < n; ++t) {
		X(t, 0) = unif(rng);
		y(t) = 2.0 + 3.0 * X(t, 0) + noise(rng);
	}
	const auto f = fit(y, X, ModelOrder{0, 0, 0});
	CHECK(std::abs(f.mu - 2.0) < 0.05);
	CHECK(std::abs(f.beta(0) - 3.0) < 0.05);
}

TEST_CASE("constant series: sigma2 is floored, AIC stays finite") {
	const Eigen::VectorXd y = Eigen::VectorXd::Constant(12, 7.5);
	const auto f = fit(y, no_exog(12), ModelOrder{0, 0, 0});
	CHECK(f.mu == doctest::Approx(7.5));
	CHECK(f.sigma2 == kSigma2Floor);
	CHECK(std::isfinite(f.aic));
}

TEST_CASE("AIC bookkeeping") {
	std::mt19937_64 rng(8);
	std::normal_distribution<double> normal(0.0, 1.0);
	const int n = 80;
	const Eigen::VectorXd y = simulate_ar({0.5}, 1.0, n, rng);
	Eigen::MatrixXd X1(n, 1);
	Eigen::MatrixXd X2(n, 2);
	for (int t = 0; t < n; ++t) {
		X1(t, 0) = normal(rng);
		X2(t, 0) = X1(t, 0);
		X2(t, 1) = normal(rng);
	}
	for (const auto &order : {ModelOrder{0, 0, 0}, ModelOrder{1, 0, 0}, ModelOrder{1, 0, 1}, ModelOrder{2, 1, 0}}) {
		const auto f1 = fit(y, X1, order);
		const auto f2 = fit(y, X2, order);
		const int k = f1.parameter_count();
		CHECK(f1.aic == doctest::Approx(f1.n_obs * std::log(f1.sigma2) + 2.0 * (k + 1)).epsilon(1e-12));
		CHECK(f1.sigma2 == doctest::Approx(f1.sse / (f1.n_obs - k)).epsilon(1e-12));
		CHECK(f2.parameter_count() == k + 1);
		// one more regressor on the same sample never increases the fitted sse
		CHECK(f2.sse <= f1.sse * (1.0 + 1e-6));
	}
}

TEST_CASE("forecast examples") {
	SUBCASE("mean model repeats mu") {
		ArimaxFit f;
		f.order = {0, 0, 0};
		f.mu = 5.0;
		const auto out = forecast(f, vec({1, 2, 3}), Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 0), 4);
		CHECK(out == vec({5, 5, 5, 5}));
	}
	SUBCASE("AR(1) halves each step") {
		ArimaxFit f;
		f.order = {1, 0, 0};
		f.phi = vec({0.5});
		const auto out = forecast(f, vec({3, 8}), Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 0), 3);
		CHECK(out == vec({4, 2, 1}));
	}
	SUBCASE("regression only") {
		ArimaxFit f;
		f.order = {0, 0, 0};
		f.mu = 2.0;
		f.beta = vec({3.0});
		Eigen::MatrixXd xf(2, 1);
		xf << 1, 2;
		const auto out = forecast(f, vec({0}), Eigen::MatrixXd(0, 0), xf, 2);
		CHECK(out == vec({5, 8}));
	}
	SUBCASE("random walk with drift continues in levels") {
		ArimaxFit f;
		f.order = {0, 1, 0};
		f.mu = 2.0;
		const auto out = forecast(f, vec({1, 4, 6}), Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 0), 3);
		CHECK(out == vec({8, 10, 12}));
	}
	SUBCASE("MA(1) uses the last in-sample residual, then zero") {
		ArimaxFit f;
		f.order = {0, 0, 1};
		f.mu = 1.0;
		f.theta = vec({0.5});
		// residuals: e0 = 3 - 1 = 2, e1 = 2 - 1 + 0.5 * 2 = 2
		const auto out = forecast(f, vec({3, 2}), Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 0), 2);
		CHECK(out(0) == doctest::Approx(1.0 - 0.5 * 2.0));
		CHECK(out(1) == doctest::Approx(1.0));
	}
	SUBCASE("errors") {
		ArimaxFit f;
		f.order = {2, 0, 0};
		f.phi = vec({0.1, 0.1});
		CHECK(code_of([&] { forecast(f, vec({1}), Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 0), 2); }) ==
		      ErrorCode::InsufficientHistory);
		ArimaxFit g;
		g.order = {0, 0, 0};
		g.beta = vec({1.0});
		CHECK(code_of([&] { forecast(g, vec({1}), Eigen::MatrixXd(0, 0), Eigen::MatrixXd(3, 1), 2); }) ==
		      ErrorCode::DimensionMismatch);
	}
}

TEST_CASE("property: mean-model forecast is exactly mu") {
	std::mt19937_64 rng(2);
	std::uniform_real_distribution<double> unif(-100.0, 100.0);
	for (int trial = 0; trial < 50; ++trial) {
		ArimaxFit f;
		f.order = {0, 0, 0};
		f.mu = unif(rng);
		const int h = 1 + trial % 12;
		const auto out = forecast(f, vec({unif(rng)}), Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 0), h);
		CHECK(out == Eigen::VectorXd::Constant(h, f.mu));
	}
}

TEST_CASE("order selection picks AR(2) on AR(2) data") {
	EstimationConfig cfg;
	cfg.order_grid.clear();
	for (int p = 0; p <= 2; ++p) {
		for (int q = 0; q <= 1; ++q) {
			cfg.order_grid.push_back({p, 0, q});
		}
	}
	int hits = 0;
	for (int seed = 1; seed <= 50; ++seed) {
		std::mt19937_64 rng(static_cast<std::uint64_t>(1000 + seed));
		const Eigen::VectorXd y = simulate_ar({0.5, 0.3}, 0.0, 400, rng);
		const auto sel = select_order(y, no_exog(400), cfg);
		hits += sel.best.order.p == 2 ? 1 : 0;
	}
	CHECK(hits >= 40);
}

TEST_CASE("order selection stays small on white noise") {
	EstimationConfig cfg;
	cfg.order_grid.clear();
	for (int p = 0; p <= 2; ++p) {
		for (int q = 0; q <= 1; ++q) {
			cfg.order_grid.push_back({p, 0, q});
		}
	}
	int small = 0;
	for (int seed = 1; seed <= 50; ++seed) {
		std::mt19937_64 rng(static_cast<std::uint64_t>(5000 + seed));
		std::normal_distribution<double> normal(0.0, 1.0);
		Eigen::VectorXd y(200);
		for (auto &v : y) {
			v = normal(rng);
		}
		const auto sel = select_order(y, no_exog(200), cfg);
		small += sel.best.order.p + sel.best.order.q <= 1 ? 1 : 0;
	}
	CHECK(small >= 35);
}

TEST_CASE("order selection without a feasible candidate") {
	EstimationConfig cfg;
	cfg.order_grid = {{0, 0, 0}};
	cfg.min_obs_per_param = 5.0;
	CHECK(code_of([&] { select_order(vec({1, 2, 3}), no_exog(3), cfg); }) == ErrorCode::NoFeasibleOrder);
	CHECK_FALSE(has_sufficient_data(3, 0, {0, 0, 0}, cfg));
	CHECK(has_sufficient_data(5, 0, {0, 0, 0}, cfg));
	CHECK(code_of([&] { fit(vec({1, 2, 3}), no_exog(3), ModelOrder{0, 0, 0}, cfg); }) ==
	      ErrorCode::InsufficientData);
}

TEST_CASE("collinear regressors are reported") {
	const int n = 30;
	Eigen::VectorXd y(n);
	Eigen::MatrixXd X(n, 2);
	for (int t = 0; t < n; ++t) {
		X(t, 0) = t;
		X(t, 1) = 2.0 * t;
		y(t) = 1.0 + 0.5 * t + std::sin(t);
	}
	CHECK(code_of([&] { fit(y, X, ModelOrder{0, 0, 0}); }) == ErrorCode::SingularDesign);
}

TEST_CASE("fits stay stationary and invertible") {
	std::mt19937_64 rng(21);
	std::normal_distribution<double> normal(0.0, 1.0);
	for (int trial = 0; trial < 10; ++trial) {
		Eigen::VectorXd y(120);
		double level = 0.0;
		for (auto &v : y) {
			level += normal(rng);
			v = level;
		}
		const auto f = fit(y, no_exog(120), ModelOrder{2, 0, 1});
		// a fit pushed onto the stationarity boundary must say so
		Eigen::VectorXd pacf;
		const bool inside = coef_to_pacf(f.phi, pacf) && coef_to_pacf(f.theta, pacf);
		CHECK((inside || (!f.converged && !f.diagnostic.empty())));
		CHECK(f.phi.allFinite());
		CHECK(std::isfinite(f.sse));
	}
}

TEST_CASE("property: partial-autocorrelation map round trip and Jacobian") {
	std::mt19937_64 rng(6);
	std::uniform_real_distribution<double> unif(-0.95, 0.95);
	for (int trial = 0; trial < 30; ++trial) {
		const int p = 1 + trial % 4;
		Eigen::VectorXd pacf(p);
		for (auto &v : pacf) {
			v = unif(rng);
		}
		const auto map = pacf_to_coef(pacf);
		Eigen::VectorXd back;
		REQUIRE(coef_to_pacf(map.coef, back));
		CHECK((back - pacf).cwiseAbs().maxCoeff() < 1e-9);
		for (int j = 0; j < p; ++j) {
			const double h = 1e-6;
			Eigen::VectorXd hi = pacf;
			Eigen::VectorXd lo = pacf;
			hi(j) += h;
			lo(j) -= h;
			const Eigen::VectorXd fd = (pacf_to_coef(hi).coef - pacf_to_coef(lo).coef) / (2.0 * h);
			CHECK((fd - map.jacobian.col(j)).cwiseAbs().maxCoeff() < 1e-6);
		}
	}
	Eigen::VectorXd pacf;
	CHECK_FALSE(coef_to_pacf(vec({1.2}), pacf));
}

TEST_CASE("differenced fit with a regressor forecasts in levels") {
	std::mt19937_64 rng(12);
	std::normal_distribution<double> normal(0.0, 0.01);
	const int n = 40;
	Eigen::VectorXd y(n);
	Eigen::MatrixXd X(n, 1);
	for (int t = 0; t < n; ++t) {
		X(t, 0) = std::sin(0.3 * t) + 0.1 * t;
		y(t) = 10.0 + 0.5 * t + 4.0 * X(t, 0) + normal(rng);
	}
	const auto f = fit(y, X, ModelOrder{0, 1, 0});
	CHECK(f.beta(0) == doctest::Approx(4.0).epsilon(0.02));
	Eigen::MatrixXd xf(3, 1);
	for (int s = 0; s < 3; ++s) {
		xf(s, 0) = std::sin(0.3 * (n + s)) + 0.1 * (n + s);
	}
	const auto out = forecast(f, y, X, xf, 3);
	for (int s = 0; s < 3; ++s) {
		const double truth = 10.0 + 0.5 * (n + s) + 4.0 * xf(s, 0);
		CHECK(out(s) == doctest::Approx(truth).epsilon(0.01));
	}
}
