#include "cohort2d/error.hpp"
#include "cohort2d/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace cohort2d;

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

using Vec = std::vector<double>;

// Single-pass references, written independently of the library.
double ref_rmse(const Vec &a, const Vec &p) {
	long double s = 0;
	for (std::size_t i = 0; i < a.size(); ++i) {
		s += static_cast<long double>(a[i] - p[i]) * (a[i] - p[i]);
	}
	return static_cast<double>(std::sqrt(s / a.size()));
}

double ref_mae(const Vec &a, const Vec &p) {
	long double s = 0;
	for (std::size_t i = 0; i < a.size(); ++i) {
		s += std::fabs(a[i] - p[i]);
	}
	return static_cast<double>(s / a.size());
}

double ref_smape(const Vec &a, const Vec &p) {
	long double s = 0;
	for (std::size_t i = 0; i < a.size(); ++i) {
		const long double den = std::fabs(a[i]) + std::fabs(p[i]);
		s += den == 0 ? 0.0L : 200.0L * std::fabs(a[i] - p[i]) / den;
	}
	return static_cast<double>(s / a.size());
}

bool close(double x, double y) {
	return std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(y));
}

ErrorRecord rec(int horizon, double actual, double predicted, std::string model = "m", int month = 1) {
	ErrorRecord r;
	r.prediction_month = CohortMonth{2024, month};
	r.cohort = CohortMonth{2023, 12};
	r.u = horizon;
	r.horizon = horizon;
	r.actual = actual;
	r.predicted = predicted;
	r.model_name = std::move(model);
	return r;
}

} // namespace

TEST_CASE("metric examples") {
	CHECK(rmse(Vec{0, 2}, Vec{2, 2}) == doctest::Approx(std::sqrt(2.0)));
	CHECK(rmse(Vec{3}, Vec{7}) == 4.0);
	CHECK(rmse(Vec{1, 2}, Vec{1, 2}) == 0.0);
	CHECK(mae(Vec{0, 2}, Vec{2, 2}) == 1.0);
	CHECK(mae(Vec{-1}, Vec{1}) == 2.0);
	CHECK(mae(Vec{4, 5}, Vec{4, 5}) == 0.0);
	CHECK(smape(Vec{1}, Vec{3}) == 100.0);
	CHECK(smape(Vec{5, 6}, Vec{5, 6}) == 0.0);
	CHECK(smape(Vec{0}, Vec{0}) == 0.0);
	CHECK(smape(Vec{0}, Vec{4}) == 200.0);
}

TEST_CASE("metric input errors") {
	CHECK(code_of([] { rmse(Vec{}, Vec{}); }) == ErrorCode::EmptyInput);
	CHECK(code_of([] { mae(Vec{1}, Vec{1, 2}); }) == ErrorCode::LengthMismatch);
	CHECK(code_of([] { smape(Vec{}, Vec{}); }) == ErrorCode::EmptyInput);
	CHECK(code_of([] { aggregate(std::vector<ErrorRecord>{}, GroupBy::Model, Metric::Mae); }) ==
	      ErrorCode::EmptyInput);
}

TEST_CASE("property: metrics match the references on 1000 random vectors") {
	std::mt19937_64 rng(2024);
	std::uniform_real_distribution<double> value(-1000.0, 1000.0);
	std::uniform_int_distribution<int> length(1, 50);
	int mismatches = 0;
	for (int trial = 0; trial < 1000; ++trial) {
		const int n = length(rng);
		Vec a(static_cast<std::size_t>(n));
		Vec p(static_cast<std::size_t>(n));
		for (int i = 0; i < n; ++i) {
			a[static_cast<std::size_t>(i)] = value(rng);
			p[static_cast<std::size_t>(i)] = trial % 7 == 0 && i % 3 == 0 ? a[static_cast<std::size_t>(i)] : value(rng);
		}
		mismatches += close(rmse(a, p), ref_rmse(a, p)) ? 0 : 1;
		mismatches += close(mae(a, p), ref_mae(a, p)) ? 0 : 1;
		mismatches += close(smape(a, p), ref_smape(a, p)) ? 0 : 1;
	}
	CHECK(mismatches == 0);
}

TEST_CASE("property: bounds, symmetry, Jensen and scaling") {
	std::mt19937_64 rng(77);
	std::uniform_real_distribution<double> value(-100.0, 100.0);
	std::uniform_real_distribution<double> scale(0.01, 100.0);
	for (int trial = 0; trial < 500; ++trial) {
		const std::size_t n = 1 + static_cast<std::size_t>(trial % 20);
		Vec a(n);
		Vec p(n);
		for (std::size_t i = 0; i < n; ++i) {
			a[i] = value(rng);
			p[i] = value(rng);
		}
		const double s = smape(a, p);
		CHECK(s >= 0.0);
		CHECK(s <= 200.0);
		CHECK(s == smape(p, a));
		CHECK(rmse(a, p) >= mae(a, p) * (1.0 - 1e-12));
		CHECK(smape(a, a) == 0.0);
		CHECK(rmse(a, a) == 0.0);

		const double c = scale(rng);
		Vec ca(n);
		Vec cp(n);
		for (std::size_t i = 0; i < n; ++i) {
			ca[i] = c * a[i];
			cp[i] = c * p[i];
		}
		CHECK(rmse(ca, cp) == doctest::Approx(c * rmse(a, p)).epsilon(1e-9));
		CHECK(mae(ca, cp) == doctest::Approx(c * mae(a, p)).epsilon(1e-9));
		CHECK(smape(ca, cp) == doctest::Approx(s).epsilon(1e-9));
	}
}

TEST_CASE("aggregate counts, values and spread") {
	const std::vector<ErrorRecord> records{rec(1, 10, 12), rec(1, 10, 6), rec(2, 5, 5)};
	const auto by_h = aggregate(records, GroupBy::Horizon, Metric::Mae);
	REQUIRE(by_h.size() == 2);
	CHECK(by_h[0].key == "1");
	CHECK(by_h[0].count == 2);
	CHECK(by_h[0].value == 3.0);
	CHECK(by_h[0].dispersion == 1.0); // |e| = 2, 4
	CHECK(by_h[0].median == 3.0);
	CHECK(by_h[1].count == 1);
	CHECK(by_h[1].value == 0.0);

	const auto rm = aggregate(records, GroupBy::Horizon, Metric::Rmse);
	CHECK(rm[0].value == doctest::Approx(std::sqrt(10.0)));
}

TEST_CASE("horizon keys sort numerically") {
	std::vector<ErrorRecord> records;
	for (int h : {10, 2, 1, 12, 3}) {
		records.push_back(rec(h, 1, 2));
	}
	const auto rows = aggregate(records, GroupBy::Horizon, Metric::Smape);
	std::vector<std::string> keys;
	for (const auto &r : rows) {
		keys.push_back(r.key);
	}
	CHECK(keys == std::vector<std::string>{"1", "2", "3", "10", "12"});
}

TEST_CASE("grouping by horizon yields one row per horizon 1..12") {
	std::vector<ErrorRecord> records;
	for (int h = 1; h <= 12; ++h) {
		for (int k = 0; k < 13 - h; ++k) {
			records.push_back(rec(h, 100, 100 + k));
		}
	}
	const auto rows = aggregate(records, GroupBy::Horizon, Metric::Smape);
	REQUIRE(rows.size() == 12);
	for (int h = 1; h <= 12; ++h) {
		CHECK(rows[static_cast<std::size_t>(h - 1)].key == std::to_string(h));
		CHECK(rows[static_cast<std::size_t>(h - 1)].count == static_cast<std::size_t>(13 - h));
	}
}

TEST_CASE("property: model grouping partitions the ungrouped metric") {
	std::mt19937_64 rng(5);
	std::uniform_real_distribution<double> value(1.0, 100.0);
	std::vector<ErrorRecord> records;
	for (int i = 0; i < 200; ++i) {
		records.push_back(rec(1 + i % 12, value(rng), value(rng), i % 3 == 0 ? "a" : "b", 1 + i % 6));
	}
	for (auto metric : {Metric::Mae, Metric::Rmse, Metric::Smape}) {
		const auto rows = aggregate(records, GroupBy::Model, metric);
		REQUIRE(rows.size() == 2);
		std::size_t total = 0;
		for (const auto &row : rows) {
			Vec a;
			Vec p;
			for (const auto &r : records) {
				if (r.model_name == row.key) {
					a.push_back(r.actual);
					p.push_back(r.predicted);
				}
			}
			const double direct = metric == Metric::Mae ? mae(a, p) : metric == Metric::Rmse ? rmse(a, p) : smape(a, p);
			CHECK(row.value == doctest::Approx(direct).epsilon(1e-12));
			total += row.count;
		}
		CHECK(total == records.size());
	}
	const auto months = aggregate(records, GroupBy::PredictionMonth, Metric::Mae);
	CHECK(months.size() == 6);
	CHECK(months.front().key == "2024-01");
}
