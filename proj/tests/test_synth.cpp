#include "cohort2d/error.hpp"
#include "cohort2d/synth.hpp"

#include <doctest.h>

#include <cmath>

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

double cell(const SynthData &d, std::size_t t, std::size_t u) {
	return *d.truth.value(t, u);
}

bool same(const SynthData &a, const SynthData &b) {
	if (a.truth.cohort_count() != b.truth.cohort_count() || a.truth.horizon_count() != b.truth.horizon_count()) {
		return false;
	}
	if (!(a.covariates == b.covariates)) {
		return false;
	}
	for (std::size_t t = 0; t < a.truth.cohort_count(); ++t) {
		for (std::size_t u = 0; u < a.truth.horizon_count(); ++u) {
			if (cell(a, t, u) != cell(b, t, u)) {
				return false;
			}
		}
	}
	return true;
}

// Mean Pearson correlation between adjacent columns across cohorts.
double adjacent_correlation(const SynthData &d) {
	const std::size_t T = d.truth.cohort_count();
	double total = 0.0;
	for (std::size_t u = 1; u < d.truth.horizon_count(); ++u) {
		double mx = 0, my = 0;
		for (std::size_t t = 0; t < T; ++t) {
			mx += cell(d, t, u - 1);
			my += cell(d, t, u);
		}
		mx /= static_cast<double>(T);
		my /= static_cast<double>(T);
		double sxy = 0, sxx = 0, syy = 0;
		for (std::size_t t = 0; t < T; ++t) {
			const double dx = cell(d, t, u - 1) - mx;
			const double dy = cell(d, t, u) - my;
			sxy += dx * dy;
			sxx += dx * dx;
			syy += dy * dy;
		}
		total += sxy / std::sqrt(sxx * syy);
	}
	return total / static_cast<double>(d.truth.horizon_count() - 1);
}

} // namespace

TEST_CASE("perfect coupling without noise repeats column 0") {
	SynthConfig cfg;
	cfg.noise_sigma = 0;
	cfg.prev_column_rho = 1;
	cfg.decay = 1;
	cfg.cohort_trend = 0;
	const auto d = generate(cfg);
	for (std::size_t t = 0; t < cfg.n_cohorts; ++t) {
		for (std::size_t u = 1; u < cfg.horizon_count; ++u) {
			CHECK(cell(d, t, u) == cell(d, t, 0));
		}
	}
}

TEST_CASE("noiseless decay gives an exact ratio") {
	SynthConfig cfg;
	cfg.noise_sigma = 0;
	cfg.decay = 0.9;
	const auto d = generate(cfg);
	for (std::size_t t = 0; t < cfg.n_cohorts; ++t) {
		for (std::size_t u = 1; u < cfg.horizon_count; ++u) {
			CHECK(cell(d, t, u) / cell(d, t, u - 1) == doctest::Approx(0.9).epsilon(1e-12));
		}
	}
}

TEST_CASE("shape, months and covariates") {
	SynthConfig cfg;
	cfg.n_cohorts = 7;
	cfg.horizon_count = 4;
	cfg.start_month = CohortMonth{2021, 11};
	const auto d = generate(cfg);
	CHECK(d.truth.cohort_count() == 7);
	CHECK(d.truth.horizon_count() == 4);
	CHECK(d.truth.first_cohort() == CohortMonth{2021, 11});
	CHECK(d.truth.known_count() == 28);
	CHECK(d.covariates.names() == std::vector<std::string>{"x1"});
	for (std::size_t t = 0; t < 7; ++t) {
		CHECK(d.covariates.has(d.truth.cohort(t)));
	}
}

TEST_CASE("property: determinism per seed and distinct seeds differ") {
	for (std::uint64_t seed = 1; seed <= 20; ++seed) {
		SynthConfig cfg;
		cfg.seed = seed;
		CHECK(same(generate(cfg), generate(cfg)));
		SynthConfig other = cfg;
		other.seed = seed + 1000;
		CHECK_FALSE(same(generate(cfg), generate(other)));
	}
}

TEST_CASE("property: values are finite and non-negative") {
	for (std::uint64_t seed = 1; seed <= 20; ++seed) {
		SynthConfig cfg;
		cfg.seed = seed;
		cfg.noise_sigma = 800; // large enough to hit the floor
		cfg.covariate_effect = 300;
		cfg.prev_column_rho = static_cast<double>(seed % 3) / 2.0;
		const auto d = generate(cfg);
		std::size_t zeros = 0;
		for (std::size_t t = 0; t < cfg.n_cohorts; ++t) {
			for (std::size_t u = 0; u < cfg.horizon_count; ++u) {
				CHECK(std::isfinite(cell(d, t, u)));
				CHECK(cell(d, t, u) >= 0.0);
				zeros += cell(d, t, u) == 0.0 ? 1 : 0;
			}
		}
		CHECK(zeros < cfg.n_cohorts * cfg.horizon_count);
	}
}

TEST_CASE("property: adjacent-column correlation grows with rho") {
	// Level held constant so that only the coupling links columns.
	double mean[3] = {0, 0, 0};
	const double rhos[3] = {0.0, 0.5, 0.9};
	for (int i = 0; i < 3; ++i) {
		for (std::uint64_t seed = 1; seed <= 20; ++seed) {
			SynthConfig cfg;
			cfg.seed = seed;
			cfg.prev_column_rho = rhos[i];
			cfg.cohort_trend = 0;
			cfg.covariate_effect = 0;
			mean[i] += adjacent_correlation(generate(cfg)) / 20.0;
		}
	}
	MESSAGE("correlations " << mean[0] << " " << mean[1] << " " << mean[2]);
	CHECK(mean[0] < mean[1]);
	CHECK(mean[1] < mean[2]);
	CHECK(std::abs(mean[0]) < 0.1);
}

TEST_CASE("invalid configurations") {
	const auto bad = [](auto mutate) {
		SynthConfig cfg;
		mutate(cfg);
		return code_of([&] { generate(cfg); });
	};
	CHECK(bad([](SynthConfig &c) { c.n_cohorts = 0; }) == ErrorCode::InvalidConfig);
	CHECK(bad([](SynthConfig &c) { c.horizon_count = 0; }) == ErrorCode::InvalidConfig);
	CHECK(bad([](SynthConfig &c) { c.base_level = 0; }) == ErrorCode::InvalidConfig);
	CHECK(bad([](SynthConfig &c) { c.decay = 0; }) == ErrorCode::InvalidConfig);
	CHECK(bad([](SynthConfig &c) { c.decay = 1.01; }) == ErrorCode::InvalidConfig);
	CHECK(bad([](SynthConfig &c) { c.prev_column_rho = -0.1; }) == ErrorCode::InvalidConfig);
	CHECK(bad([](SynthConfig &c) { c.prev_column_rho = 1.5; }) == ErrorCode::InvalidConfig);
	CHECK(bad([](SynthConfig &c) { c.noise_sigma = -1; }) == ErrorCode::InvalidConfig);
	CHECK(bad([](SynthConfig &c) { c.cohort_trend = std::nan(""); }) == ErrorCode::InvalidConfig);
}
