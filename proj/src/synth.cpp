#include "cohort2d/synth.hpp"

#include "cohort2d/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cohort2d {

void SynthConfig::validate() const {
	const auto fail = [](const std::string &msg) { throw Error(ErrorCode::InvalidConfig, msg); };
	if (n_cohorts < 1 || horizon_count < 1) {
		fail("n_cohorts and horizon_count must be at least 1");
	}
	if (!(base_level > 0.0) || !std::isfinite(base_level)) {
		fail("base_level must be positive");
	}
	if (!std::isfinite(cohort_trend) || !std::isfinite(covariate_effect)) {
		fail("cohort_trend and covariate_effect must be finite");
	}
	if (!(decay > 0.0 && decay <= 1.0)) {
		fail("decay must lie in (0, 1]");
	}
	if (!(prev_column_rho >= 0.0 && prev_column_rho <= 1.0)) {
		fail("prev_column_rho must lie in [0, 1]");
	}
	if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
		fail("noise_sigma must be non-negative");
	}
}

SynthData generate(const SynthConfig &cfg) {
	cfg.validate();
	std::mt19937_64 engine(cfg.seed);
	std::normal_distribution<double> normal(0.0, 1.0);

	const std::size_t T = cfg.n_cohorts;
	const std::size_t U = cfg.horizon_count;
	std::vector<double> x(T);
	for (auto &v : x) {
		v = normal(engine);
	}
	const double shock = cfg.noise_sigma / cfg.base_level;
	const double rho = cfg.prev_column_rho;

	std::vector<std::optional<double>> values(T * U);
	std::map<CohortMonth, std::vector<double>> cov_rows;
	for (std::size_t t = 0; t < T; ++t) {
		const double level = cfg.base_level + cfg.cohort_trend * static_cast<double>(t) + cfg.covariate_effect * x[t];
		// realized previous cell relative to the row's mean curve, noise included
		double prev_ratio = 1.0;
		double curve = 1.0;
		for (std::size_t u = 0; u < U; ++u) {
			const double r = 1.0 + shock * normal(engine);
			const double xi = normal(engine);
			const double factor = u == 0 ? r : rho * prev_ratio + (1.0 - rho) * r;
			const double v = level * curve * factor + cfg.noise_sigma * curve * xi;
			values[t * U + u] = std::max(0.0, v);
			prev_ratio = level > 0.0 ? factor + cfg.noise_sigma * xi / level : 1.0;
			curve *= cfg.decay;
		}
		cov_rows[cfg.start_month + static_cast<int>(t)] = {x[t]};
	}
	const CohortMonth last = cfg.start_month + static_cast<int>(T - 1);
	return SynthData{
	    CohortMatrix(cfg.start_month, T, U, last + static_cast<int>(U), std::move(values)),
	    CohortCovariates({"x1"}, std::move(cov_rows)),
	};
}

} // namespace cohort2d
