#pragma once

#include "cohort2d/cohort_matrix.hpp"

#include <cstdint>

namespace cohort2d {

struct SynthConfig {
	std::size_t n_cohorts = 36;
	std::size_t horizon_count = 12;
	double base_level = 1000.0;
	double cohort_trend = 5.0;       // level change per cohort
	double decay = 0.95;             // per-column retention, (0, 1]
	double prev_column_rho = 0.5;    // coupling of column u to column u-1, [0, 1]
	double noise_sigma = 50.0;       // >= 0, currency units
	double covariate_effect = 20.0;  // level change per unit of covariate x1
	std::uint64_t seed = 42;
	CohortMonth start_month{2020, 1};

	void validate() const;
};

struct SynthData {
	CohortMatrix truth; // every cell known
	CohortCovariates covariates; // one feature, "x1"
};

/// value(t,u) = level_t * decay^u * f(t,u) + noise_sigma * decay^u * xi(t,u), floored at 0, with
///   level_t = base_level + cohort_trend * t + covariate_effect * x_t,
///   f(t,0) = r(t,0),  f(t,u) = rho * g(t,u-1) + (1 - rho) * r(t,u),
///   g(t,u) = f(t,u) + noise_sigma * xi(t,u) / level_t,
///   r = 1 + (noise_sigma / base_level) * eta,
/// where x_t, eta and xi are independent standard normals. g is the realized
/// cell relative to the row's mean curve, so column u leans on what column
/// u-1 actually showed, noise included. With noise_sigma = 0 every r is 1 and
/// the grid is the pure decay curve.
SynthData generate(const SynthConfig &cfg);

} // namespace cohort2d
