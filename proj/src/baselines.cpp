#include "cohort2d/baselines.hpp"

#include "cohort2d/error.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <numeric>

namespace cohort2d {

namespace {

std::vector<double> known_prefix(const FilledMatrix &working, std::size_t u) {
	std::vector<double> known;
	for (std::size_t t = 0; t < working.cohort_count(); ++t) {
		if (working.provenance(t, u) != Provenance::Observed) {
			break;
		}
		known.push_back(working.value(t, u));
	}
	return known;
}

std::vector<std::size_t> pending_rows(const FilledMatrix &working, std::size_t u) {
	std::vector<std::size_t> rows;
	for (std::size_t t = 0; t < working.cohort_count(); ++t) {
		if (working.provenance(t, u) == Provenance::Pending) {
			rows.push_back(t);
		}
	}
	return rows;
}

// Closest filled value to the left in the same row, else zero.
double row_carry(const FilledMatrix &working, std::size_t t, std::size_t u) {
	for (std::size_t k = u; k-- > 0;) {
		if (const auto v = working.value_if_set(t, k)) {
			return *v;
		}
	}
	return 0.0;
}

ColumnDiagnostics &start_column(FilledMatrix &working, std::size_t u, std::string method) {
	ColumnDiagnostics diag;
	diag.u = u;
	diag.method = std::move(method);
	working.diagnostics().push_back(std::move(diag));
	return working.diagnostics().back();
}

template <typename Fill>
FilledMatrix fill_all_columns(const CohortMatrix &m, Fill &&fill_column) {
	FilledMatrix working(m);
	for (std::size_t u = 0; u < m.horizon_count(); ++u) {
		if (!pending_rows(working, u).empty()) {
			fill_column(working, u);
		}
	}
	return working;
}

} // namespace

std::string_view to_string(FallbackKind kind) {
	switch (kind) {
	case FallbackKind::Naive: return "naive";
	case FallbackKind::ColumnMean: return "column_mean";
	case FallbackKind::Linear: return "linear";
	}
	return "unknown";
}

std::optional<FallbackKind> parse_fallback_kind(std::string_view text) {
	if (text == "naive") {
		return FallbackKind::Naive;
	}
	if (text == "column_mean") {
		return FallbackKind::ColumnMean;
	}
	if (text == "linear") {
		return FallbackKind::Linear;
	}
	return std::nullopt;
}

FallbackPolicy FallbackPolicy::of(FallbackKind kind) {
	return FallbackPolicy{kind, kind == FallbackKind::Linear ? std::size_t{3} : std::size_t{1}};
}

void FallbackPolicy::validate() const {
	const std::size_t floor = kind == FallbackKind::Linear ? 3 : 1;
	if (min_rows < floor) {
		throw Error(ErrorCode::InvalidConfig, "fallback '" + std::string(to_string(kind)) + "' needs min_rows >= " +
		                                          std::to_string(floor));
	}
}

void fill_column_naive(FilledMatrix &working, std::size_t u) {
	const auto known = known_prefix(working, u);
	start_column(working, u, "naive");
	for (std::size_t t : pending_rows(working, u)) {
		working.set_prediction(t, u, known.empty() ? row_carry(working, t, u) : known.back());
		working.diagnostics().back().predicted_rows.push_back(t);
	}
}

void fill_column_mean(FilledMatrix &working, std::size_t u) {
	const auto known = known_prefix(working, u);
	if (known.empty()) {
		fill_column_naive(working, u);
		return;
	}
	const double mean = std::accumulate(known.begin(), known.end(), 0.0) / static_cast<double>(known.size());
	start_column(working, u, "column_mean");
	for (std::size_t t : pending_rows(working, u)) {
		working.set_prediction(t, u, mean);
		working.diagnostics().back().predicted_rows.push_back(t);
	}
}

void fill_column_linear(FilledMatrix &working, std::size_t u, const CohortCovariates &cov,
                        std::span<const std::string> feature_names) {
	const auto known = known_prefix(working, u);
	if (known.size() < 3) {
		fill_column_naive(working, u);
		return;
	}
	const auto rows = pending_rows(working, u);
	const CohortMatrix &base = working.base();
	std::vector<std::size_t> feature_idx;
	for (const auto &name : feature_names) {
		const auto i = cov.index_of(name);
		if (!i) {
			throw Error(ErrorCode::CovariateMissing, "unknown covariate '" + name + "'");
		}
		feature_idx.push_back(*i);
	}
	const auto n = static_cast<Eigen::Index>(known.size());
	const auto K = static_cast<Eigen::Index>(feature_idx.size());
	const auto features_of = [&](std::size_t t, Eigen::Index k) { return cov.row(base.cohort(t))[feature_idx[static_cast<std::size_t>(k)]]; };

	Eigen::MatrixXd trend(n, 2);
	Eigen::MatrixXd feats(n, K);
	Eigen::VectorXd y(n);
	for (Eigen::Index t = 0; t < n; ++t) {
		trend(t, 0) = 1.0;
		trend(t, 1) = static_cast<double>(t);
		for (Eigen::Index k = 0; k < K; ++k) {
			feats(t, k) = features_of(static_cast<std::size_t>(t), k);
		}
		y(t) = known[static_cast<std::size_t>(t)];
	}
	const auto kept = detail::independent_columns(trend, feats);
	auto &diag = start_column(working, u, "linear");
	for (Eigen::Index k = 0; k < K; ++k) {
		if (std::find(kept.begin(), kept.end(), k) == kept.end()) {
			diag.dropped_features.push_back(feature_names[static_cast<std::size_t>(k)]);
		}
	}
	if (!diag.dropped_features.empty()) {
		diag.message = "collinear covariates dropped";
	}
	Eigen::MatrixXd design(n, 2 + static_cast<Eigen::Index>(kept.size()));
	design.leftCols(2) = trend;
	for (std::size_t j = 0; j < kept.size(); ++j) {
		design.col(2 + static_cast<Eigen::Index>(j)) = feats.col(kept[j]);
	}
	const Eigen::VectorXd coef = detail::ols(design, y);
	for (std::size_t t : rows) {
		double v = coef(0) + coef(1) * static_cast<double>(t);
		for (std::size_t j = 0; j < kept.size(); ++j) {
			v += coef(2 + static_cast<Eigen::Index>(j)) * features_of(t, kept[j]);
		}
		working.set_prediction(t, u, v);
		working.diagnostics().back().predicted_rows.push_back(t);
	}
}

void fill_column_fallback(FilledMatrix &working, std::size_t u, const FallbackPolicy &policy) {
	const auto known = known_prefix(working, u);
	const std::size_t before = working.diagnostics().size();
	if (known.size() < policy.min_rows) {
		fill_column_naive(working, u);
	} else {
		switch (policy.kind) {
		case FallbackKind::Naive: fill_column_naive(working, u); break;
		case FallbackKind::ColumnMean: fill_column_mean(working, u); break;
		case FallbackKind::Linear: fill_column_linear(working, u, CohortCovariates{}, {}); break;
		}
	}
	for (std::size_t i = before; i < working.diagnostics().size(); ++i) {
		working.diagnostics()[i].fallback_used = true;
	}
}

FilledMatrix naive_fill(const CohortMatrix &m) {
	return fill_all_columns(m, [](FilledMatrix &w, std::size_t u) { fill_column_naive(w, u); });
}

FilledMatrix drift_fill(const CohortMatrix &m) {
	return fill_all_columns(m, [](FilledMatrix &w, std::size_t u) {
		const auto known = known_prefix(w, u);
		if (known.size() < 2) {
			fill_column_naive(w, u);
			return;
		}
		const double slope = (known.back() - known.front()) / static_cast<double>(known.size() - 1);
		const std::size_t last_row = known.size() - 1;
		start_column(w, u, "drift");
		for (std::size_t t : pending_rows(w, u)) {
			const auto steps = static_cast<double>(t - last_row);
			w.set_prediction(t, u, known.back() + steps * slope);
			w.diagnostics().back().predicted_rows.push_back(t);
		}
	});
}

FilledMatrix linear_fill(const CohortMatrix &m, const CohortCovariates &cov,
                         std::span<const std::string> feature_names) {
	if (!feature_names.empty()) {
		cov.select(feature_names).require_cover(m);
	}
	return fill_all_columns(m, [&](FilledMatrix &w, std::size_t u) { fill_column_linear(w, u, cov, feature_names); });
}

} // namespace cohort2d
