#pragma once

#include "cohort2d/cohort_matrix.hpp"
#include "cohort2d/filled_matrix.hpp"

#include <span>
#include <string>

namespace cohort2d {

enum class FallbackKind { Naive, ColumnMean, Linear };

std::string_view to_string(FallbackKind kind);
std::optional<FallbackKind> parse_fallback_kind(std::string_view text);

/// Model used for a column when the full 2D path cannot run.
struct FallbackPolicy {
	FallbackKind kind = FallbackKind::Naive;
	std::size_t min_rows = 1; // known rows needed before `kind` applies; below it, naive

	static FallbackPolicy of(FallbackKind kind);
	void validate() const;
};

/// Unknown cells take the last known value of their column. A column with no
/// known value carries the row's last available value, else zero.
FilledMatrix naive_fill(const CohortMatrix &m);

/// Per-column straight line through the first and last known values,
/// extended past the known prefix. Columns with fewer than two known values
/// behave like naive_fill.
FilledMatrix drift_fill(const CohortMatrix &m);

/// Per-column ordinary least squares on [1, cohort index, covariates...]. A
/// column with fewer than three known rows falls back to naive. Collinear
/// covariates are dropped (recorded in the column diagnostics).
FilledMatrix linear_fill(const CohortMatrix &m, const CohortCovariates &cov,
                         std::span<const std::string> feature_names = {});

// Column-level fills shared with the 2D forecaster. Each writes every pending
// cell of column u in `working` and appends a ColumnDiagnostics entry.
void fill_column_naive(FilledMatrix &working, std::size_t u);
void fill_column_mean(FilledMatrix &working, std::size_t u);
void fill_column_linear(FilledMatrix &working, std::size_t u, const CohortCovariates &cov,
                        std::span<const std::string> feature_names);
void fill_column_fallback(FilledMatrix &working, std::size_t u, const FallbackPolicy &policy);

} // namespace cohort2d
