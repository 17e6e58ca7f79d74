#pragma once

#include "cohort2d/arimax.hpp"
#include "cohort2d/cohort_matrix.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cohort2d {

enum class Provenance { Observed, Predicted, Pending };

std::string_view to_string(Provenance p);

/// How one column's unknown cells were produced.
struct ColumnDiagnostics {
	std::size_t u = 0;
	std::vector<std::size_t> predicted_rows;
	std::string method; // "arimax", "naive", "column_mean", "linear", "drift"
	std::optional<arimax::ModelOrder> order;
	bool fallback_used = false;
	bool converged = true;
	std::size_t floored = 0; // predictions raised to zero
	std::vector<std::string> dropped_features;
	std::string message;
};

/// A CohortMatrix whose unknown cells are being (or have been) predicted.
/// Observed cells are copied verbatim from the base and can never be
/// overwritten; each pending cell may be written exactly once.
class FilledMatrix {
public:
	explicit FilledMatrix(CohortMatrix base);

	const CohortMatrix &base() const noexcept { return base_; }
	std::size_t cohort_count() const noexcept { return base_.cohort_count(); }
	std::size_t horizon_count() const noexcept { return base_.horizon_count(); }

	std::optional<double> value_if_set(std::size_t t, std::size_t u) const;
	/// Throws PreviousColumnIncomplete when the cell is still pending.
	double value(std::size_t t, std::size_t u) const;
	Provenance provenance(std::size_t t, std::size_t u) const;
	/// Months between the prediction month and the cell's event month, counting
	/// the prediction month as 1; 0 for observed cells.
	int horizon(std::size_t t, std::size_t u) const;

	void set_prediction(std::size_t t, std::size_t u, double value);

	bool is_complete() const noexcept;
	std::size_t predicted_count() const noexcept;

	std::vector<ColumnDiagnostics> &diagnostics() noexcept { return diagnostics_; }
	const std::vector<ColumnDiagnostics> &diagnostics() const noexcept { return diagnostics_; }
	/// Diagnostics for column u, if that column had anything to predict.
	const ColumnDiagnostics *column_diagnostics(std::size_t u) const noexcept;

private:
	std::size_t index(std::size_t t, std::size_t u) const;

	CohortMatrix base_;
	std::vector<double> values_;
	std::vector<Provenance> provenance_;
	std::vector<ColumnDiagnostics> diagnostics_;
};

/// Wide CSV of the completed grid, same layout as the cohort matrix CSV.
std::string to_wide_csv(const FilledMatrix &m);

/// `cohort_month,u,provenance,horizon,fallback_used`, one row per cell.
std::string to_provenance_csv(const FilledMatrix &m);

} // namespace cohort2d
