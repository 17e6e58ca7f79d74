#include "cohort2d/filled_matrix.hpp"

#include "cohort2d/csv.hpp"
#include "cohort2d/error.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace cohort2d {

std::string_view to_string(Provenance p) {
	switch (p) {
	case Provenance::Observed: return "OBSERVED";
	case Provenance::Predicted: return "PREDICTED";
	case Provenance::Pending: return "PENDING";
	}
	return "UNKNOWN";
}

FilledMatrix::FilledMatrix(CohortMatrix base) : base_(std::move(base)) {
	const std::size_t n = base_.values().size();
	values_.assign(n, 0.0);
	provenance_.assign(n, Provenance::Pending);
	for (std::size_t i = 0; i < n; ++i) {
		if (const auto &v = base_.values()[i]) {
			values_[i] = *v;
			provenance_[i] = Provenance::Observed;
		}
	}
}

std::size_t FilledMatrix::index(std::size_t t, std::size_t u) const {
	if (t >= cohort_count() || u >= horizon_count()) {
		throw Error(ErrorCode::IndexOutOfRange, "cell (" + std::to_string(t) + ", " + std::to_string(u) + ") out of range");
	}
	return t * horizon_count() + u;
}

std::optional<double> FilledMatrix::value_if_set(std::size_t t, std::size_t u) const {
	const auto i = index(t, u);
	if (provenance_[i] == Provenance::Pending) {
		return std::nullopt;
	}
	return values_[i];
}

double FilledMatrix::value(std::size_t t, std::size_t u) const {
	const auto v = value_if_set(t, u);
	if (!v) {
		throw Error(ErrorCode::PreviousColumnIncomplete,
		            "cell (" + base_.cohort(t).to_string() + ", u=" + std::to_string(u) + ") has not been filled");
	}
	return *v;
}

Provenance FilledMatrix::provenance(std::size_t t, std::size_t u) const {
	return provenance_[index(t, u)];
}

int FilledMatrix::horizon(std::size_t t, std::size_t u) const {
	if (provenance(t, u) == Provenance::Observed) {
		return 0;
	}
	return (base_.cohort(t).index() + static_cast<int>(u)) - base_.prediction_month().index() + 1;
}

void FilledMatrix::set_prediction(std::size_t t, std::size_t u, double value) {
	const auto i = index(t, u);
	if (provenance_[i] != Provenance::Pending) {
		throw Error(ErrorCode::ConflictingValue,
		            "cell (" + base_.cohort(t).to_string() + ", u=" + std::to_string(u) + ") is already set");
	}
	if (!std::isfinite(value)) {
		throw Error(ErrorCode::NonFiniteValue,
		            "non-finite prediction for (" + base_.cohort(t).to_string() + ", u=" + std::to_string(u) + ")");
	}
	values_[i] = value;
	provenance_[i] = Provenance::Predicted;
}

bool FilledMatrix::is_complete() const noexcept {
	return std::none_of(provenance_.begin(), provenance_.end(), [](Provenance p) { return p == Provenance::Pending; });
}

std::size_t FilledMatrix::predicted_count() const noexcept {
	return static_cast<std::size_t>(
	    std::count(provenance_.begin(), provenance_.end(), Provenance::Predicted));
}

const ColumnDiagnostics *FilledMatrix::column_diagnostics(std::size_t u) const noexcept {
	for (const auto &d : diagnostics_) {
		if (d.u == u) {
			return &d;
		}
	}
	return nullptr;
}

std::string to_wide_csv(const FilledMatrix &m) {
	std::string out = "cohort_month";
	for (std::size_t u = 0; u < m.horizon_count(); ++u) {
		out += ",u" + std::to_string(u);
	}
	out += "\n";
	for (std::size_t t = 0; t < m.cohort_count(); ++t) {
		out += m.base().cohort(t).to_string();
		for (std::size_t u = 0; u < m.horizon_count(); ++u) {
			out += ",";
			if (const auto v = m.value_if_set(t, u)) {
				out += csv::format_double(*v);
			}
		}
		out += "\n";
	}
	return out;
}

std::string to_provenance_csv(const FilledMatrix &m) {
	std::string out = "cohort_month,u,provenance,horizon,fallback_used\n";
	for (std::size_t t = 0; t < m.cohort_count(); ++t) {
		for (std::size_t u = 0; u < m.horizon_count(); ++u) {
			const auto p = m.provenance(t, u);
			const auto *diag = m.column_diagnostics(u);
			const bool fallback = p == Provenance::Predicted && diag && diag->fallback_used;
			out += m.base().cohort(t).to_string() + "," + std::to_string(u) + "," + std::string(to_string(p)) + "," +
			       std::to_string(m.horizon(t, u)) + "," + (fallback ? "true" : "false") + "\n";
		}
	}
	return out;
}

} // namespace cohort2d
