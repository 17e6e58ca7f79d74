#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cohort2d {

enum class ErrorCode {
	// ingestion and matrix structure
	MalformedRow,
	DuplicateCell,
	StaircaseGap,
	NegativeValue,
	IndexOutOfRange,
	MissingDiagonalCell,
	ConflictingValue,
	CovariateMissing,
	InvalidCovariates,
	// estimation
	SeriesTooShort,
	DimensionMismatch,
	NonFiniteValue,
	InsufficientData,
	SingularDesign,
	InsufficientHistory,
	NoFeasibleOrder,
	// 2D filling
	ColumnUnfittable,
	PreviousColumnIncomplete,
	// metrics and reporting
	EmptyInput,
	LengthMismatch,
	EmptySlice,
	InvalidPlan,
	ModelFailure,
	// configuration and I/O
	InvalidConfig,
	IoFailure,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code. Every library failure is
/// reported through this type so the CLI can map it to an exit status.
class Error : public std::runtime_error {
public:
	Error(ErrorCode code, const std::string &message)
	    : std::runtime_error(message), code_(code) {}

	ErrorCode code() const noexcept { return code_; }

private:
	ErrorCode code_;
};

} // namespace cohort2d
