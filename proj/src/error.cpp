#include "cohort2d/error.hpp"

namespace cohort2d {

std::string_view to_string(ErrorCode code) {
	switch (code) {
	case ErrorCode::MalformedRow: return "MalformedRow";
	case ErrorCode::DuplicateCell: return "DuplicateCell";
	case ErrorCode::StaircaseGap: return "StaircaseGap";
	case ErrorCode::NegativeValue: return "NegativeValue";
	case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
	case ErrorCode::MissingDiagonalCell: return "MissingDiagonalCell";
	case ErrorCode::ConflictingValue: return "ConflictingValue";
	case ErrorCode::CovariateMissing: return "CovariateMissing";
	case ErrorCode::InvalidCovariates: return "InvalidCovariates";
	case ErrorCode::SeriesTooShort: return "SeriesTooShort";
	case ErrorCode::DimensionMismatch: return "DimensionMismatch";
	case ErrorCode::NonFiniteValue: return "NonFiniteValue";
	case ErrorCode::InsufficientData: return "InsufficientData";
	case ErrorCode::SingularDesign: return "SingularDesign";
	case ErrorCode::InsufficientHistory: return "InsufficientHistory";
	case ErrorCode::NoFeasibleOrder: return "NoFeasibleOrder";
	case ErrorCode::ColumnUnfittable: return "ColumnUnfittable";
	case ErrorCode::PreviousColumnIncomplete: return "PreviousColumnIncomplete";
	case ErrorCode::EmptyInput: return "EmptyInput";
	case ErrorCode::LengthMismatch: return "LengthMismatch";
	case ErrorCode::EmptySlice: return "EmptySlice";
	case ErrorCode::InvalidPlan: return "InvalidPlan";
	case ErrorCode::ModelFailure: return "ModelFailure";
	case ErrorCode::InvalidConfig: return "InvalidConfig";
	case ErrorCode::IoFailure: return "IoFailure";
	}
	return "Unknown";
}

} // namespace cohort2d
