#pragma once

#include <Eigen/Dense>

#include <vector>

namespace cohort2d::detail {

/// Least-squares coefficients via column-pivoted QR.
inline Eigen::VectorXd ols(const Eigen::MatrixXd &A, const Eigen::VectorXd &b) {
	return Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(A).solve(b);
}

inline int numeric_rank(const Eigen::MatrixXd &A) {
	if (A.cols() == 0) {
		return 0;
	}
	Eigen::MatrixXd scaled = A;
	for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
		const double norm = scaled.col(j).norm();
		if (norm > 0.0) {
			scaled.col(j) /= norm;
		}
	}
	Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
	qr.setThreshold(1e-10);
	return static_cast<int>(qr.rank());
}

/// Greedy left-to-right selection of columns that raise the rank of `base`
/// (which is always kept). Returns indices into `candidates`.
inline std::vector<Eigen::Index> independent_columns(const Eigen::MatrixXd &base, const Eigen::MatrixXd &candidates) {
	std::vector<Eigen::Index> kept;
	Eigen::MatrixXd current = base;
	int rank = numeric_rank(current);
	for (Eigen::Index j = 0; j < candidates.cols(); ++j) {
		Eigen::MatrixXd trial(current.rows(), current.cols() + 1);
		trial << current, candidates.col(j);
		const int r = numeric_rank(trial);
		if (r > rank) {
			current = std::move(trial);
			rank = r;
			kept.push_back(j);
		}
	}
	return kept;
}

} // namespace cohort2d::detail
