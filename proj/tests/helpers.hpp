#pragma once

#include "cohort2d/cohort_matrix.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testutil {

using cohort2d::CohortMatrix;
using cohort2d::CohortMonth;
using cohort2d::Record;

inline CohortMonth ym(int year, int month) {
	return CohortMonth{year, month};
}

// The 5x5 worked example: cohorts Sep 2023 .. Jan 2024, prediction month Feb 2024.
inline std::vector<Record> table_one_records() {
	const double grid[5][5] = {
	    {26000, 27000, 28000, 29000, 30000},
	    {31000, 32000, 33000, 34000, 0},
	    {27000, 28000, 29000, 0, 0},
	    {29000, 30000, 0, 0, 0},
	    {30000, 0, 0, 0, 0},
	};
	std::vector<Record> rows;
	for (int t = 0; t < 5; ++t) {
		for (int u = 0; u < 5 - t; ++u) {
			rows.push_back({ym(2023, 9) + t, u, grid[t][u]});
		}
	}
	return rows;
}

inline CohortMatrix table_one() {
	cohort2d::LoadOptions opt;
	opt.prediction_month = ym(2024, 2);
	opt.horizon_count = 5;
	return cohort2d::load_records(table_one_records(), opt);
}

// Builds a matrix from a dense grid, masking whatever the prediction month hides.
inline CohortMatrix from_grid(CohortMonth first, const std::vector<std::vector<double>> &grid,
                              CohortMonth prediction_month) {
	const std::size_t T = grid.size();
	const std::size_t U = grid.front().size();
	std::vector<std::optional<double>> values(T * U);
	for (std::size_t t = 0; t < T; ++t) {
		for (std::size_t u = 0; u < U; ++u) {
			if ((first + static_cast<int>(t)).index() + static_cast<int>(u) < prediction_month.index()) {
				values[t * U + u] = grid[t][u];
			}
		}
	}
	return CohortMatrix(first, T, U, prediction_month, std::move(values));
}

// Scratch directory removed on destruction.
class TempDir {
public:
	explicit TempDir(const std::string &tag) {
		std::random_device rd;
		path_ = std::filesystem::temp_directory_path() / ("cohort2d_" + tag + "_" + std::to_string(rd()));
		std::filesystem::create_directories(path_);
	}
	~TempDir() {
		std::error_code ec;
		std::filesystem::remove_all(path_, ec);
	}
	TempDir(const TempDir &) = delete;
	TempDir &operator=(const TempDir &) = delete;

	const std::filesystem::path &path() const { return path_; }
	std::string file(const std::string &name) const { return (path_ / name).string(); }

private:
	std::filesystem::path path_;
};

} // namespace testutil
