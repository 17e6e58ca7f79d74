#pragma once

#include "cohort2d/backtest.hpp"
#include "cohort2d/error.hpp"
#include "cohort2d/synth.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cohort2d::cli {

enum ExitCode : int {
	kSuccess = 0,
	kConfigError = 2,
	kDataError = 3,
	kModelError = 4,
	kIoError = 5,
};

int exit_code_for(ErrorCode code);

struct ImportedInput {
	std::string path;
	CohortMonth prediction_month;
};

/// Model block of the config. `kind` is one of 2d, naive, drift, linear.
struct ModelConfig {
	std::string name;
	ModelKind kind = ModelKind::TwoD;
	Forecast2DConfig two_d;
	std::vector<std::string> covariates;

	ModelSpec to_spec() const;
};

struct RunConfig {
	std::optional<std::string> values_path;
	std::optional<std::string> covariates_path;
	std::vector<ImportedInput> imported;
	std::optional<CohortMonth> prediction_month;
	std::optional<std::size_t> horizon_count;
	bool scale = false;
	ModelConfig model;              // forecast
	std::vector<ModelConfig> models; // backtest
	std::optional<CohortMonth> backtest_start;
	std::optional<CohortMonth> backtest_end;
	std::optional<SynthConfig> synth;
	std::string output = "out";
	std::optional<std::uint64_t> seed;
};

/// Parses the config tree. Unknown keys, wrong types and malformed months
/// throw InvalidConfig. Touches no files.
RunConfig parse_run_config(const nlohmann::json &tree);

/// Reads and parses a JSON config file (IoFailure / InvalidConfig).
RunConfig load_run_config(const std::string &path);

/// Command-specific checks, including that referenced input files exist.
void validate_forecast(const RunConfig &cfg);
void validate_backtest(const RunConfig &cfg);
void validate_synth(const RunConfig &cfg);

// Each command validates, computes everything in memory, then writes its
// outputs. Errors surface as cohort2d::Error.
void cmd_forecast(const RunConfig &cfg, std::ostream &diag);
void cmd_backtest(const RunConfig &cfg, std::ostream &diag);
void cmd_synth(const RunConfig &cfg, std::ostream &diag);

/// Full entry point: argument parsing, dispatch, exit-code mapping.
/// Diagnostics go to `diag` as `level=... code=... msg=...` lines.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &diag);

} // namespace cohort2d::cli
