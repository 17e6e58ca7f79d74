#include "cohort2d/cli.hpp"

#include "cohort2d/csv.hpp"
#include "cohort2d/forecaster2d.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace cohort2d::cli {

namespace {

[[noreturn]] void config_error(const std::string &msg) {
	throw Error(ErrorCode::InvalidConfig, msg);
}

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported as unknown.
class Section {
public:
	Section(const nlohmann::json &node, std::string path) : node_(node), path_(std::move(path)) {
		if (!node_.is_object()) {
			config_error(where() + " must be an object");
		}
	}

	~Section() = default;
	Section(const Section &) = delete;
	Section &operator=(const Section &) = delete;

	bool has(const std::string &key) {
		seen_.insert(key);
		return node_.contains(key) && !node_.at(key).is_null();
	}

	const nlohmann::json &at(const std::string &key) {
		seen_.insert(key);
		return node_.at(key);
	}

	std::string key_path(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

	std::optional<std::string> string(const std::string &key) {
		if (!has(key)) {
			return std::nullopt;
		}
		const auto &v = at(key);
		if (!v.is_string()) {
			config_error(key_path(key) + " must be a string");
		}
		return v.get<std::string>();
	}

	std::optional<double> number(const std::string &key) {
		if (!has(key)) {
			return std::nullopt;
		}
		const auto &v = at(key);
		if (!v.is_number()) {
			config_error(key_path(key) + " must be a number");
		}
		return v.get<double>();
	}

	std::optional<std::int64_t> integer(const std::string &key) {
		if (!has(key)) {
			return std::nullopt;
		}
		const auto &v = at(key);
		if (!v.is_number_integer()) {
			config_error(key_path(key) + " must be an integer");
		}
		return v.get<std::int64_t>();
	}

	std::optional<std::size_t> count(const std::string &key) {
		const auto v = integer(key);
		if (v && *v < 0) {
			config_error(key_path(key) + " must be non-negative");
		}
		return v ? std::optional<std::size_t>(static_cast<std::size_t>(*v)) : std::nullopt;
	}

	std::optional<bool> boolean(const std::string &key) {
		if (!has(key)) {
			return std::nullopt;
		}
		const auto &v = at(key);
		if (!v.is_boolean()) {
			config_error(key_path(key) + " must be true or false");
		}
		return v.get<bool>();
	}

	std::optional<CohortMonth> month(const std::string &key) {
		const auto text = string(key);
		if (!text) {
			return std::nullopt;
		}
		const auto m = CohortMonth::parse(*text);
		if (!m) {
			config_error(key_path(key) + " must be a YYYY-MM month, got '" + *text + "'");
		}
		return m;
	}

	std::optional<std::vector<std::string>> strings(const std::string &key) {
		if (!has(key)) {
			return std::nullopt;
		}
		const auto &v = at(key);
		if (!v.is_array()) {
			config_error(key_path(key) + " must be a list of strings");
		}
		std::vector<std::string> out;
		for (const auto &item : v) {
			if (!item.is_string()) {
				config_error(key_path(key) + " must be a list of strings");
			}
			out.push_back(item.get<std::string>());
		}
		return out;
	}

	void reject_unknown() const {
		for (const auto &[key, value] : node_.items()) {
			if (!seen_.contains(key)) {
				config_error("unknown key " + key_path(key));
			}
		}
	}

private:
	std::string where() const { return path_.empty() ? "config" : path_; }

	const nlohmann::json &node_;
	std::string path_;
	std::set<std::string> seen_;
};

std::optional<ModelKind> parse_kind(std::string_view text) {
	for (auto kind : {ModelKind::TwoD, ModelKind::Naive, ModelKind::Drift, ModelKind::Linear}) {
		if (text == to_string(kind)) {
			return kind;
		}
	}
	return std::nullopt;
}

std::vector<arimax::ModelOrder> parse_order_grid(const nlohmann::json &node, const std::string &path) {
	if (!node.is_array() || node.empty()) {
		config_error(path + " must be a non-empty list of [p, d, q] triples");
	}
	std::vector<arimax::ModelOrder> grid;
	for (const auto &item : node) {
		if (!item.is_array() || item.size() != 3) {
			config_error(path + " entries must be [p, d, q]");
		}
		int v[3];
		for (std::size_t i = 0; i < 3; ++i) {
			if (!item[i].is_number_integer() || item[i].get<int>() < 0) {
				config_error(path + " entries must be non-negative integers");
			}
			v[i] = item[i].get<int>();
		}
		grid.push_back({v[0], v[1], v[2]});
	}
	return grid;
}

ModelConfig parse_model(const nlohmann::json &node, const std::string &path, std::string default_name) {
	Section s(node, path);
	ModelConfig mc;
	if (const auto kind = s.string("kind")) {
		const auto parsed = parse_kind(*kind);
		if (!parsed) {
			config_error(s.key_path("kind") + " must be one of 2d, naive, drift, linear");
		}
		mc.kind = *parsed;
	}
	mc.name = s.string("name").value_or(default_name.empty() ? std::string(to_string(mc.kind)) : default_name);
	if (mc.name.empty()) {
		config_error(s.key_path("name") + " must not be empty");
	}
	mc.covariates = s.strings("covariates").value_or(std::vector<std::string>{});

	auto &two_d = mc.two_d;
	two_d.covariate_names = mc.covariates;
	if (s.has("order_grid")) {
		two_d.estimation.order_grid = parse_order_grid(s.at("order_grid"), s.key_path("order_grid"));
	}
	if (const auto v = s.integer("max_iterations")) {
		two_d.estimation.max_iterations = static_cast<int>(*v);
	}
	if (const auto v = s.number("gradient_tolerance")) {
		two_d.estimation.gradient_tolerance = *v;
	}
	if (const auto v = s.boolean("enforce_stationarity")) {
		two_d.estimation.enforce_stationarity = *v;
	}
	if (const auto v = s.number("min_obs_per_param")) {
		two_d.estimation.min_obs_per_param = *v;
	}
	if (const auto v = s.string("fallback")) {
		const auto kind = parse_fallback_kind(*v);
		if (!kind) {
			config_error(s.key_path("fallback") + " must be one of naive, column_mean, linear");
		}
		two_d.fallback = FallbackPolicy::of(*kind);
	}
	if (const auto v = s.boolean("include_prev_column")) {
		two_d.include_prev_column = *v;
	}
	if (const auto v = s.boolean("include_calendar_trend")) {
		two_d.include_calendar_trend = *v;
	}
	s.reject_unknown();
	if (mc.kind != ModelKind::TwoD) {
		const bool two_d_only = node.contains("order_grid") || node.contains("max_iterations") ||
		                        node.contains("gradient_tolerance") || node.contains("enforce_stationarity") ||
		                        node.contains("min_obs_per_param") || node.contains("fallback") ||
		                        node.contains("include_prev_column") || node.contains("include_calendar_trend");
		if (two_d_only) {
			config_error(path + ": estimation settings only apply to kind 2d");
		}
		if (!mc.covariates.empty() && mc.kind != ModelKind::Linear) {
			config_error(s.key_path("covariates") + " only applies to kinds 2d and linear");
		}
	}
	two_d.validate();
	return mc;
}

SynthConfig parse_synth(const nlohmann::json &node) {
	Section s(node, "synth");
	SynthConfig sc;
	if (const auto v = s.count("n_cohorts")) {
		sc.n_cohorts = *v;
	}
	if (const auto v = s.count("horizon_count")) {
		sc.horizon_count = *v;
	}
	if (const auto v = s.number("base_level")) {
		sc.base_level = *v;
	}
	if (const auto v = s.number("cohort_trend")) {
		sc.cohort_trend = *v;
	}
	if (const auto v = s.number("decay")) {
		sc.decay = *v;
	}
	if (const auto v = s.number("prev_column_rho")) {
		sc.prev_column_rho = *v;
	}
	if (const auto v = s.number("noise_sigma")) {
		sc.noise_sigma = *v;
	}
	if (const auto v = s.number("covariate_effect")) {
		sc.covariate_effect = *v;
	}
	if (const auto v = s.integer("seed")) {
		sc.seed = static_cast<std::uint64_t>(*v);
	}
	if (const auto v = s.month("start_month")) {
		sc.start_month = *v;
	}
	s.reject_unknown();
	sc.validate();
	return sc;
}

void require_file(const std::string &path, const std::string &what) {
	std::error_code ec;
	if (!std::filesystem::is_regular_file(path, ec)) {
		config_error(what + " '" + path + "' does not exist");
	}
}

void require_covariates(const RunConfig &cfg, const ModelConfig &mc) {
	if (!mc.covariates.empty() && !cfg.covariates_path) {
		config_error("model '" + mc.name + "' uses covariates but input.covariates is not set");
	}
}

void check_inputs(const RunConfig &cfg) {
	if (cfg.values_path) {
		require_file(*cfg.values_path, "input.values");
	}
	if (cfg.covariates_path) {
		require_file(*cfg.covariates_path, "input.covariates");
	}
	for (const auto &imp : cfg.imported) {
		require_file(imp.path, "imported predictions");
	}
}

CohortCovariates load_covariates(const RunConfig &cfg) {
	return cfg.covariates_path ? read_covariates_csv(*cfg.covariates_path) : CohortCovariates{};
}

void write_outputs(const std::string &dir, const std::vector<std::pair<std::string, std::string>> &files) {
	std::error_code ec;
	std::filesystem::create_directories(dir, ec);
	if (ec) {
		throw Error(ErrorCode::IoFailure, "cannot create output directory '" + dir + "': " + ec.message());
	}
	for (const auto &[name, content] : files) {
		csv::write_file((std::filesystem::path(dir) / name).string(), content);
	}
}

nlohmann::json column_json(const ColumnDiagnostics &d) {
	nlohmann::json j;
	j["u"] = d.u;
	j["method"] = d.method;
	j["order"] = d.order ? nlohmann::json(d.order->to_string()) : nlohmann::json(nullptr);
	j["predicted_cells"] = d.predicted_rows.size();
	j["fallback_used"] = d.fallback_used;
	j["converged"] = d.converged;
	j["floored"] = d.floored;
	j["dropped_features"] = d.dropped_features;
	j["message"] = d.message;
	return j;
}

nlohmann::json synth_json(const SynthConfig &sc) {
	nlohmann::json j;
	j["n_cohorts"] = sc.n_cohorts;
	j["horizon_count"] = sc.horizon_count;
	j["base_level"] = sc.base_level;
	j["cohort_trend"] = sc.cohort_trend;
	j["decay"] = sc.decay;
	j["prev_column_rho"] = sc.prev_column_rho;
	j["noise_sigma"] = sc.noise_sigma;
	j["covariate_effect"] = sc.covariate_effect;
	j["seed"] = sc.seed;
	j["start_month"] = sc.start_month.to_string();
	return j;
}

// Resolved model settings, echoed into the backtest manifest.
nlohmann::json model_json(const ModelSpec &spec) {
	nlohmann::json j;
	j["name"] = spec.name;
	j["kind"] = std::string(to_string(spec.kind));
	if (spec.kind == ModelKind::TwoD) {
		const auto &c = spec.two_d;
		std::vector<std::string> grid;
		for (const auto &o : c.estimation.order_grid) {
			grid.push_back(o.to_string());
		}
		j["covariates"] = c.covariate_names;
		j["order_grid"] = grid;
		j["max_iterations"] = c.estimation.max_iterations;
		j["gradient_tolerance"] = c.estimation.gradient_tolerance;
		j["enforce_stationarity"] = c.estimation.enforce_stationarity;
		j["min_obs_per_param"] = c.estimation.min_obs_per_param;
		j["fallback"] = std::string(to_string(c.fallback.kind));
		j["include_prev_column"] = c.include_prev_column;
		j["include_calendar_trend"] = c.include_calendar_trend;
	} else if (spec.kind == ModelKind::Linear) {
		j["covariates"] = spec.feature_names;
	} else if (spec.kind == ModelKind::Imported) {
		j["prediction_month"] = spec.imported_month ? spec.imported_month->to_string() : "";
		j["rows"] = spec.imported.size();
	}
	return j;
}

void emit(std::ostream &diag, const std::string &level, const std::string &code, const std::string &msg) {
	diag << Diagnostic{level, code, msg}.to_line() << '\n';
}

} // namespace

int exit_code_for(ErrorCode code) {
	switch (code) {
	case ErrorCode::InvalidConfig:
	case ErrorCode::InvalidPlan: return kConfigError;
	case ErrorCode::IoFailure: return kIoError;
	case ErrorCode::MalformedRow:
	case ErrorCode::DuplicateCell:
	case ErrorCode::StaircaseGap:
	case ErrorCode::NegativeValue:
	case ErrorCode::IndexOutOfRange:
	case ErrorCode::MissingDiagonalCell:
	case ErrorCode::ConflictingValue:
	case ErrorCode::CovariateMissing:
	case ErrorCode::InvalidCovariates:
	case ErrorCode::EmptyInput:
	case ErrorCode::LengthMismatch:
	case ErrorCode::EmptySlice: return kDataError;
	case ErrorCode::SeriesTooShort:
	case ErrorCode::DimensionMismatch:
	case ErrorCode::NonFiniteValue:
	case ErrorCode::InsufficientData:
	case ErrorCode::SingularDesign:
	case ErrorCode::InsufficientHistory:
	case ErrorCode::NoFeasibleOrder:
	case ErrorCode::ColumnUnfittable:
	case ErrorCode::PreviousColumnIncomplete:
	case ErrorCode::ModelFailure: return kModelError;
	}
	return kModelError;
}

ModelSpec ModelConfig::to_spec() const {
	if (kind == ModelKind::TwoD) {
		return ModelSpec::two_d_model(name, two_d);
	}
	return ModelSpec::baseline(name, kind, kind == ModelKind::Linear ? covariates : std::vector<std::string>{});
}

RunConfig parse_run_config(const nlohmann::json &tree) {
	Section root(tree, "");
	RunConfig cfg;
	if (root.has("input")) {
		Section input(root.at("input"), "input");
		cfg.values_path = input.string("values");
		cfg.covariates_path = input.string("covariates");
		if (input.has("imported")) {
			const auto &list = input.at("imported");
			if (!list.is_array()) {
				config_error("input.imported must be a list");
			}
			for (std::size_t i = 0; i < list.size(); ++i) {
				Section item(list[i], "input.imported[" + std::to_string(i) + "]");
				const auto path = item.string("path");
				const auto month = item.month("prediction_month");
				if (!path || !month) {
					config_error("input.imported entries need path and prediction_month");
				}
				item.reject_unknown();
				cfg.imported.push_back({*path, *month});
			}
		}
		input.reject_unknown();
	}
	cfg.prediction_month = root.month("prediction_month");
	cfg.horizon_count = root.count("horizon_count");
	if (cfg.horizon_count && *cfg.horizon_count == 0) {
		config_error("horizon_count must be at least 1");
	}
	cfg.scale = root.boolean("scale").value_or(false);
	if (root.has("model")) {
		cfg.model = parse_model(root.at("model"), "model", "");
	} else {
		cfg.model.name = "2d";
	}
	if (root.has("models")) {
		const auto &list = root.at("models");
		if (!list.is_array()) {
			config_error("models must be a list");
		}
		std::set<std::string> names;
		for (std::size_t i = 0; i < list.size(); ++i) {
			auto mc = parse_model(list[i], "models[" + std::to_string(i) + "]", "");
			if (!names.insert(mc.name).second) {
				config_error("duplicate model name '" + mc.name + "'");
			}
			cfg.models.push_back(std::move(mc));
		}
	}
	if (root.has("backtest")) {
		Section bt(root.at("backtest"), "backtest");
		cfg.backtest_start = bt.month("start");
		cfg.backtest_end = bt.month("end");
		bt.reject_unknown();
	}
	if (root.has("synth")) {
		cfg.synth = parse_synth(root.at("synth"));
	}
	if (const auto out = root.string("output")) {
		if (out->empty()) {
			config_error("output must not be empty");
		}
		cfg.output = *out;
	}
	if (const auto seed = root.integer("seed")) {
		cfg.seed = static_cast<std::uint64_t>(*seed);
	}
	root.reject_unknown();
	return cfg;
}

RunConfig load_run_config(const std::string &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw Error(ErrorCode::IoFailure, "cannot open config '" + path + "'");
	}
	std::stringstream buffer;
	buffer << in.rdbuf();
	nlohmann::json tree;
	try {
		tree = nlohmann::json::parse(buffer.str());
	} catch (const nlohmann::json::parse_error &e) {
		config_error("config '" + path + "' is not valid JSON: " + e.what());
	}
	return parse_run_config(tree);
}

void validate_forecast(const RunConfig &cfg) {
	if (!cfg.values_path) {
		config_error("forecast needs input.values");
	}
	if (!cfg.imported.empty() || !cfg.models.empty() || cfg.backtest_start || cfg.backtest_end) {
		config_error("forecast takes a single model block; imported, models and backtest are for backtest");
	}
	require_covariates(cfg, cfg.model);
	check_inputs(cfg);
}

void validate_backtest(const RunConfig &cfg) {
	if (!cfg.values_path && !cfg.synth) {
		config_error("backtest needs input.values or a synth block");
	}
	if (cfg.values_path && cfg.synth) {
		config_error("backtest takes input.values or a synth block, not both");
	}
	if (cfg.synth && cfg.covariates_path) {
		config_error("synth truth brings its own covariates; drop input.covariates");
	}
	if (cfg.prediction_month) {
		config_error("prediction_month applies to forecast; use backtest.start and backtest.end");
	}
	for (const auto &mc : cfg.models) {
		if (!cfg.synth) {
			require_covariates(cfg, mc);
		}
	}
	check_inputs(cfg);
}

void validate_synth(const RunConfig &cfg) {
	if (cfg.values_path || cfg.covariates_path || !cfg.imported.empty()) {
		config_error("synth takes no input files");
	}
	if (cfg.prediction_month) {
		config_error("prediction_month does not apply to synth");
	}
}

void cmd_forecast(const RunConfig &cfg, std::ostream &diag) {
	validate_forecast(cfg);
	LoadOptions options;
	options.prediction_month = cfg.prediction_month;
	options.horizon_count = cfg.horizon_count;
	options.max_scale = cfg.scale;
	const CohortMatrix m = read_values_csv(*cfg.values_path, options);
	const CohortCovariates cov = load_covariates(cfg);
	if (!cfg.model.covariates.empty()) {
		cov.select(cfg.model.covariates).require_cover(m);
	}

	const FilledMatrix filled = run_model(cfg.model.to_spec(), m, cov);

	nlohmann::json columns = nlohmann::json::array();
	for (const auto &d : filled.diagnostics()) {
		columns.push_back(column_json(d));
		if (d.fallback_used) {
			emit(diag, "warn", "Fallback", "column " + std::to_string(d.u) + " used " + d.method + ": " + d.message);
		}
	}
	nlohmann::json manifest;
	manifest["version"] = std::string(kVersion);
	manifest["command"] = "forecast";
	manifest["model"] = cfg.model.name;
	manifest["kind"] = std::string(to_string(cfg.model.kind));
	manifest["prediction_month"] = m.prediction_month().to_string();
	manifest["cohort_count"] = m.cohort_count();
	manifest["horizon_count"] = m.horizon_count();
	manifest["observed_count"] = m.known_count();
	manifest["predicted_count"] = filled.predicted_count();
	manifest["scaled"] = cfg.scale;
	manifest["scale_factor"] = m.scale_factor();
	manifest["columns"] = columns;

	write_outputs(cfg.output, {
	                              {"filled.csv", to_wide_csv(filled)},
	                              {"provenance.csv", to_provenance_csv(filled)},
	                              {"manifest.json", manifest.dump(2) + "\n"},
	                          });
}

void cmd_backtest(const RunConfig &cfg, std::ostream &diag) {
	validate_backtest(cfg);
	std::optional<CohortMatrix> truth;
	CohortCovariates cov;
	nlohmann::json source;
	if (cfg.synth) {
		SynthConfig sc = *cfg.synth;
		if (cfg.seed) {
			sc.seed = *cfg.seed;
		}
		auto data = generate(sc);
		truth = std::move(data.truth);
		cov = std::move(data.covariates);
		source["synth"] = synth_json(sc);
	} else {
		LoadOptions options;
		options.horizon_count = cfg.horizon_count;
		truth = read_values_csv(*cfg.values_path, options);
		cov = load_covariates(cfg);
		source["values"] = *cfg.values_path;
		if (cfg.covariates_path) {
			source["covariates"] = *cfg.covariates_path;
		}
	}
	if (cfg.scale) {
		truth = max_scaled(*truth);
	}

	const std::size_t U = std::min(cfg.horizon_count.value_or(12), truth->horizon_count());
	const CohortMonth first = truth->first_cohort();
	const CohortMonth last_cohort = truth->cohort(truth->cohort_count() - 1);
	const CohortMonth latest_end = std::min(truth->prediction_month(), last_cohort + 1);
	const CohortMonth end = cfg.backtest_end.value_or(latest_end);
	// Default: the last twelve months, but not before every column has a known
	// cell (earlier months leave the 2D model with an unfittable column).
	const CohortMonth every_column = first + static_cast<int>(U) <= end ? first + static_cast<int>(U) : first + 2;
	const CohortMonth start = cfg.backtest_start.value_or(std::max(every_column, end - 11));

	std::vector<ModelSpec> models;
	if (cfg.models.empty()) {
		models.push_back(ModelSpec::two_d_model("2d"));
		models.push_back(ModelSpec::baseline("naive", ModelKind::Naive));
		models.push_back(ModelSpec::baseline("linear", ModelKind::Linear));
	}
	for (const auto &mc : cfg.models) {
		models.push_back(mc.to_spec());
	}
	for (const auto &imp : cfg.imported) {
		for (auto &spec : imported_models(read_imported_csv(imp.path), imp.prediction_month)) {
			models.push_back(std::move(spec));
		}
	}

	nlohmann::json echo;
	echo["source"] = source;
	echo["start"] = start.to_string();
	echo["end"] = end.to_string();
	echo["horizon_count"] = U;
	echo["scale"] = cfg.scale;
	echo["models"] = nlohmann::json::array();
	for (const auto &spec : models) {
		echo["models"].push_back(model_json(spec));
	}

	BacktestPlan plan{*truth, cov, start, end, std::move(models), U};
	const BacktestReport report = run(plan);
	for (const auto &d : report.diagnostics) {
		diag << d.to_line() << '\n';
	}
	nlohmann::json extra;
	extra["command"] = "backtest";
	extra["config"] = echo;
	extra["seed"] = cfg.synth ? source["synth"]["seed"] : nlohmann::json(nullptr);
	emit_report(report, cfg.output, extra);
}

void cmd_synth(const RunConfig &cfg, std::ostream &) {
	validate_synth(cfg);
	SynthConfig sc = cfg.synth.value_or(SynthConfig{});
	if (cfg.seed) {
		sc.seed = *cfg.seed;
	}
	if (cfg.horizon_count) {
		sc.horizon_count = *cfg.horizon_count;
	}
	sc.validate();
	const SynthData data = generate(sc);

	nlohmann::json manifest;
	manifest["version"] = std::string(kVersion);
	manifest["command"] = "synth";
	manifest.update(synth_json(sc));
	manifest["prediction_month"] = data.truth.prediction_month().to_string();

	write_outputs(cfg.output, {
	                              {"values.csv", to_long_csv(data.truth)},
	                              {"covariates.csv", to_covariates_csv(data.covariates)},
	                              {"manifest.json", manifest.dump(2) + "\n"},
	                          });
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &diag) {
	CLI::App app{"Cohort-matrix forecasting with per-column ARIMAX models", "cohort2d"};
	app.require_subcommand(1);
	app.set_version_flag("--version", std::string(kVersion));

	struct Flags {
		std::string config;
		std::optional<std::string> out;
		std::optional<std::uint64_t> seed;
		std::optional<std::string> prediction_month;
	};
	Flags flags;
	const auto add_flags = [&flags](CLI::App *sub, bool config_required) {
		auto *opt = sub->add_option("-c,--config", flags.config, "JSON run configuration");
		if (config_required) {
			opt->required();
		}
		sub->add_option("-o,--out", flags.out, "output directory (overrides config)");
		sub->add_option("--seed", flags.seed, "random seed (overrides config)");
		sub->add_option("--prediction-month", flags.prediction_month, "YYYY-MM (forecast only)");
	};
	auto *forecast = app.add_subcommand("forecast", "fill the unknown cells of a cohort matrix");
	auto *backtest = app.add_subcommand("backtest", "rolling-origin evaluation of several models");
	auto *synth = app.add_subcommand("synth", "write a synthetic cohort matrix and covariates");
	add_flags(forecast, true);
	add_flags(backtest, true);
	add_flags(synth, false);

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp &e) {
		out << app.help();
		return kSuccess;
	} catch (const CLI::CallForVersion &e) {
		out << kVersion << '\n';
		return kSuccess;
	} catch (const CLI::ParseError &e) {
		emit(diag, "error", "InvalidArguments", e.what());
		return kConfigError;
	}

	try {
		RunConfig cfg = flags.config.empty() ? RunConfig{} : load_run_config(flags.config);
		if (flags.out) {
			if (flags.out->empty()) {
				config_error("--out must not be empty");
			}
			cfg.output = *flags.out;
		}
		if (flags.seed) {
			cfg.seed = *flags.seed;
		}
		if (flags.prediction_month) {
			const auto m = CohortMonth::parse(*flags.prediction_month);
			if (!m) {
				config_error("--prediction-month must be YYYY-MM, got '" + *flags.prediction_month + "'");
			}
			cfg.prediction_month = m;
		}
		if (forecast->parsed()) {
			cmd_forecast(cfg, diag);
		} else if (backtest->parsed()) {
			cmd_backtest(cfg, diag);
		} else {
			cmd_synth(cfg, diag);
		}
	} catch (const Error &e) {
		emit(diag, "error", std::string(to_string(e.code())), e.what());
		return exit_code_for(e.code());
	} catch (const std::exception &e) {
		emit(diag, "error", "Internal", e.what());
		return kModelError;
	}
	return kSuccess;
}

} // namespace cohort2d::cli
