#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssrforge/baselines.hpp"
#include "ssrforge/coreg.hpp"
#include "ssrforge/data.hpp"
#include "ssrforge/metrics.hpp"
#include "ssrforge/smogn.hpp"

namespace ssrforge {

inline constexpr const char* version = "1.0.0";

enum class ModelKind { knn, linear, mssra_knn, coreg, smogn_coreg };

struct ModelSpec {
    std::string name;
    ModelKind kind = ModelKind::knn;
    std::size_t k = 0;  // knn only

    bool uses_smogn() const { return kind == ModelKind::smogn_coreg; }
    bool semi_supervised() const {
        return kind == ModelKind::mssra_knn || kind == ModelKind::coreg || kind == ModelKind::smogn_coreg;
    }
};

/// knn<k>, lr, mssra-knn, coreg, smogn-coreg.
ModelSpec parse_model(const std::string& name);
std::vector<ModelSpec> parse_models(const std::string& comma_list);

struct ExperimentConfig {
    std::filesystem::path input;
    std::filesystem::path schema;
    std::vector<ModelSpec> models;
    SplitSpec split;
    SmognParams smogn;
    CoregParams coreg;
    SelfTrainParams mssra;
    std::size_t histogram_bins = 20;
    std::filesystem::path output_dir;  // empty: nothing written

    void validate() const;
    nlohmann::ordered_json to_json() const;
};

/// Reads the INI-style experiment file. Unknown sections or keys are errors.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);
/// Default configuration with every key spelled out, suitable for editing.
std::string default_config_text();

struct Aggregate {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation over the folds where the metric is defined
    std::size_t n = 0;
};

/// Mean and sample sd of the defined entries.
Aggregate aggregate(const std::vector<std::optional<double>>& values);

struct ModelResult {
    std::string name;
    std::vector<MetricsReport> folds;
    std::map<std::string, Aggregate> summary;  // keyed by r2, pcc, rmse, mae
};

struct SmognTrace {
    std::size_t input = 0;
    std::size_t output = 0;
    std::size_t original = 0;
    std::size_t smoter = 0;
    std::size_t gauss = 0;
    std::size_t rare_bins = 0;
    std::size_t normal_bins = 0;
    std::vector<std::string> warnings;
};

struct FoldInfo {
    std::size_t fold = 0;
    std::size_t train = 0;
    std::size_t test = 0;
    std::size_t labeled = 0;
    std::size_t unlabeled = 0;
    std::uint64_t split_seed = 0;
    std::uint64_t smogn_seed = 0;
    std::uint64_t coreg_seed = 0;
    std::optional<SmognTrace> smogn;
    std::map<std::string, std::size_t> coreg_iterations;
    std::map<std::string, std::pair<std::size_t, std::size_t>> coreg_sizes;  // final |L1|, |L2|
};

struct HistoryRow {
    std::size_t fold = 0;
    std::string model;
    CoregStep step;
};

struct HistogramRow {
    double low = 0.0;
    double high = 0.0;
    std::size_t before = 0;
    std::size_t after = 0;
};

struct RunReport {
    ExperimentConfig config;
    std::string dataset;
    std::size_t instances = 0;
    std::vector<FoldInfo> folds;
    std::vector<ModelResult> models;
    std::vector<HistoryRow> history;
    std::vector<HistogramRow> histogram;
    std::size_t leakage_checks = 0;
    std::size_t leakage_violations = 0;

    const ModelResult& model(const std::string& name) const;
    nlohmann::ordered_json to_json() const;
};

/// Equal-width bins over the union target range of both datasets.
std::vector<HistogramRow> emit_histogram(const Dataset& before, const Dataset& after, std::size_t bins);
void write_histogram_csv(const std::vector<HistogramRow>& rows, const std::filesystem::path& path);

/// k-fold protocol: each fold's training part is split into L/U, SMOGN is applied
/// to L for SMOGN models, and every model is scored on the untouched test fold.
/// Unlabeled rows already present in `data` join U in every fold.
RunReport run_experiment(const Dataset& data, const ExperimentConfig& cfg);
/// Loads cfg.input / cfg.schema, runs, and writes outputs when cfg.output_dir is set.
RunReport run_experiment(const ExperimentConfig& cfg);

/// report.json, table_<metric>.csv, histogram.csv, history.csv and run_meta.json.
void write_outputs(const RunReport& report, const std::filesystem::path& dir);

struct SweepResult {
    std::vector<double> urs;
    std::vector<RunReport> reports;
};

SweepResult sweep_ur(const Dataset& data, const ExperimentConfig& cfg, const std::vector<double>& urs);
SweepResult sweep_ur(const ExperimentConfig& cfg, const std::vector<double>& urs);
/// Tidy rows: ur, model, metric, mean, sd.
void write_sweep_csv(const SweepResult& sweep, const std::filesystem::path& path);

}  // namespace ssrforge
