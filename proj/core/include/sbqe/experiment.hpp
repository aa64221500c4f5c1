#pragma once

// Config parsing, multi-seed runs, aggregation and curve files.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbqe/data.hpp"
#include "sbqe/model.hpp"
#include "sbqe/stats.hpp"
#include "sbqe/train.hpp"

namespace sbqe {

enum class DatasetKind { semeion, fashion_mnist };
enum class ShotMode { exact, sampled };

[[nodiscard]] std::string_view to_string(DatasetKind kind) noexcept;
[[nodiscard]] std::string_view to_string(ShotMode mode) noexcept;

inline constexpr const char* kDataDirEnv = "SBQE_DATA_DIR";

// $SBQE_DATA_DIR when set, else ./data.
std::filesystem::path default_data_dir();

struct ExperimentConfig {
    DatasetKind dataset = DatasetKind::semeion;
    std::vector<ModelKind> models{ModelKind::probabilistic_hybrid};
    int n_qubits = 8;
    int n_layers = 4;
    int pca_dim = 8;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::uint64_t epochs = 20000;
    std::size_t batch_size = 7000;
    double learning_rate = 3e-4;
    ShotMode shot_mode = ShotMode::exact;
    std::uint64_t n_shots = 1024;
    std::uint64_t split_seed = 0;
    std::size_t subset = 0; // 0 uses every sample
    std::uint64_t log_interval = 50;
    bool save_checkpoints = true;
    std::filesystem::path data_dir = default_data_dir();
    std::filesystem::path out_dir = "out";

    // Throws ConfigError naming the offending key.
    void validate() const;
    [[nodiscard]] TrainConfig train_config() const;
};

using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

// key=value lines ('#' starts a comment), then overrides applied in order.
// Unknown keys and malformed values raise ConfigError.
ExperimentConfig parse_config(const std::optional<std::filesystem::path>& file, const ConfigOverrides& overrides = {});
ExperimentConfig parse_config_text(std::string_view text, const ConfigOverrides& overrides = {});
void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

struct PreparedData {
    DataSplits splits;
    SplitIndices indices;
    PcaModel pca;
    std::uint64_t fingerprint = 0;
};

Dataset load_dataset(const ExperimentConfig& config);

// Optional stratified subset, 70/15/15 split, and PCA fitted on the train rows only.
PreparedData prepare_data(const Dataset& data, const ExperimentConfig& config);

struct SeedRun {
    ModelKind model = ModelKind::probabilistic_hybrid;
    std::uint64_t seed = 0;
    std::uint64_t split_fingerprint = 0;
    RunMetrics metrics;
};

using LogSink = std::function<void(const std::string&)>;

// Trains every (model, seed) pair on one shared split and writes, per pair,
// metrics_<model>_<seed>.csv, timing_<model>_<seed>.csv, run_<model>_<seed>.json
// and (optionally) best_<model>_<seed>.ckpt into out_dir. Missing data files
// fail before any training.
std::vector<SeedRun> run_experiment(const ExperimentConfig& config, const LogSink& log = {});
// Same, on already prepared data.
std::vector<SeedRun> run_prepared(const ExperimentConfig& config, const PreparedData& data, const LogSink& log = {});

std::string metrics_filename(ModelKind model, std::uint64_t seed);
std::string curves_filename(ModelKind model);

// step,split,loss,accuracy
std::vector<MetricRecord> read_metrics_csv(const std::filesystem::path& path);

struct ModelSummary {
    ModelKind model = ModelKind::probabilistic_hybrid;
    std::vector<std::uint64_t> seeds;
    std::vector<double> test_accuracy;
    std::vector<double> test_loss;
    double accuracy_mean = 0.0;
    double accuracy_std = 0.0;
    double loss_mean = 0.0;
    double loss_std = 0.0;
};

struct PairwiseTest {
    ModelKind a = ModelKind::probabilistic_hybrid;
    ModelKind b = ModelKind::probabilistic_hybrid;
    PairedTTest accuracy;
    PairedTTest loss;
};

struct SummaryReport {
    std::vector<ModelSummary> models;
    std::vector<PairwiseTest> tests;
};

// Paired tests are only run between models with at least 2 seeds; the seed
// sets must then match exactly (PairingError otherwise).
SummaryReport summarize(const std::vector<SeedRun>& runs);
std::string summary_json(const SummaryReport& report);
void write_summary(const std::filesystem::path& path, const SummaryReport& report);

// Reads run_*.json from a directory written by run_experiment.
std::vector<SeedRun> load_runs(const std::filesystem::path& dir);

struct CurveRow {
    std::uint64_t step = 0;
    double train_loss_mean = 0.0, train_loss_std = 0.0;
    double train_acc_mean = 0.0, train_acc_std = 0.0;
    double val_loss_mean = 0.0, val_loss_std = 0.0;
    double val_acc_mean = 0.0, val_acc_std = 0.0;
};

// Mean and sample std across runs at each logged step. Throws
// AggregationError when the runs were logged on different step grids.
std::vector<CurveRow> aggregate_curves(const std::vector<std::vector<MetricRecord>>& histories);
// Writes curves_<model>.csv for every model present in `runs`.
std::vector<std::filesystem::path> emit_curves(const std::vector<SeedRun>& runs, const std::filesystem::path& out_dir);
// Same, reading the per-seed metrics CSVs found in `dir`.
std::vector<std::filesystem::path> emit_curves_from_dir(const std::filesystem::path& dir);

} // namespace sbqe
