#pragma once

#include "csonbr/linreg.hpp"
#include "csonbr/peak.hpp"
#include "csonbr/stats.hpp"
#include "csonbr/surrogate.hpp"
#include "csonbr/tabular.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace csonbr {

enum class Algorithm { Nbr, Lr, CsoNbr, SpsoNbr };

std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct DatasetSource {
    std::string name;  // defaults to the file stem
    std::filesystem::path path;
    FileFormat format = FileFormat::Csv;
    TargetRef target = std::string{};
    std::optional<Dataset> preloaded;  // used instead of `path` when set
};

struct ExperimentSpec {
    std::vector<DatasetSource> datasets;
    double split_fraction = 0.66;
    bool shuffle = true;
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::CsoNbr;
    /// Optimizer and pipeline settings; phi, rows and seed are overridden per sweep cell.
    PipelineConfig pipeline;
    std::vector<double> phis{0.1};
    std::vector<std::size_t> ns{10};
    std::size_t threads = 1;     // repeats run in parallel; 0 = hardware concurrency
    bool record_timing = true;   // false writes zero wall times (byte-stable reports)

    void validate() const;
};

struct CellResult {
    RunReport report;
    Dataset best_surrogate;  // surrogate of the repeat with the lowest test RMSE
};

struct DatasetResult {
    std::string dataset;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::vector<std::size_t> test_indices;  // into the imputed dataset
    double nbr_rmse = 0.0;
    double lr_rmse = 0.0;
    std::vector<CellResult> cells;
};

/// Seed of repeat `repeat` in sweep cell `cell`.
std::uint64_t derived_seed(std::uint64_t seed, std::size_t cell, std::size_t repeat);

/// Loads, imputes and splits each dataset once, computes the NBR and LR
/// baselines, then runs every (phi, n) cell of the sweep. For CSO, phi is the
/// outer sweep index; SPSO has no phi and sweeps n only. NBR and LR produce a
/// single deterministic report.
std::vector<DatasetResult> run_experiment(const ExperimentSpec& spec);

/// "0.6735 ± 0.0037"
std::string format_mean_std(double mean, double stddev);

std::string report_json(const DatasetResult& result);
std::vector<RunReport> read_report_json(std::string_view text);
std::string report_table(const DatasetResult& result);

/// Writes <dataset>.json, <dataset>.txt and one best-surrogate CSV per cell.
void write_report(const std::vector<DatasetResult>& results, const std::filesystem::path& dir);

struct PeakExperiment {
    PeakConfig peak;          // peak.seed drives the training sample
    std::size_t test_samples = 100;
    PipelineConfig pipeline;  // pipeline.seed is the base repeat seed
    std::size_t threads = 1;
};

struct PeakRun {
    double train_rmse = 0.0;  // final fitness
    double test_rmse = 0.0;
    std::size_t evaluations = 0;
    double wall_seconds = 0.0;
    Dataset surrogate;
    NbrModel model;
};

struct PeakResult {
    Dataset train;
    Dataset test;
    double lr_train_rmse = 0.0;
    double lr_test_rmse = 0.0;
    double nbr_train_rmse = 0.0;
    double nbr_test_rmse = 0.0;
    std::vector<PeakRun> runs;  // repeat i seeded with pipeline.seed + i
    std::size_t best_run = 0;   // lowest test RMSE
    LinearModel lr;
    NbrModel nbr;
};

/// Samples independent train and test sets and runs LR, NBR and the
/// configured surrogate optimizer on them.
PeakResult run_peak(const PeakExperiment& exp);

/// Test seed paired with a given training seed.
std::uint64_t peak_test_seed(std::uint64_t train_seed);

}  // namespace csonbr
