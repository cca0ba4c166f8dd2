#pragma once

#include <optional>
#include <string>

#include "fdss/trainer.hpp"

namespace fdss {

/// PAPR campaign parameters.
struct CcdfSpec {
    std::int64_t n_blocks = 100'000;
    double level = 1e-3;  // CCDF probability for the level readout
};

/// SER sweep parameters.
struct SerSpec {
    dvec snr_grid_db;
    double target_ser = 1e-2;
    SerStopRule stop;
};

/// A named training job: design, tradeoff weights, optimizer settings.
struct TrainSpec {
    std::string label = "learned";
    FilterDesign design = FilterDesign::kZeroIsi;
    LossWeights weights;
    TrainConfig config;
};

/// Where a command gets its filter from. kRect is the vanilla DFT-s-OFDM
/// reference: a flat spectrum over the data subcarriers with no spectral
/// extension (n_se forced to 0).
struct FilterSourceSpec {
    enum class Kind { kRrc, kRect, kFile, kTrainInline };
    Kind kind = Kind::kRrc;
    std::string path;  // kFile
    TrainSpec train;   // kTrainInline
    std::string label = "rrc";
};

/// One experiment document (JSON on disk). The seed and output directory
/// may be overridden from the command line.
struct ExperimentSpec {
    std::string kind;  // ccdf | ser-sweep | train | compare | resample-study
    SystemConfig config;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    CcdfSpec ccdf;
    std::optional<SerSpec> ser;
    FilterSourceSpec filter;             // ccdf, ser-sweep, compare candidate
    FilterSourceSpec baseline;           // compare baseline (default: rrc)
    TrainSpec train;                     // kind == train
    std::optional<SystemConfig> wide_config;  // resample-study target dims
    TrainSpec retrain;                   // resample-study retraining job
};

ExperimentSpec load_experiment(const std::string& path);

/// Filter resolved against a configuration, with the polynomial model kept
/// when one exists (needed for resampling studies). The config is carried
/// along because the vanilla reference runs without spectral extension.
struct ResolvedFilter {
    std::string label;
    SystemConfig cfg;
    FilterTaps taps;
    std::optional<PolyFilterModel> model;
};

ResolvedFilter resolve_filter(const FilterSourceSpec& src, const SystemConfig& cfg,
                              std::uint64_t seed, const std::string& out_dir);

/// Each command writes CSV/SVG/JSON artifacts into spec.out_dir and returns
/// the JSON summary it wrote.
std::string cmd_ccdf(const ExperimentSpec& spec);
std::string cmd_ser_sweep(const ExperimentSpec& spec);
std::string cmd_train(const ExperimentSpec& spec);
std::string cmd_compare(const ExperimentSpec& spec);
std::string cmd_resample_study(const ExperimentSpec& spec);

/// Dispatch on spec.kind.
std::string run_experiment(const ExperimentSpec& spec);

}  // namespace fdss
