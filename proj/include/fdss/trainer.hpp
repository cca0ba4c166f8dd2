#pragma once

#include <cstdint>
#include <limits>

#include "fdss/montecarlo.hpp"

namespace fdss {

/// Sign convention for the shape term. The flatness weight gamma multiplies
/// -SFM_dB by default, so increasing gamma penalizes non-flat mid bands;
/// kPaperLiteral keeps +SFM_dB (which rewards non-flatness) selectable for
/// replication.
enum class SfmSign { kPenalizeNonFlat, kPaperLiteral };

/// Non-negative tradeoff multipliers of the composite loss
/// total = mse + lambda1*mean(PAPR_dB) + lambda2*AUCCDF + gamma*shape.
struct LossWeights {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double gamma = 0.0;

    void validate() const;
};

struct TrainConfig {
    int degree = 10;
    int batch_blocks = 256;
    int steps = 200;
    double lr = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double fd_step = 1e-3;  // relative finite-difference step
    // NaN = auto: the SNR at which the RRC baseline reaches SER 1e-2
    double train_snr_db = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 1;
    SfmSign sfm_sign = SfmSign::kPenalizeNonFlat;

    void validate() const;
    double resolved_train_snr_db() const;
};

/// One evaluation of the composite loss and its components.
struct LossBreakdown {
    double total = 0.0;
    double mse = 0.0;    // mean ||x - y||^2 over the batch
    double papr = 0.0;   // lambda1*mean(PAPR_dB) + lambda2*AUCCDF
    double shape = 0.0;  // signed SFM_dB term (before gamma)
};

LossBreakdown compute_loss(const BatchStats& stats, const FilterTaps& taps,
                           const SystemConfig& cfg, const LossWeights& weights,
                           const AuccdfConfig& acfg, SfmSign sign);

/// Loss of the model on training step `step`'s batch. The batch is a pure
/// function of (tcfg.seed, step), so perturbed evaluations replay the exact
/// same symbol and noise realizations (common random numbers).
LossBreakdown batch_loss(const PolyFilterModel& model, const DftsOfdmChain& chain,
                         const LossWeights& weights, const TrainConfig& tcfg,
                         const AuccdfConfig& acfg, int step);

/// Central finite differences over the active coefficients with common
/// random numbers; entries for parity-pinned coefficients are exactly zero.
/// The per-coefficient step is fd_step * max(|a_d|, 1).
dvec grad_estimate(const PolyFilterModel& model, const DftsOfdmChain& chain,
                   const LossWeights& weights, const TrainConfig& tcfg,
                   const AuccdfConfig& acfg, int step, double fd_step);

/// Bias-corrected Adam moments.
struct AdamState {
    dvec m, v;
    long step = 0;
};

void adam_update(AdamState& state, std::span<const double> grad,
                 std::span<double> coeffs, double lr, double beta1, double beta2,
                 double eps);

struct StepRecord {
    int step = 0;
    LossBreakdown loss;
};

struct TrainReport {
    PolyFilterModel model;  // best-loss coefficients seen during the run
    double best_loss = 0.0;
    int best_step = 0;
    std::vector<StepRecord> history;
    double train_snr_db = 0.0;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
};

/// Initializes at a least-squares fit of the design polynomial to the RRC
/// baseline, then iterates batch -> loss -> finite-difference gradient ->
/// Adam. Returns the best-loss model; evaluation of the returned filter is
/// the caller's job and should use a fresh seed.
TrainReport train(FilterDesign design, const SystemConfig& cfg,
                  const LossWeights& weights, const TrainConfig& tcfg);

}  // namespace fdss
