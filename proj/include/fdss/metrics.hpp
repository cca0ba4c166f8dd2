#pragma once

#include <cstdint>
#include <span>

#include "fdss/config.hpp"
#include "fdss/filters.hpp"

namespace fdss {

/// Peak-to-average power ratio of one time-domain block (linear >= 1).
/// Throws SimulationError on an all-zero waveform.
double papr_ratio(std::span<const cplx> samples);
double papr_db(std::span<const cplx> samples);

/// Binning grid and sigmoid slope for the smooth AUCCDF surrogate.
struct AuccdfConfig {
    dvec edges_db;            // strictly increasing
    double sharpness = 100.0; // logistic slope

    double papr_max_db() const { return edges_db.empty() ? 0.0 : edges_db.back(); }
    void validate() const;
};

/// Default bin edges [0, 0.05, 0.1, ..., 10] dB.
dvec default_papr_edges_db();
AuccdfConfig default_auccdf_config();

/// Empirical exceedance curve Pr[PAPR > edge].
struct CcdfCurve {
    dvec edges_db;
    dvec probs;  // non-increasing, in [0,1]
    std::int64_t n_samples = 0;
};

/// Histogram accumulator with integer counts; partial states merge
/// associatively, so parallel accumulation stays order-independent.
class CcdfAccumulator {
public:
    explicit CcdfAccumulator(dvec edges_db);

    void add(double papr_db_value);
    void merge(const CcdfAccumulator& other);
    CcdfCurve curve() const;
    std::int64_t n_samples() const { return n_; }

private:
    dvec edges_;
    std::vector<std::int64_t> bin_counts_;  // bin i = #edges strictly below value
    std::int64_t n_ = 0;
};

/// PAPR (dB) at which the curve crosses probability p, by log-linear
/// interpolation between bracketing edges. Requires n_samples * p >= 1.
double ccdf_level(const CcdfCurve& curve, double p);

/// Smooth area under the CCDF: sum_i (1 - CDF(edge_i)) with the CDF
/// approximated by sharp logistics centered at the bin edges.
double auccdf_smooth(std::span<const double> papr_db_batch, const AuccdfConfig& acfg);

/// Spectral flatness of the mid band [2*n_se+1, n_sc-2*n_se] (1-based,
/// inclusive; n_sc-4*n_se taps) in dB: 10*log10(geomean/mean) <= 0.
/// A zero tap saturates to the -300 dB sentinel.
double spectral_flatness_db(const FilterTaps& taps, const SystemConfig& cfg);

/// Fraction of differing symbols.
double ser_rate(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> decided);

/// One SNR point of a symbol-error-rate sweep.
struct SerPoint {
    double snr_db = 0.0;
    double ser = 0.0;
    std::int64_t n_blocks = 0;
    std::int64_t n_errors = 0;
};

struct SweepResult {
    std::vector<SerPoint> points;
};

/// SNR (dB) at which the sweep crosses the target SER, by log-linear
/// interpolation on the SER axis. Throws if the target lies outside the
/// measured range.
double snr_at_ser(const SweepResult& sweep, double target_ser);

/// Candidate-vs-baseline readouts. Positive gain means the candidate's
/// CCDF lies left of the baseline's; positive loss means the candidate
/// needs more SNR for the same SER.
double papr_gain_db(const CcdfCurve& baseline, const CcdfCurve& candidate, double p);
double snr_loss_db(const SweepResult& candidate, const SweepResult& baseline,
                   double target_ser);

/// Closed-form QPSK-over-AWGN symbol error rate at per-symbol SNR (linear).
double qpsk_ser(double snr_lin);
/// Inverse of the above: Es/N0 (dB) at which QPSK reaches the target SER.
double qpsk_snr_db_at_ser(double target_ser);

/// Deterministic pairwise summation; the result depends only on element
/// order, never on thread count.
double pairwise_sum(std::span<const double> values);

}  // namespace fdss
