#pragma once

#include <span>
#include <string>

#include "fdss/config.hpp"

namespace fdss {

/// Constrained FDSS design families.
///
/// kNonFlat places no constraint beyond even symmetry and non-negativity.
/// kFlat pins the mid band to a constant. kZeroIsi parameterizes only the
/// upper sideband and derives the lower sideband from vestigial symmetry,
/// so the Nyquist zero-ISI condition holds for every coefficient vector.
enum class FilterDesign { kNonFlat, kFlat, kZeroIsi };

std::string design_name(FilterDesign d);
FilterDesign parse_design(const std::string& name);

/// Real non-negative FDSS frequency response over the n_sc subcarriers.
struct FilterTaps {
    dvec values;
    double e_fdss = 1.0;

    /// Checks length, non-negativity, total energy, and even symmetry.
    void validate(const SystemConfig& cfg) const;
};

/// Learnable polynomial tap model: F_k = sum_d coeffs[d] * s(k)^d.
///
/// For kNonFlat and kFlat only even powers are active (odd coefficients are
/// pinned to zero and the degree must be even); kZeroIsi models the upper
/// sideband with both parities.
struct PolyFilterModel {
    FilterDesign design = FilterDesign::kNonFlat;
    int degree = 10;
    dvec coeffs;  // size degree+1

    void validate() const;
};

/// Degrees with a free coefficient under the design's parity rule.
std::vector<int> active_degrees(FilterDesign design, int degree);

/// How raw polynomial output is forced non-negative for kNonFlat/kFlat.
/// kSmooth (0.5*(x+sqrt(x^2+1e-8))) keeps finite-difference gradients well
/// behaved during training; kHard (max(x,0)) is used when exporting.
enum class Rectifier { kSmooth, kHard };

/// Per-subcarrier support values s(k) for the design under cfg.
/// kNonFlat: n_sc points equally spaced on [-1,1], antisymmetric.
/// kFlat: transition indices map linearly onto [-1,0), mid band to 0,
/// right side mirrored. kZeroIsi: n_se points on [0,1] (upper sideband only).
dvec support_values(FilterDesign design, const SystemConfig& cfg);

/// Passband constant of the zero-ISI design, sqrt(e_fdss/n_data).
double passband_constant(double e_fdss, int n_data);

/// Lower-sideband taps from the vestigial identity
/// lower[k] = sqrt(c_v^2 - upper[n_se-1-k]^2); every mirrored pair then
/// satisfies lower^2 + upper^2 = c_v^2. Throws if upper leaves
/// [c_v/sqrt(2), c_v].
dvec vestigial_complete(std::span<const double> upper, double c_v);

/// Evaluates the polynomial model into energy-normalized taps.
FilterTaps eval_poly_filter(const PolyFilterModel& model, const SystemConfig& cfg,
                            Rectifier rect = Rectifier::kSmooth, double e_fdss = 1.0);

/// Re-evaluates the same coefficients under a new configuration (finer or
/// coarser sideband sampling); constraints and normalization are re-applied.
FilterTaps resample(const PolyFilterModel& model, const SystemConfig& new_cfg,
                    Rectifier rect = Rectifier::kSmooth, double e_fdss = 1.0);

/// Root-raised-cosine baseline with roll-off 2*n_se/n_data, so the taper
/// exactly fills the spectral extension; energy-normalized.
FilterTaps rrc_taps(const SystemConfig& cfg, double e_fdss = 1.0);

/// Rectangular (vanilla DFT-s-OFDM) filter, all taps equal.
FilterTaps rect_taps(const SystemConfig& cfg, double e_fdss = 1.0);

/// Relative flatness of the folded matched-filter spectrum:
/// max_j |g_j - mean(g)| / mean(g) with g = combined_gain(F, mrc).
/// Zero iff the filter satisfies the Nyquist zero-ISI condition.
double check_zero_isi(const FilterTaps& taps, const SystemConfig& cfg);

/// Least-squares fit of the design's polynomial to the RRC baseline;
/// used to initialize training at the baseline's operating point.
PolyFilterModel fit_rrc_model(FilterDesign design, const SystemConfig& cfg, int degree);

/// Filter exchange record: coefficients are authoritative (they allow
/// resampling); taps are included for auditability.
struct FilterFile {
    PolyFilterModel model;
    int n_data = 0;
    int n_se = 0;
    double e_fdss = 1.0;
    FilterTaps taps;
};

void save_filter(const std::string& path, const PolyFilterModel& model,
                 const SystemConfig& cfg, double e_fdss = 1.0);
FilterFile load_filter(const std::string& path);

}  // namespace fdss
