#pragma once

#include <cstdint>
#include <span>

#include "fdss/config.hpp"
#include "fdss/dft.hpp"
#include "fdss/filters.hpp"
#include "fdss/rng.hpp"

namespace fdss {

/// Per-complex-sample AWGN variance and the nominal SNR it was derived from.
struct NoiseModel {
    double sigma2 = 0.0;
    double snr_db = 0.0;
};

/// Maps a nominal Es/N0 (dB) to the channel noise variance such that the
/// ISI-free reference chain (flat unit-energy FDSS, no extension) sees a
/// per-symbol post-equalization SNR of exactly 10^(snr_db/10):
/// sigma2 = 1 / (n_data * snr_lin). snr_db = +inf gives the noiseless path.
NoiseModel calibrate_noise(double snr_db, const SystemConfig& cfg);

using SymbolVec = std::vector<std::uint8_t>;

/// Combined per-bin gains after matched filtering and SE combining.
/// kMrc: g_j = F_a^2 + F_b^2 (unbiased per bin); kLiteral: g_j = (F_a+F_b)^2.
/// Single-tap mid-band bins give F_k^2 in both modes. Throws SimulationError
/// if any gain is zero (degenerate filter).
dvec combined_gain(const FilterTaps& taps, const SystemConfig& cfg, NormMode mode);

/// Filter bound to a configuration with precomputed receiver gains.
struct PreparedFilter {
    FilterTaps taps;
    dvec gains;      // combined gains under cfg.norm_mode
    dvec inv_gains;  // reciprocals, hoisted out of the per-block loop
};

/// Scratch buffers reused across blocks; one instance per thread.
struct ChainWorkspace {
    cvec x;       // mapped symbols, kept for the error readout
    cvec data;    // n_data working buffer
    cvec ext;     // n_sc
    cvec freq;    // n_fft staging for (I)FFT
    SymbolVec sym;
};

/// Summary of one block through the full chain.
struct ChainOutput {
    double papr_db = 0.0;    // of the transmitted waveform
    double sq_error = 0.0;   // ||x - y||^2 over the block
    int sym_errors = 0;      // Hamming distance d_H(s, s_hat)
};

/// Every named intermediate of the transmit/receive pipeline (test hook).
struct ChainTrace {
    cvec x, X, X_ext, X_tilde, x_tilde, y_tilde, Y_tilde, R, T, Y_hat, y;
    SymbolVec s_hat;
};

/**
 * @brief End-to-end DFT-s-OFDM chain with spectral extension and FDSS.
 *
 * TX: modulation, DFT spreading, symmetric SE, FDSS, centered subcarrier
 * mapping, unitary IFFT. Channel: AWGN. RX: unitary FFT, bin extraction,
 * matched filter, SE combining, gain normalization, IDFT, hard demodulation.
 *
 * All methods are const and deterministic given their inputs plus the
 * explicit RNG stream, so blocks can run concurrently.
 */
class DftsOfdmChain {
public:
    explicit DftsOfdmChain(SystemConfig cfg);

    const SystemConfig& config() const { return cfg_; }

    /// Draws n_data uniform symbol indices in {0..M-1} for one block.
    SymbolVec draw_symbols(BlockRng& rng) const;
    void draw_symbols(BlockRng& rng, SymbolVec& out) const;

    // --- individual pipeline stages -------------------------------------

    /// Gray-mapped unit-modulus QPSK points; index k pairs sign bits
    /// (re, im) = ((k>>1)?-:+, (k&1)?-:+) scaled by 1/sqrt(2).
    cvec map_symbols(std::span<const std::uint8_t> s) const;

    /// Unitary n_data-point DFT.
    cvec dft_spread(std::span<const cplx> x) const;

    /// [X_{tail n_se}, X, X_{head n_se}]: head symbols copied to the tail
    /// and tail symbols copied to the head.
    cvec spectral_extend(std::span<const cplx> X) const;

    static cvec apply_fdss(std::span<const cplx> X_ext, const FilterTaps& taps);

    /// Occupied bins centered on DC (bins -n_sc/2 .. n_sc/2-1 mod n_fft),
    /// unitary IFFT of size n_fft.
    cvec ofdm_modulate(std::span<const cplx> X_filtered) const;

    cvec add_awgn(std::span<const cplx> x_tilde, const NoiseModel& noise,
                  BlockRng& rng) const;

    /// Unitary FFT and extraction of exactly the occupied bins, in order.
    cvec receiver_front(std::span<const cplx> y_tilde) const;

    /// Elementwise product with conjugated taps (taps are real; the
    /// conjugation is still spelled out).
    static cvec matched_filter(std::span<const cplx> Y_tilde, const FilterTaps& taps);

    /// Folds the SE replicas back onto their data bins.
    cvec se_combine(std::span<const cplx> R) const;

    static cvec normalize(std::span<const cplx> T, std::span<const double> gains);

    /// Unitary n_data-point IDFT back to time-domain symbols.
    cvec idft_despread(std::span<const cplx> Y_hat) const;

    /// Minimum-distance decision; ties break toward the lowest index.
    SymbolVec demod(std::span<const cplx> y) const;

    // --- composed runners ------------------------------------------------

    PreparedFilter prepare(const FilterTaps& taps) const;

    /// Full chain for one block, reusing the caller's workspace.
    ChainOutput run(const PreparedFilter& f, std::span<const std::uint8_t> s,
                    const NoiseModel& noise, BlockRng noise_rng,
                    ChainWorkspace& ws) const;

    ChainOutput run(const FilterTaps& taps, std::span<const std::uint8_t> s,
                    const NoiseModel& noise, BlockRng noise_rng) const;

    /// Transmit side only; returns the waveform PAPR in dB (noise and the
    /// receiver do not affect PAPR).
    double tx_papr_db(const PreparedFilter& f, std::span<const std::uint8_t> s,
                      ChainWorkspace& ws) const;

    /// Runs the chain keeping every intermediate vector (test hook).
    ChainTrace run_traced(const FilterTaps& taps, std::span<const std::uint8_t> s,
                          const NoiseModel& noise, BlockRng noise_rng) const;

private:
    SystemConfig cfg_;
    Dft dft_data_;  // n_data
    Dft dft_fft_;   // n_fft
};

}  // namespace fdss
