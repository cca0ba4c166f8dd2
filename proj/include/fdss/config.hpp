#pragma once

#include <cstdint>

#include "fdss/common.hpp"

namespace fdss {

/// Receiver-side normalization after SE combining.
///
/// kMrc divides each bin by the sum of squared tap gains, which makes the
/// matched-filter receiver unbiased per bin. kLiteral divides by the square
/// of the summed taps, which biases SE-combined bins (a flat filter comes
/// out scaled by 1/2 there); it is kept selectable for replication studies.
enum class NormMode { kMrc, kLiteral };

/// Dimensions and fixed parameters of one DFT-s-OFDM configuration.
struct SystemConfig {
    int n_data = 336;  ///< data subcarriers
    int n_se = 24;     ///< one-sided spectral-extension subcarriers
    int n_fft = 1024;  ///< IFFT/FFT size
    int mod_order = 4; ///< constellation cardinality M (QPSK)
    std::uint64_t seed = 0;
    NormMode norm_mode = NormMode::kMrc;

    int n_sc() const { return n_data + 2 * n_se; }

    /// Excess bandwidth 2*n_se/n_data and extension ratio 2*n_se/n_sc.
    double ebw() const { return 2.0 * n_se / n_data; }
    double er() const { return 2.0 * n_se / n_sc(); }

    /// Throws ValidationError if any dimension constraint is violated.
    void validate() const;
};

}  // namespace fdss
