#include "fdss/config.hpp"

#include <string>

namespace fdss {

void SystemConfig::validate() const {
    if (n_data <= 0 || n_fft <= 0) {
        throw ValidationError("SystemConfig: n_data and n_fft must be positive");
    }
    if (n_se < 0) throw ValidationError("SystemConfig: n_se must be non-negative");
    if (n_se > n_data) {
        throw ValidationError("SystemConfig: n_se exceeds n_data (extension would wrap)");
    }
    if (n_sc() > n_fft) {
        throw ValidationError("SystemConfig: n_sc = " + std::to_string(n_sc()) +
                              " exceeds n_fft = " + std::to_string(n_fft));
    }
    // SE-combining index ranges and the flat-region definitions need
    // 4*n_se <= n_sc, i.e. a non-degenerate mid band.
    if (4 * n_se > n_sc()) {
        throw ValidationError("SystemConfig: 4*n_se must not exceed n_sc");
    }
    if (mod_order != 4) {
        throw ValidationError("SystemConfig: only QPSK (mod_order = 4) is supported");
    }
}

}  // namespace fdss
