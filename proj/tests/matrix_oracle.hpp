#pragma once

// Test-only dense-matrix model of the noiseless (or known-noise) TX->RX
// pipeline. Every linear stage is built as an explicit matrix and applied
// by matrix-vector products, independently of the production signal path.

#include <cmath>
#include <complex>
#include <vector>

#include "fdss/chain.hpp"

namespace oracle {

using fdss::cplx;
using fdss::cvec;
using fdss::dvec;

using Matrix = std::vector<cvec>;  // row-major dense

inline cvec matvec(const Matrix& m, const cvec& x) {
    cvec out(m.size(), cplx{0.0, 0.0});
    for (std::size_t r = 0; r < m.size(); ++r) {
        cplx acc{0.0, 0.0};
        for (std::size_t c = 0; c < x.size(); ++c) acc += m[r][c] * x[c];
        out[r] = acc;
    }
    return out;
}

inline Matrix dft_matrix(int n, bool inverse) {
    const double pi = 3.14159265358979323846264338327950288;
    Matrix m(static_cast<std::size_t>(n), cvec(static_cast<std::size_t>(n)));
    const double sign = inverse ? 1.0 : -1.0;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const double ang = sign * 2.0 * pi * r * c / n;
            m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                cplx{std::cos(ang) * scale, std::sin(ang) * scale};
        }
    }
    return m;
}

// spectral extension as an (n_sc x n_data) selection matrix
inline Matrix extension_matrix(const fdss::SystemConfig& cfg) {
    const int n_data = cfg.n_data, n_se = cfg.n_se, n_sc = cfg.n_sc();
    Matrix m(static_cast<std::size_t>(n_sc), cvec(static_cast<std::size_t>(n_data)));
    for (int k = 0; k < n_sc; ++k) {
        int src;
        if (k < n_se) {
            src = n_data - n_se + k;
        } else if (k < n_se + n_data) {
            src = k - n_se;
        } else {
            src = k - n_se - n_data;
        }
        m[static_cast<std::size_t>(k)][static_cast<std::size_t>(src)] = 1.0;
    }
    return m;
}

// centered subcarrier placement as an (n_fft x n_sc) selection matrix
inline Matrix mapping_matrix(const fdss::SystemConfig& cfg) {
    const int n_sc = cfg.n_sc(), n_fft = cfg.n_fft;
    Matrix m(static_cast<std::size_t>(n_fft), cvec(static_cast<std::size_t>(n_sc)));
    for (int i = 0; i < n_sc; ++i) {
        const int bin = (i - n_sc / 2 + n_fft) % n_fft;
        m[static_cast<std::size_t>(bin)][static_cast<std::size_t>(i)] = 1.0;
    }
    return m;
}

inline Matrix transpose(const Matrix& m) {
    Matrix t(m[0].size(), cvec(m.size()));
    for (std::size_t r = 0; r < m.size(); ++r) {
        for (std::size_t c = 0; c < m[0].size(); ++c) t[c][r] = m[r][c];
    }
    return t;
}

// SE combining as an (n_data x n_sc) 0/1 matrix straight from the printed
// index lists
inline Matrix combining_matrix(const fdss::SystemConfig& cfg) {
    const int n_data = cfg.n_data, n_se = cfg.n_se, n_sc = cfg.n_sc();
    Matrix m(static_cast<std::size_t>(n_data), cvec(static_cast<std::size_t>(n_sc)));
    for (int j = 0; j < n_data; ++j) {
        m[static_cast<std::size_t>(j)][static_cast<std::size_t>(n_se + j)] = 1.0;
        if (j < n_se) {
            m[static_cast<std::size_t>(j)][static_cast<std::size_t>(n_sc - n_se + j)] = 1.0;
        } else if (j >= n_data - n_se) {
            m[static_cast<std::size_t>(j)][static_cast<std::size_t>(j - (n_data - n_se))] = 1.0;
        }
    }
    return m;
}

// combined gains derived from the combining matrix itself: the row support
// of C gives exactly the taps folded onto each data bin
inline dvec gains_from_combiner(const Matrix& comb, const fdss::FilterTaps& taps,
                                fdss::NormMode mode) {
    dvec g(comb.size(), 0.0);
    for (std::size_t j = 0; j < comb.size(); ++j) {
        double sum_sq = 0.0, sum = 0.0;
        for (std::size_t k = 0; k < taps.values.size(); ++k) {
            if (comb[j][k].real() != 0.0) {
                sum_sq += taps.values[k] * taps.values[k];
                sum += taps.values[k];
            }
        }
        g[j] = (mode == fdss::NormMode::kMrc) ? sum_sq : sum * sum;
    }
    return g;
}

struct Trace {
    cvec X, X_ext, X_tilde, x_tilde, y_tilde, Y_tilde, R, T, Y_hat, y;
};

// full pipeline on explicit matrices; `noise` is added in the time domain
// (empty = noiseless)
inline Trace run(const fdss::SystemConfig& cfg, const fdss::FilterTaps& taps,
                 const cvec& x, const cvec& noise) {
    const Matrix u_dft = dft_matrix(cfg.n_data, false);
    const Matrix u_idft = dft_matrix(cfg.n_data, true);
    const Matrix u_fft = dft_matrix(cfg.n_fft, false);
    const Matrix u_ifft = dft_matrix(cfg.n_fft, true);
    const Matrix ext = extension_matrix(cfg);
    const Matrix map = mapping_matrix(cfg);
    const Matrix unmap = transpose(map);
    const Matrix comb = combining_matrix(cfg);
    const dvec gains = gains_from_combiner(comb, taps, cfg.norm_mode);

    Trace t;
    t.X = matvec(u_dft, x);
    t.X_ext = matvec(ext, t.X);
    t.X_tilde = t.X_ext;
    for (std::size_t k = 0; k < t.X_tilde.size(); ++k) t.X_tilde[k] *= taps.values[k];
    t.x_tilde = matvec(u_ifft, matvec(map, t.X_tilde));
    t.y_tilde = t.x_tilde;
    for (std::size_t n = 0; n < noise.size(); ++n) t.y_tilde[n] += noise[n];
    t.Y_tilde = matvec(unmap, matvec(u_fft, t.y_tilde));
    t.R = t.Y_tilde;
    for (std::size_t k = 0; k < t.R.size(); ++k) t.R[k] *= taps.values[k];
    t.T = matvec(comb, t.R);
    t.Y_hat = t.T;
    for (std::size_t j = 0; j < t.Y_hat.size(); ++j) t.Y_hat[j] /= gains[j];
    t.y = matvec(u_idft, t.Y_hat);
    return t;
}

inline double max_abs_diff(const cvec& a, const cvec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// strictly positive even-symmetric unit-energy taps
inline fdss::FilterTaps random_valid_taps(const fdss::SystemConfig& cfg, std::uint64_t block) {
    fdss::BlockRng rng(991, 6, block);
    const int n_sc = cfg.n_sc();
    fdss::FilterTaps taps;
    taps.values.assign(static_cast<std::size_t>(n_sc), 0.0);
    for (int k = 0; k < (n_sc + 1) / 2; ++k) {
        const double v = 0.1 + 0.9 * rng.next_unit();
        taps.values[static_cast<std::size_t>(k)] = v;
        taps.values[static_cast<std::size_t>(n_sc - 1 - k)] = v;
    }
    double energy = 0.0;
    for (double v : taps.values) energy += v * v;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& v : taps.values) v *= scale;
    taps.e_fdss = 1.0;
    return taps;
}

}  // namespace oracle
