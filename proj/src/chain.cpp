#include "fdss/chain.hpp"

#include <algorithm>
#include <cmath>

#include "fdss/metrics.hpp"

namespace fdss {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

const cplx kQpsk[4] = {
    {kInvSqrt2, kInvSqrt2},    // 0: (+,+)
    {kInvSqrt2, -kInvSqrt2},   // 1: (+,-)
    {-kInvSqrt2, kInvSqrt2},   // 2: (-,+)
    {-kInvSqrt2, -kInvSqrt2},  // 3: (-,-)
};

const SystemConfig& validated(const SystemConfig& cfg) {
    cfg.validate();
    return cfg;
}

}  // namespace

NoiseModel calibrate_noise(double snr_db, const SystemConfig& cfg) {
    cfg.validate();
    if (std::isnan(snr_db)) throw ValidationError("calibrate_noise: snr_db is NaN");
    NoiseModel n;
    n.snr_db = snr_db;
    if (std::isinf(snr_db) && snr_db > 0.0) {
        n.sigma2 = 0.0;  // noiseless path
        return n;
    }
    const double snr_lin = std::pow(10.0, snr_db / 10.0);
    n.sigma2 = 1.0 / (cfg.n_data * snr_lin);
    return n;
}

dvec combined_gain(const FilterTaps& taps, const SystemConfig& cfg, NormMode mode) {
    cfg.validate();
    const int n_data = cfg.n_data;
    const int n_se = cfg.n_se;
    const int n_sc = cfg.n_sc();
    if (taps.values.size() != static_cast<std::size_t>(n_sc)) {
        throw ValidationError("combined_gain: taps length mismatch");
    }
    const dvec& f = taps.values;
    dvec g(static_cast<std::size_t>(n_data), 0.0);
    for (int j = 0; j < n_data; ++j) {
        const double fa = f[static_cast<std::size_t>(n_se + j)];
        double gj;
        if (j < n_se) {
            const double fb = f[static_cast<std::size_t>(n_sc - n_se + j)];
            gj = (mode == NormMode::kMrc) ? fa * fa + fb * fb : (fa + fb) * (fa + fb);
        } else if (j < n_data - n_se) {
            gj = fa * fa;
        } else {
            const double fb = f[static_cast<std::size_t>(j - (n_data - n_se))];
            gj = (mode == NormMode::kMrc) ? fa * fa + fb * fb : (fa + fb) * (fa + fb);
        }
        if (!(gj > 0.0)) {
            throw SimulationError("combined_gain: degenerate filter, zero gain at bin " +
                                  std::to_string(j));
        }
        g[static_cast<std::size_t>(j)] = gj;
    }
    return g;
}

DftsOfdmChain::DftsOfdmChain(SystemConfig cfg)
    : cfg_(validated(cfg)),
      dft_data_(static_cast<std::size_t>(cfg.n_data)),
      dft_fft_(static_cast<std::size_t>(cfg.n_fft)) {}

SymbolVec DftsOfdmChain::draw_symbols(BlockRng& rng) const {
    SymbolVec s;
    draw_symbols(rng, s);
    return s;
}

void DftsOfdmChain::draw_symbols(BlockRng& rng, SymbolVec& out) const {
    out.resize(static_cast<std::size_t>(cfg_.n_data));
    for (auto& v : out) v = static_cast<std::uint8_t>(rng.next_u64() & 3u);
}

cvec DftsOfdmChain::map_symbols(std::span<const std::uint8_t> s) const {
    if (s.size() != static_cast<std::size_t>(cfg_.n_data)) {
        throw ValidationError("map_symbols: expected n_data indices");
    }
    cvec x(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] >= 4) {
            throw ValidationError("map_symbols: index out of range at position " +
                                  std::to_string(i));
        }
        x[i] = kQpsk[s[i]];
    }
    return x;
}

cvec DftsOfdmChain::dft_spread(std::span<const cplx> x) const {
    if (x.size() != dft_data_.size()) throw ValidationError("dft_spread: length mismatch");
    cvec X(x.begin(), x.end());
    dft_data_.forward(X);
    return X;
}

cvec DftsOfdmChain::spectral_extend(std::span<const cplx> X) const {
    const auto n_data = static_cast<std::size_t>(cfg_.n_data);
    const auto n_se = static_cast<std::size_t>(cfg_.n_se);
    if (X.size() != n_data) throw ValidationError("spectral_extend: length mismatch");
    cvec ext(n_data + 2 * n_se);
    for (std::size_t k = 0; k < n_se; ++k) ext[k] = X[n_data - n_se + k];
    for (std::size_t k = 0; k < n_data; ++k) ext[n_se + k] = X[k];
    for (std::size_t k = 0; k < n_se; ++k) ext[n_se + n_data + k] = X[k];
    return ext;
}

cvec DftsOfdmChain::apply_fdss(std::span<const cplx> X_ext, const FilterTaps& taps) {
    if (X_ext.size() != taps.values.size()) {
        throw ValidationError("apply_fdss: length mismatch");
    }
    cvec out(X_ext.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = X_ext[k] * taps.values[k];
    return out;
}

cvec DftsOfdmChain::ofdm_modulate(std::span<const cplx> X_filtered) const {
    const int n_sc = cfg_.n_sc();
    const int n_fft = cfg_.n_fft;
    if (X_filtered.size() != static_cast<std::size_t>(n_sc)) {
        throw ValidationError("ofdm_modulate: length mismatch");
    }
    cvec freq(static_cast<std::size_t>(n_fft), cplx{0.0, 0.0});
    for (int i = 0; i < n_sc; ++i) {
        const int bin = (i - n_sc / 2 + n_fft) % n_fft;  // centered on DC
        freq[static_cast<std::size_t>(bin)] = X_filtered[static_cast<std::size_t>(i)];
    }
    dft_fft_.inverse(freq);
    return freq;
}

cvec DftsOfdmChain::add_awgn(std::span<const cplx> x_tilde, const NoiseModel& noise,
                             BlockRng& rng) const {
    if (!(noise.sigma2 >= 0.0)) throw ValidationError("add_awgn: sigma2 must be >= 0");
    cvec out(x_tilde.begin(), x_tilde.end());
    if (noise.sigma2 == 0.0) return out;
    for (auto& v : out) v += rng.next_cgauss(noise.sigma2);
    return out;
}

cvec DftsOfdmChain::receiver_front(std::span<const cplx> y_tilde) const {
    const int n_sc = cfg_.n_sc();
    const int n_fft = cfg_.n_fft;
    if (y_tilde.size() != static_cast<std::size_t>(n_fft)) {
        throw ValidationError("receiver_front: length mismatch");
    }
    cvec freq(y_tilde.begin(), y_tilde.end());
    dft_fft_.forward(freq);
    cvec out(static_cast<std::size_t>(n_sc));
    for (int i = 0; i < n_sc; ++i) {
        const int bin = (i - n_sc / 2 + n_fft) % n_fft;
        out[static_cast<std::size_t>(i)] = freq[static_cast<std::size_t>(bin)];
    }
    return out;
}

cvec DftsOfdmChain::matched_filter(std::span<const cplx> Y_tilde, const FilterTaps& taps) {
    if (Y_tilde.size() != taps.values.size()) {
        throw ValidationError("matched_filter: length mismatch");
    }
    cvec out(Y_tilde.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = Y_tilde[k] * std::conj(cplx{taps.values[k], 0.0});
    }
    return out;
}

cvec DftsOfdmChain::se_combine(std::span<const cplx> R) const {
    const int n_data = cfg_.n_data;
    const int n_se = cfg_.n_se;
    const int n_sc = cfg_.n_sc();
    if (R.size() != static_cast<std::size_t>(n_sc)) {
        throw ValidationError("se_combine: length mismatch");
    }
    cvec T(static_cast<std::size_t>(n_data));
    for (int j = 0; j < n_data; ++j) {
        cplx v = R[static_cast<std::size_t>(n_se + j)];
        if (j < n_se) {
            v += R[static_cast<std::size_t>(n_sc - n_se + j)];
        } else if (j >= n_data - n_se) {
            v += R[static_cast<std::size_t>(j - (n_data - n_se))];
        }
        T[static_cast<std::size_t>(j)] = v;
    }
    return T;
}

cvec DftsOfdmChain::normalize(std::span<const cplx> T, std::span<const double> gains) {
    if (T.size() != gains.size()) throw ValidationError("normalize: length mismatch");
    cvec out(T.size());
    for (std::size_t j = 0; j < T.size(); ++j) {
        if (!(gains[j] > 0.0)) throw SimulationError("normalize: non-positive gain");
        out[j] = T[j] / gains[j];
    }
    return out;
}

cvec DftsOfdmChain::idft_despread(std::span<const cplx> Y_hat) const {
    if (Y_hat.size() != dft_data_.size()) {
        throw ValidationError("idft_despread: length mismatch");
    }
    cvec y(Y_hat.begin(), Y_hat.end());
    dft_data_.inverse(y);
    return y;
}

SymbolVec DftsOfdmChain::demod(std::span<const cplx> y) const {
    SymbolVec s(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        int best = 0;
        double best_d = std::norm(y[i] - kQpsk[0]);
        for (int k = 1; k < 4; ++k) {
            const double d = std::norm(y[i] - kQpsk[k]);
            if (d < best_d) {  // strict: ties stay at the lowest index
                best_d = d;
                best = k;
            }
        }
        s[i] = static_cast<std::uint8_t>(best);
    }
    return s;
}

PreparedFilter DftsOfdmChain::prepare(const FilterTaps& taps) const {
    taps.validate(cfg_);
    PreparedFilter f;
    f.taps = taps;
    f.gains = combined_gain(taps, cfg_, cfg_.norm_mode);
    f.inv_gains.resize(f.gains.size());
    for (std::size_t j = 0; j < f.gains.size(); ++j) f.inv_gains[j] = 1.0 / f.gains[j];
    return f;
}

ChainOutput DftsOfdmChain::run(const PreparedFilter& f, std::span<const std::uint8_t> s,
                               const NoiseModel& noise, BlockRng noise_rng,
                               ChainWorkspace& ws) const {
    const auto n_data = static_cast<std::size_t>(cfg_.n_data);
    const auto n_se = static_cast<std::size_t>(cfg_.n_se);
    const auto n_sc = static_cast<std::size_t>(cfg_.n_sc());
    const auto n_fft = static_cast<std::size_t>(cfg_.n_fft);
    if (s.size() != n_data) throw ValidationError("run: expected n_data indices");

    // TX: map, spread, extend, shape, modulate
    ws.x.resize(n_data);
    for (std::size_t i = 0; i < n_data; ++i) {
        if (s[i] >= 4) throw ValidationError("run: symbol index out of range");
        ws.x[i] = kQpsk[s[i]];
    }
    ws.data = ws.x;
    dft_data_.forward(ws.data);
    ws.ext.resize(n_sc);
    for (std::size_t k = 0; k < n_se; ++k) ws.ext[k] = ws.data[n_data - n_se + k];
    for (std::size_t k = 0; k < n_data; ++k) ws.ext[n_se + k] = ws.data[k];
    for (std::size_t k = 0; k < n_se; ++k) ws.ext[n_se + n_data + k] = ws.data[k];
    for (std::size_t k = 0; k < n_sc; ++k) ws.ext[k] *= f.taps.values[k];

    ws.freq.assign(n_fft, cplx{0.0, 0.0});
    const int half = cfg_.n_sc() / 2;
    for (std::size_t i = 0; i < n_sc; ++i) {
        const int bin = (static_cast<int>(i) - half + cfg_.n_fft) % cfg_.n_fft;
        ws.freq[static_cast<std::size_t>(bin)] = ws.ext[i];
    }
    dft_fft_.inverse(ws.freq);

    ChainOutput out;
    out.papr_db = fdss::papr_db(ws.freq);

    // channel
    if (noise.sigma2 > 0.0) {
        for (auto& v : ws.freq) v += noise_rng.next_cgauss(noise.sigma2);
    }

    // RX: demodulate the OFDM symbol, matched-filter, combine, normalize
    dft_fft_.forward(ws.freq);
    for (std::size_t i = 0; i < n_sc; ++i) {
        const int bin = (static_cast<int>(i) - half + cfg_.n_fft) % cfg_.n_fft;
        ws.ext[i] = ws.freq[static_cast<std::size_t>(bin)] * f.taps.values[i];
    }
    ws.data.resize(n_data);
    for (std::size_t j = 0; j < n_data; ++j) {
        cplx v = ws.ext[n_se + j];
        if (j < n_se) {
            v += ws.ext[n_sc - n_se + j];
        } else if (j >= n_data - n_se) {
            v += ws.ext[j - (n_data - n_se)];
        }
        ws.data[j] = v * f.inv_gains[j];
    }
    dft_data_.inverse(ws.data);

    out.sq_error = 0.0;
    out.sym_errors = 0;
    ws.sym.resize(n_data);
    for (std::size_t i = 0; i < n_data; ++i) {
        out.sq_error += std::norm(ws.x[i] - ws.data[i]);
        int best = 0;
        double best_d = std::norm(ws.data[i] - kQpsk[0]);
        for (int k = 1; k < 4; ++k) {
            const double d = std::norm(ws.data[i] - kQpsk[k]);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        ws.sym[i] = static_cast<std::uint8_t>(best);
        out.sym_errors += (ws.sym[i] != s[i]) ? 1 : 0;
    }
    return out;
}

ChainOutput DftsOfdmChain::run(const FilterTaps& taps, std::span<const std::uint8_t> s,
                               const NoiseModel& noise, BlockRng noise_rng) const {
    ChainWorkspace ws;
    return run(prepare(taps), s, noise, noise_rng, ws);
}

double DftsOfdmChain::tx_papr_db(const PreparedFilter& f, std::span<const std::uint8_t> s,
                                 ChainWorkspace& ws) const {
    const auto n_data = static_cast<std::size_t>(cfg_.n_data);
    const auto n_se = static_cast<std::size_t>(cfg_.n_se);
    const auto n_sc = static_cast<std::size_t>(cfg_.n_sc());
    const auto n_fft = static_cast<std::size_t>(cfg_.n_fft);
    if (s.size() != n_data) throw ValidationError("tx_papr_db: expected n_data indices");

    ws.data.resize(n_data);
    for (std::size_t i = 0; i < n_data; ++i) ws.data[i] = kQpsk[s[i] & 3u];
    dft_data_.forward(ws.data);
    ws.ext.resize(n_sc);
    for (std::size_t k = 0; k < n_se; ++k) ws.ext[k] = ws.data[n_data - n_se + k];
    for (std::size_t k = 0; k < n_data; ++k) ws.ext[n_se + k] = ws.data[k];
    for (std::size_t k = 0; k < n_se; ++k) ws.ext[n_se + n_data + k] = ws.data[k];
    for (std::size_t k = 0; k < n_sc; ++k) ws.ext[k] *= f.taps.values[k];

    ws.freq.assign(n_fft, cplx{0.0, 0.0});
    const int half = cfg_.n_sc() / 2;
    for (std::size_t i = 0; i < n_sc; ++i) {
        const int bin = (static_cast<int>(i) - half + cfg_.n_fft) % cfg_.n_fft;
        ws.freq[static_cast<std::size_t>(bin)] = ws.ext[i];
    }
    dft_fft_.inverse(ws.freq);
    return fdss::papr_db(ws.freq);
}

ChainTrace DftsOfdmChain::run_traced(const FilterTaps& taps, std::span<const std::uint8_t> s,
                                     const NoiseModel& noise, BlockRng noise_rng) const {
    const PreparedFilter f = prepare(taps);
    ChainTrace t;
    t.x = map_symbols(s);
    t.X = dft_spread(t.x);
    t.X_ext = spectral_extend(t.X);
    t.X_tilde = apply_fdss(t.X_ext, taps);
    t.x_tilde = ofdm_modulate(t.X_tilde);
    t.y_tilde = add_awgn(t.x_tilde, noise, noise_rng);
    t.Y_tilde = receiver_front(t.y_tilde);
    t.R = matched_filter(t.Y_tilde, taps);
    t.T = se_combine(t.R);
    t.Y_hat = normalize(t.T, f.gains);
    t.y = idft_despread(t.Y_hat);
    t.s_hat = demod(t.y);
    return t;
}

}  // namespace fdss
