#include "fdss/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace fdss {

double papr_ratio(std::span<const cplx> samples) {
    if (samples.empty()) throw SimulationError("papr: empty waveform");
    double peak = 0.0;
    double sum = 0.0;
    for (const cplx& v : samples) {
        const double p = std::norm(v);
        peak = std::max(peak, p);
        sum += p;
    }
    if (!(sum > 0.0)) throw SimulationError("papr: all-zero waveform");
    return peak / (sum / static_cast<double>(samples.size()));
}

double papr_db(std::span<const cplx> samples) {
    return 10.0 * std::log10(papr_ratio(samples));
}

void AuccdfConfig::validate() const {
    if (edges_db.empty()) throw ValidationError("AuccdfConfig: no bin edges");
    for (std::size_t i = 1; i < edges_db.size(); ++i) {
        if (!(edges_db[i] > edges_db[i - 1])) {
            throw ValidationError("AuccdfConfig: edges must be strictly increasing");
        }
    }
    if (!(sharpness > 0.0)) throw ValidationError("AuccdfConfig: sharpness must be positive");
}

dvec default_papr_edges_db() {
    dvec edges;
    edges.reserve(201);
    for (int i = 0; i <= 200; ++i) edges.push_back(0.05 * i);
    return edges;
}

AuccdfConfig default_auccdf_config() {
    AuccdfConfig a;
    a.edges_db = default_papr_edges_db();
    a.sharpness = 100.0;
    return a;
}

CcdfAccumulator::CcdfAccumulator(dvec edges_db) : edges_(std::move(edges_db)) {
    AuccdfConfig check;
    check.edges_db = edges_;
    check.validate();
    bin_counts_.assign(edges_.size() + 1, 0);
}

void CcdfAccumulator::add(double papr_db_value) {
    // bin index = number of edges strictly below the value, so
    // Pr[PAPR > edge_i] counts exactly the samples landing in bins > i.
    const auto it = std::lower_bound(edges_.begin(), edges_.end(), papr_db_value);
    ++bin_counts_[static_cast<std::size_t>(it - edges_.begin())];
    ++n_;
}

void CcdfAccumulator::merge(const CcdfAccumulator& other) {
    if (other.edges_ != edges_) throw ValidationError("CcdfAccumulator: edge grids differ");
    for (std::size_t i = 0; i < bin_counts_.size(); ++i) bin_counts_[i] += other.bin_counts_[i];
    n_ += other.n_;
}

CcdfCurve CcdfAccumulator::curve() const {
    CcdfCurve c;
    c.edges_db = edges_;
    c.probs.assign(edges_.size(), 0.0);
    c.n_samples = n_;
    std::int64_t above = 0;
    for (std::size_t i = edges_.size(); i-- > 0;) {
        above += bin_counts_[i + 1];
        c.probs[i] = n_ ? static_cast<double>(above) / static_cast<double>(n_) : 0.0;
    }
    return c;
}

double ccdf_level(const CcdfCurve& curve, double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("ccdf_level: p must lie in (0,1)");
    if (static_cast<double>(curve.n_samples) * p < 1.0) {
        throw SimulationError("ccdf_level: insufficient samples for p = " +
                              std::to_string(p));
    }
    const auto& e = curve.edges_db;
    const auto& q = curve.probs;
    if (q.empty() || q.front() < p) {
        throw SimulationError("ccdf_level: curve already below p at the lowest edge");
    }
    for (std::size_t i = 0; i + 1 < q.size(); ++i) {
        if (q[i] >= p && q[i + 1] < p) {
            if (q[i] == p) return e[i];
            // log-linear in probability; floor the lower bracket at half a
            // sample to keep the interpolation finite when it hits zero
            const double fl = 0.5 / static_cast<double>(curve.n_samples);
            const double lo = std::max(q[i + 1], fl);
            const double t = (std::log(p) - std::log(q[i])) / (std::log(lo) - std::log(q[i]));
            return e[i] + std::clamp(t, 0.0, 1.0) * (e[i + 1] - e[i]);
        }
    }
    throw SimulationError("ccdf_level: curve never crosses p within the edge grid");
}

double auccdf_smooth(std::span<const double> papr_db_batch, const AuccdfConfig& acfg) {
    acfg.validate();
    if (papr_db_batch.empty()) throw ValidationError("auccdf_smooth: empty batch");
    const double inv_b = 1.0 / static_cast<double>(papr_db_batch.size());
    double total = 0.0;
    for (double edge : acfg.edges_db) {
        double cdf = 0.0;
        for (double v : papr_db_batch) {
            const double x = acfg.sharpness * (edge - v);
            cdf += (x >= 0.0) ? 1.0 / (1.0 + std::exp(-x))
                              : std::exp(x) / (1.0 + std::exp(x));
        }
        total += 1.0 - cdf * inv_b;
    }
    return total;
}

double spectral_flatness_db(const FilterTaps& taps, const SystemConfig& cfg) {
    cfg.validate();
    const int n_sc = cfg.n_sc();
    const int first = 2 * cfg.n_se;            // 0-based inclusive
    const int last = n_sc - 2 * cfg.n_se - 1;  // 0-based inclusive
    const int n = last - first + 1;
    if (n <= 0) throw ValidationError("spectral_flatness: empty mid band");
    if (taps.values.size() != static_cast<std::size_t>(n_sc)) {
        throw ValidationError("spectral_flatness: taps length mismatch");
    }
    double log_sum = 0.0;
    double mean = 0.0;
    bool has_zero = false;
    bool all_equal = true;
    for (int k = first; k <= last; ++k) {
        const double v = taps.values[static_cast<std::size_t>(k)];
        mean += v;
        all_equal &= (v == taps.values[static_cast<std::size_t>(first)]);
        if (v <= 0.0) {
            has_zero = true;
        } else {
            log_sum += std::log(v);
        }
    }
    mean /= n;
    if (all_equal && !has_zero) return 0.0;  // constant mid band: SFM is 1 exactly
    if (has_zero || !(mean > 0.0)) return -300.0;  // saturating sentinel
    // AM-GM puts SFM <= 1; clamp the rounding noise so the dB value never
    // goes positive, and saturate the other end for the trainer
    const double sfm_db = 10.0 * (log_sum / n - std::log(mean)) / std::log(10.0);
    return std::clamp(sfm_db, -300.0, 0.0);
}

double ser_rate(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> decided) {
    if (sent.size() != decided.size()) throw ValidationError("ser_rate: length mismatch");
    if (sent.empty()) throw ValidationError("ser_rate: empty input");
    std::int64_t errs = 0;
    for (std::size_t i = 0; i < sent.size(); ++i) errs += (sent[i] != decided[i]) ? 1 : 0;
    return static_cast<double>(errs) / static_cast<double>(sent.size());
}

double snr_at_ser(const SweepResult& sweep, double target_ser) {
    if (!(target_ser > 0.0)) throw ValidationError("snr_at_ser: target must be positive");
    const auto& pts = sweep.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i].ser;
        const double b = pts[i + 1].ser;
        if (a >= target_ser && b <= target_ser) {
            if (a == target_ser) return pts[i].snr_db;
            if (b == target_ser) return pts[i + 1].snr_db;
            if (!(b > 0.0)) return pts[i + 1].snr_db;
            const double t = (std::log(target_ser) - std::log(a)) / (std::log(b) - std::log(a));
            return pts[i].snr_db + t * (pts[i + 1].snr_db - pts[i].snr_db);
        }
    }
    throw SimulationError("snr_at_ser: target SER not bracketed by the sweep");
}

double papr_gain_db(const CcdfCurve& baseline, const CcdfCurve& candidate, double p) {
    return ccdf_level(baseline, p) - ccdf_level(candidate, p);
}

double snr_loss_db(const SweepResult& candidate, const SweepResult& baseline,
                   double target_ser) {
    return snr_at_ser(candidate, target_ser) - snr_at_ser(baseline, target_ser);
}

double qpsk_ser(double snr_lin) {
    // per-dimension error probability Q(sqrt(snr)); symbol wrong if either
    // quadrature flips
    const double q = 0.5 * std::erfc(std::sqrt(snr_lin * 0.5));
    return 2.0 * q - q * q;
}

double qpsk_snr_db_at_ser(double target_ser) {
    if (!(target_ser > 0.0 && target_ser < 1.0)) {
        throw ValidationError("qpsk_snr_db_at_ser: target must lie in (0,1)");
    }
    double lo = -30.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (qpsk_ser(std::pow(10.0, mid / 10.0)) > target_ser) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

}  // namespace fdss
