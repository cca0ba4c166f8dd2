#include "fdss/filters.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "fdss/chain.hpp"
#include "fdss/report.hpp"

namespace fdss {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr double kRectEps = 1e-8;  // curvature scale of the smooth rectifier

double horner(std::span<const double> coeffs, double s) {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * s + coeffs[i];
    return acc;
}

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void normalize_energy(dvec& values, double e_fdss) {
    double energy = 0.0;
    for (double v : values) energy += v * v;
    if (!(energy > 0.0)) throw SimulationError("filter normalization: zero energy");
    const double scale = std::sqrt(e_fdss / energy);
    for (double& v : values) v *= scale;
}

}  // namespace

std::string design_name(FilterDesign d) {
    switch (d) {
        case FilterDesign::kNonFlat: return "non_flat";
        case FilterDesign::kFlat: return "flat";
        case FilterDesign::kZeroIsi: return "zero_isi";
    }
    throw ValidationError("unknown filter design");
}

FilterDesign parse_design(const std::string& name) {
    if (name == "non_flat") return FilterDesign::kNonFlat;
    if (name == "flat") return FilterDesign::kFlat;
    if (name == "zero_isi") return FilterDesign::kZeroIsi;
    throw ValidationError("unknown filter design: " + name);
}

void FilterTaps::validate(const SystemConfig& cfg) const {
    const auto n_sc = static_cast<std::size_t>(cfg.n_sc());
    if (values.size() != n_sc) {
        throw ValidationError("FilterTaps: expected " + std::to_string(n_sc) +
                              " taps, got " + std::to_string(values.size()));
    }
    double energy = 0.0;
    for (std::size_t k = 0; k < n_sc; ++k) {
        if (!(values[k] >= 0.0)) {
            throw ValidationError("FilterTaps: negative tap at index " + std::to_string(k));
        }
        energy += values[k] * values[k];
        if (std::abs(values[k] - values[n_sc - 1 - k]) > 1e-12) {
            throw ValidationError("FilterTaps: even symmetry violated at index " +
                                  std::to_string(k));
        }
    }
    if (std::abs(energy - e_fdss) > 1e-9 * std::max(1.0, e_fdss)) {
        throw ValidationError("FilterTaps: energy " + std::to_string(energy) +
                              " does not match e_fdss " + std::to_string(e_fdss));
    }
}

void PolyFilterModel::validate() const {
    if (degree < 0) throw ValidationError("PolyFilterModel: negative degree");
    if (coeffs.size() != static_cast<std::size_t>(degree) + 1) {
        throw ValidationError("PolyFilterModel: coeffs size must be degree+1");
    }
    if (design != FilterDesign::kZeroIsi) {
        if (degree % 2 != 0) {
            throw ValidationError("PolyFilterModel: degree must be even for this design");
        }
        for (int d = 1; d <= degree; d += 2) {
            if (coeffs[static_cast<std::size_t>(d)] != 0.0) {
                throw ValidationError("PolyFilterModel: odd coefficient a_" +
                                      std::to_string(d) + " must be zero for this design");
            }
        }
    }
}

std::vector<int> active_degrees(FilterDesign design, int degree) {
    std::vector<int> out;
    const int step = (design == FilterDesign::kZeroIsi) ? 1 : 2;
    for (int d = 0; d <= degree; d += step) out.push_back(d);
    return out;
}

dvec support_values(FilterDesign design, const SystemConfig& cfg) {
    cfg.validate();
    const int n_sc = cfg.n_sc();
    const int n_se = cfg.n_se;
    switch (design) {
        case FilterDesign::kNonFlat: {
            dvec s(static_cast<std::size_t>(n_sc), 0.0);
            if (n_sc == 1) return s;
            for (int k = 0; k < n_sc / 2; ++k) {
                const double v = -1.0 + 2.0 * k / (n_sc - 1);
                s[static_cast<std::size_t>(k)] = v;
                s[static_cast<std::size_t>(n_sc - 1 - k)] = -v;
            }
            return s;
        }
        case FilterDesign::kFlat: {
            dvec s(static_cast<std::size_t>(n_sc), 0.0);
            for (int k = 0; k < 2 * n_se; ++k) {
                const double v = -1.0 + static_cast<double>(k) / (2 * n_se);
                s[static_cast<std::size_t>(k)] = v;
                s[static_cast<std::size_t>(n_sc - 1 - k)] = -v;
            }
            return s;
        }
        case FilterDesign::kZeroIsi: {
            dvec s(static_cast<std::size_t>(n_se), 0.0);
            if (n_se == 1) {
                s[0] = 0.5;
            } else {
                for (int m = 0; m < n_se; ++m) {
                    s[static_cast<std::size_t>(m)] = static_cast<double>(m) / (n_se - 1);
                }
            }
            return s;
        }
    }
    throw ValidationError("unknown filter design");
}

double passband_constant(double e_fdss, int n_data) {
    if (!(e_fdss > 0.0) || n_data <= 0) {
        throw ValidationError("passband_constant: inputs must be positive");
    }
    return std::sqrt(e_fdss / n_data);
}

dvec vestigial_complete(std::span<const double> upper, double c_v) {
    const double lo = c_v * kInvSqrt2;
    const std::size_t n = upper.size();
    dvec lower(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
        if (upper[m] < lo - 1e-12 || upper[m] > c_v + 1e-12) {
            throw ValidationError("vestigial_complete: upper sideband tap outside "
                                  "[c_v/sqrt(2), c_v]");
        }
        const double u = std::clamp(upper[m], lo, c_v);
        lower[n - 1 - m] = std::sqrt(std::max(0.0, c_v * c_v - u * u));
    }
    return lower;
}

FilterTaps eval_poly_filter(const PolyFilterModel& model, const SystemConfig& cfg,
                            Rectifier rect, double e_fdss) {
    model.validate();
    cfg.validate();
    if (!(e_fdss > 0.0)) throw ValidationError("eval_poly_filter: e_fdss must be positive");
    const int n_sc = cfg.n_sc();
    const int n_se = cfg.n_se;
    const dvec support = support_values(model.design, cfg);
    FilterTaps out;
    out.e_fdss = e_fdss;

    if (model.design == FilterDesign::kZeroIsi) {
        const double c_v = passband_constant(e_fdss, cfg.n_data);
        dvec upper(static_cast<std::size_t>(n_se), 0.0);
        for (int m = 0; m < n_se; ++m) {
            const double raw = horner(model.coeffs, support[static_cast<std::size_t>(m)]);
            // squash onto [c_v/sqrt(2), c_v]; the constraint holds by construction
            upper[static_cast<std::size_t>(m)] =
                c_v * (kInvSqrt2 + (1.0 - kInvSqrt2) * logistic(raw));
        }
        const dvec lower = vestigial_complete(upper, c_v);
        dvec& v = out.values;
        v.assign(static_cast<std::size_t>(n_sc), c_v);
        for (int k = 0; k < n_se; ++k) {
            v[static_cast<std::size_t>(k)] = lower[static_cast<std::size_t>(k)];
            v[static_cast<std::size_t>(n_se + k)] = upper[static_cast<std::size_t>(k)];
            v[static_cast<std::size_t>(n_sc - 1 - k)] = lower[static_cast<std::size_t>(k)];
            v[static_cast<std::size_t>(n_sc - 1 - n_se - k)] = upper[static_cast<std::size_t>(k)];
        }
        // energy equals e_fdss by the vestigial identity; no rescaling needed
        return out;
    }

    dvec raw(static_cast<std::size_t>(n_sc), 0.0);
    double raw_max = -1e300;
    for (int k = 0; k < n_sc; ++k) {
        raw[static_cast<std::size_t>(k)] = horner(model.coeffs, support[static_cast<std::size_t>(k)]);
        raw_max = std::max(raw_max, raw[static_cast<std::size_t>(k)]);
    }
    if (!(raw_max > 0.0)) {
        throw SimulationError("eval_poly_filter: degenerate filter (no positive tap)");
    }
    out.values.resize(static_cast<std::size_t>(n_sc));
    for (int k = 0; k < n_sc; ++k) {
        const double x = raw[static_cast<std::size_t>(k)];
        out.values[static_cast<std::size_t>(k)] =
            (rect == Rectifier::kHard) ? std::max(x, 0.0)
                                       : 0.5 * (x + std::sqrt(x * x + kRectEps));
    }
    normalize_energy(out.values, e_fdss);
    return out;
}

FilterTaps resample(const PolyFilterModel& model, const SystemConfig& new_cfg,
                    Rectifier rect, double e_fdss) {
    return eval_poly_filter(model, new_cfg, rect, e_fdss);
}

FilterTaps rrc_taps(const SystemConfig& cfg, double e_fdss) {
    cfg.validate();
    const int n_sc = cfg.n_sc();
    const double alpha = cfg.ebw();  // roll-off fills the extension exactly
    FilterTaps out;
    out.e_fdss = e_fdss;
    out.values.resize(static_cast<std::size_t>(n_sc));
    const double mid = (n_sc - 1) / 2.0;
    for (int k = 0; k < n_sc; ++k) {
        const double f = std::abs((k - mid) / cfg.n_data);
        double rc;
        if (alpha == 0.0) {
            rc = (f <= 0.5) ? 1.0 : 0.0;
        } else {
            const double lo = 0.5 * (1.0 - alpha);
            const double hi = 0.5 * (1.0 + alpha);
            if (f <= lo) {
                rc = 1.0;
            } else if (f <= hi) {
                rc = 0.5 * (1.0 + std::cos(kPi / alpha * (f - lo)));
            } else {
                rc = 0.0;
            }
        }
        out.values[static_cast<std::size_t>(k)] = std::sqrt(rc);
    }
    normalize_energy(out.values, e_fdss);
    return out;
}

FilterTaps rect_taps(const SystemConfig& cfg, double e_fdss) {
    cfg.validate();
    FilterTaps out;
    out.e_fdss = e_fdss;
    out.values.assign(static_cast<std::size_t>(cfg.n_sc()),
                      std::sqrt(e_fdss / cfg.n_sc()));
    return out;
}

double check_zero_isi(const FilterTaps& taps, const SystemConfig& cfg) {
    const dvec g = combined_gain(taps, cfg, NormMode::kMrc);
    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
    double worst = 0.0;
    for (double v : g) worst = std::max(worst, std::abs(v - mean));
    return worst / mean;
}

namespace {

// Least squares via Householder QR; returns x minimizing ||A x - b||.
// Requires at least as many rows as columns.
dvec qr_least_squares(std::vector<dvec> a_cols, dvec b) {
    const std::size_t n = b.size();
    const std::size_t k = a_cols.size();
    if (k > n) throw ValidationError("qr_least_squares: underdetermined system");
    for (std::size_t c = 0; c < k; ++c) {
        // Householder vector for column c below the diagonal
        double norm2 = 0.0;
        for (std::size_t r = c; r < n; ++r) norm2 += a_cols[c][r] * a_cols[c][r];
        double alpha = std::sqrt(norm2);
        if (a_cols[c][c] > 0.0) alpha = -alpha;
        if (alpha == 0.0) continue;
        dvec v(n, 0.0);
        for (std::size_t r = c; r < n; ++r) v[r] = a_cols[c][r];
        v[c] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t r = c; r < n; ++r) vnorm2 += v[r] * v[r];
        if (vnorm2 == 0.0) continue;
        auto reflect = [&](dvec& col) {
            double dot = 0.0;
            for (std::size_t r = c; r < n; ++r) dot += v[r] * col[r];
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t r = c; r < n; ++r) col[r] -= f * v[r];
        };
        for (std::size_t cc = c; cc < k; ++cc) reflect(a_cols[cc]);
        reflect(b);
    }
    // back-substitute the upper triangle
    dvec x(k, 0.0);
    for (std::size_t c = k; c-- > 0;) {
        double acc = b[c];
        for (std::size_t cc = c + 1; cc < k; ++cc) acc -= a_cols[cc][c] * x[cc];
        const double diag = a_cols[c][c];
        x[c] = (diag != 0.0) ? acc / diag : 0.0;
    }
    return x;
}

}  // namespace

PolyFilterModel fit_rrc_model(FilterDesign design, const SystemConfig& cfg, int degree) {
    cfg.validate();
    if (design != FilterDesign::kZeroIsi && degree % 2 != 0) {
        throw ValidationError("fit_rrc_model: degree must be even for this design");
    }
    const FilterTaps rrc = rrc_taps(cfg);
    const dvec support = support_values(design, cfg);
    std::vector<int> active = active_degrees(design, degree);

    dvec targets;
    if (design == FilterDesign::kZeroIsi) {
        // invert the sideband squash at the RRC upper-sideband values
        const double c_v = passband_constant(1.0, cfg.n_data);
        targets.resize(static_cast<std::size_t>(cfg.n_se));
        for (int m = 0; m < cfg.n_se; ++m) {
            const double u = rrc.values[static_cast<std::size_t>(cfg.n_se + m)];
            double t = (u / c_v - kInvSqrt2) / (1.0 - kInvSqrt2);
            t = std::clamp(t, 1e-9, 1.0 - 1e-9);
            targets[static_cast<std::size_t>(m)] = std::log(t / (1.0 - t));
        }
    } else {
        targets = rrc.values;
    }

    // ridge-regularized fit: high-order monomials are nearly collinear on
    // these supports, and an unregularized fit returns huge alternating
    // coefficients that a per-coordinate optimizer cannot reshape. The
    // penalty rows keep coefficients O(10) at a sub-percent tap error.
    const double ridge = 1e-3;
    const std::size_t rows = targets.size() + active.size();
    dvec rhs(rows, 0.0);
    std::copy(targets.begin(), targets.end(), rhs.begin());
    std::vector<dvec> cols(active.size(), dvec(rows, 0.0));
    for (std::size_t c = 0; c < active.size(); ++c) {
        for (std::size_t r = 0; r < targets.size(); ++r) {
            cols[c][r] = std::pow(support[r], active[c]);
        }
        cols[c][targets.size() + c] = std::sqrt(ridge);
    }
    const dvec sol = qr_least_squares(std::move(cols), rhs);

    PolyFilterModel model;
    model.design = design;
    model.degree = degree;
    model.coeffs.assign(static_cast<std::size_t>(degree) + 1, 0.0);
    for (std::size_t c = 0; c < active.size(); ++c) {
        model.coeffs[static_cast<std::size_t>(active[c])] = sol[c];
    }
    return model;
}

void save_filter(const std::string& path, const PolyFilterModel& model,
                 const SystemConfig& cfg, double e_fdss) {
    const FilterTaps taps = eval_poly_filter(model, cfg, Rectifier::kHard, e_fdss);
    nlohmann::json j;
    j["design"] = design_name(model.design);
    j["degree"] = model.degree;
    j["coeffs"] = model.coeffs;
    j["n_data"] = cfg.n_data;
    j["n_se"] = cfg.n_se;
    j["e_fdss"] = e_fdss;
    j["taps"] = taps.values;
    report::write_text_atomic(path, j.dump(2) + "\n");
}

FilterFile load_filter(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open filter file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed filter file " + path + ": " + e.what());
    }
    FilterFile f;
    try {
        f.model.design = parse_design(j.at("design").get<std::string>());
        f.model.degree = j.at("degree").get<int>();
        f.model.coeffs = j.at("coeffs").get<dvec>();
        f.n_data = j.at("n_data").get<int>();
        f.n_se = j.at("n_se").get<int>();
        f.e_fdss = j.at("e_fdss").get<double>();
        f.taps.values = j.at("taps").get<dvec>();
        f.taps.e_fdss = f.e_fdss;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("invalid filter record in " + path + ": " + e.what());
    }
    f.model.validate();

    // coefficients are authoritative: re-evaluate and cross-check stored taps
    SystemConfig dims;
    dims.n_data = f.n_data;
    dims.n_se = f.n_se;
    dims.n_fft = 1;
    while (dims.n_fft < dims.n_sc()) dims.n_fft <<= 1;
    const FilterTaps fresh = eval_poly_filter(f.model, dims, Rectifier::kHard, f.e_fdss);
    if (fresh.values.size() != f.taps.values.size()) {
        throw ValidationError("filter file " + path + ": taps length inconsistent with dims");
    }
    for (std::size_t k = 0; k < fresh.values.size(); ++k) {
        if (std::abs(fresh.values[k] - f.taps.values[k]) > 1e-9) {
            throw ValidationError("filter file " + path +
                                  ": stored taps disagree with coefficients");
        }
    }
    f.taps = fresh;
    return f;
}

}  // namespace fdss
