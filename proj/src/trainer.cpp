#include "fdss/trainer.hpp"

#include <chrono>
#include <cmath>

namespace fdss {

namespace {

// derived seeds keep training batches and held-out evaluation disjoint
// from the campaign streams that use the raw user seed
std::uint64_t train_seed(std::uint64_t seed) { return mix64(seed ^ 0x747261696eULL); }

}  // namespace

void LossWeights::validate() const {
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !(gamma >= 0.0)) {
        throw ValidationError("LossWeights: tradeoff coefficients must be non-negative");
    }
}

void TrainConfig::validate() const {
    if (batch_blocks < 1) throw ValidationError("TrainConfig: batch_blocks must be >= 1");
    if (steps < 0) throw ValidationError("TrainConfig: steps must be >= 0");
    if (!(fd_step > 0.0)) throw ValidationError("TrainConfig: fd_step must be positive");
    if (!(lr > 0.0)) throw ValidationError("TrainConfig: lr must be positive");
    if (degree < 0) throw ValidationError("TrainConfig: degree must be >= 0");
}

double TrainConfig::resolved_train_snr_db() const {
    return std::isnan(train_snr_db) ? qpsk_snr_db_at_ser(1e-2) : train_snr_db;
}

LossBreakdown compute_loss(const BatchStats& stats, const FilterTaps& taps,
                           const SystemConfig& cfg, const LossWeights& weights,
                           const AuccdfConfig& acfg, SfmSign sign) {
    weights.validate();
    if (stats.papr_db.empty() || stats.papr_db.size() != stats.sq_err.size()) {
        throw ValidationError("compute_loss: malformed batch statistics");
    }
    const double inv_b = 1.0 / static_cast<double>(stats.papr_db.size());
    LossBreakdown out;
    out.mse = pairwise_sum(stats.sq_err) * inv_b;
    const double mean_papr = pairwise_sum(stats.papr_db) * inv_b;
    const double auccdf = auccdf_smooth(stats.papr_db, acfg);
    out.papr = weights.lambda1 * mean_papr + weights.lambda2 * auccdf;
    const double sfm_db = spectral_flatness_db(taps, cfg);
    out.shape = (sign == SfmSign::kPaperLiteral) ? sfm_db : -sfm_db;
    out.total = out.mse + out.papr + weights.gamma * out.shape;
    return out;
}

LossBreakdown batch_loss(const PolyFilterModel& model, const DftsOfdmChain& chain,
                         const LossWeights& weights, const TrainConfig& tcfg,
                         const AuccdfConfig& acfg, int step) {
    const SystemConfig& cfg = chain.config();
    const FilterTaps taps = eval_poly_filter(model, cfg, Rectifier::kSmooth);
    const PreparedFilter f = chain.prepare(taps);
    const NoiseModel noise = calibrate_noise(tcfg.resolved_train_snr_db(), cfg);
    const std::uint64_t offset =
        static_cast<std::uint64_t>(step) * static_cast<std::uint64_t>(tcfg.batch_blocks);
    const BatchStats stats =
        evaluate_batch(chain, f, noise, tcfg.batch_blocks, train_seed(tcfg.seed), offset);
    return compute_loss(stats, taps, cfg, weights, acfg, tcfg.sfm_sign);
}

dvec grad_estimate(const PolyFilterModel& model, const DftsOfdmChain& chain,
                   const LossWeights& weights, const TrainConfig& tcfg,
                   const AuccdfConfig& acfg, int step, double fd_step) {
    model.validate();
    if (!(fd_step > 0.0)) throw ValidationError("grad_estimate: fd_step must be positive");
    dvec grad(model.coeffs.size(), 0.0);
    PolyFilterModel probe = model;
    for (int d : active_degrees(model.design, model.degree)) {
        const auto di = static_cast<std::size_t>(d);
        const double a = model.coeffs[di];
        const double h = fd_step * std::max(std::abs(a), 1.0);

        probe.coeffs[di] = a + h;
        const double up = batch_loss(probe, chain, weights, tcfg, acfg, step).total;
        probe.coeffs[di] = a - h;
        const double down = batch_loss(probe, chain, weights, tcfg, acfg, step).total;
        probe.coeffs[di] = a;

        if (!std::isfinite(up) || !std::isfinite(down)) {
            throw SimulationError("grad_estimate: non-finite loss perturbing coefficient a_" +
                                  std::to_string(d));
        }
        grad[di] = (up - down) / (2.0 * h);
    }
    return grad;
}

void adam_update(AdamState& state, std::span<const double> grad,
                 std::span<double> coeffs, double lr, double beta1, double beta2,
                 double eps) {
    if (grad.size() != coeffs.size()) throw ValidationError("adam_update: size mismatch");
    if (state.m.size() != grad.size()) {
        state.m.assign(grad.size(), 0.0);
        state.v.assign(grad.size(), 0.0);
        state.step = 0;
    }
    ++state.step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < grad.size(); ++i) {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        coeffs[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

TrainReport train(FilterDesign design, const SystemConfig& cfg,
                  const LossWeights& weights, const TrainConfig& tcfg) {
    cfg.validate();
    weights.validate();
    tcfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    const DftsOfdmChain chain(cfg);
    const AuccdfConfig acfg = default_auccdf_config();
    PolyFilterModel model = fit_rrc_model(design, cfg, tcfg.degree);

    TrainReport report;
    report.seed = tcfg.seed;
    report.train_snr_db = tcfg.resolved_train_snr_db();
    report.best_loss = std::numeric_limits<double>::infinity();
    AdamState adam;

    for (int step = 0; step <= tcfg.steps; ++step) {
        const LossBreakdown loss = batch_loss(model, chain, weights, tcfg, acfg, step);
        if (!std::isfinite(loss.total)) {
            throw SimulationError("train: loss diverged at step " + std::to_string(step));
        }
        report.history.push_back({step, loss});
        if (loss.total < report.best_loss) {
            report.best_loss = loss.total;
            report.best_step = step;
            report.model = model;
        }
        if (step == tcfg.steps) break;
        const dvec grad = grad_estimate(model, chain, weights, tcfg, acfg, step, tcfg.fd_step);
        adam_update(adam, grad, model.coeffs, tcfg.lr, tcfg.beta1, tcfg.beta2, tcfg.eps);
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace fdss
