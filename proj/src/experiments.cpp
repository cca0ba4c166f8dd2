#include "fdss/experiments.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "fdss/report.hpp"

namespace fdss {

namespace {

using nlohmann::json;

SystemConfig parse_config(const json& j) {
    SystemConfig cfg;
    cfg.n_data = j.value("n_data", cfg.n_data);
    cfg.n_se = j.value("n_se", cfg.n_se);
    cfg.n_fft = j.value("n_fft", cfg.n_fft);
    cfg.mod_order = j.value("mod_order", cfg.mod_order);
    const std::string mode = j.value("norm_mode", std::string("mrc"));
    if (mode == "mrc") {
        cfg.norm_mode = NormMode::kMrc;
    } else if (mode == "literal") {
        cfg.norm_mode = NormMode::kLiteral;
    } else {
        throw ValidationError("config: unknown norm_mode '" + mode + "'");
    }
    cfg.validate();
    return cfg;
}

dvec parse_snr_grid(const json& j) {
    dvec grid;
    if (j.is_array()) {
        grid = j.get<dvec>();
    } else if (j.is_object()) {
        const double start = j.at("start").get<double>();
        const double stop = j.at("stop").get<double>();
        const double step = j.at("step").get<double>();
        if (!(step > 0.0) || stop < start) {
            throw ValidationError("snr_grid_db: need step > 0 and stop >= start");
        }
        for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
    } else {
        throw ValidationError("snr_grid_db: expected array or {start,stop,step}");
    }
    if (grid.empty()) throw ValidationError("snr_grid_db: empty grid");
    return grid;
}

SerSpec parse_ser(const json& j) {
    SerSpec s;
    s.snr_grid_db = parse_snr_grid(j.at("snr_grid_db"));
    s.target_ser = j.value("target_ser", s.target_ser);
    s.stop.min_errors = j.value("min_errors", s.stop.min_errors);
    s.stop.min_blocks = j.value("min_blocks", s.stop.min_blocks);
    s.stop.max_blocks = j.value("max_blocks", s.stop.max_blocks);
    if (!(s.target_ser > 0.0 && s.target_ser < 1.0)) {
        throw ValidationError("ser: target_ser must lie in (0,1)");
    }
    return s;
}

CcdfSpec parse_ccdf(const json& j) {
    CcdfSpec c;
    c.n_blocks = j.value("n_blocks", c.n_blocks);
    c.level = j.value("level", c.level);
    if (c.n_blocks <= 0) throw ValidationError("ccdf: n_blocks must be positive");
    if (!(c.level > 0.0 && c.level < 1.0)) {
        throw ValidationError("ccdf: level must lie in (0,1)");
    }
    return c;
}

TrainSpec parse_train(const json& j, std::uint64_t default_seed) {
    TrainSpec t;
    t.label = j.value("label", t.label);
    t.design = parse_design(j.value("design", std::string("zero_isi")));
    if (j.contains("weights")) {
        const json& w = j.at("weights");
        t.weights.lambda1 = w.value("lambda1", 0.0);
        t.weights.lambda2 = w.value("lambda2", 0.0);
        t.weights.gamma = w.value("gamma", 0.0);
    }
    t.config.degree = j.value("degree", t.config.degree);
    t.config.batch_blocks = j.value("batch_blocks", t.config.batch_blocks);
    t.config.steps = j.value("steps", t.config.steps);
    t.config.lr = j.value("lr", t.config.lr);
    t.config.beta1 = j.value("beta1", t.config.beta1);
    t.config.beta2 = j.value("beta2", t.config.beta2);
    t.config.eps = j.value("eps", t.config.eps);
    t.config.fd_step = j.value("fd_step", t.config.fd_step);
    if (j.contains("train_snr_db")) t.config.train_snr_db = j.at("train_snr_db").get<double>();
    t.config.seed = j.value("seed", default_seed);
    const std::string sign = j.value("sfm_sign", std::string("penalize"));
    if (sign == "penalize") {
        t.config.sfm_sign = SfmSign::kPenalizeNonFlat;
    } else if (sign == "paper") {
        t.config.sfm_sign = SfmSign::kPaperLiteral;
    } else {
        throw ValidationError("train: unknown sfm_sign '" + sign + "'");
    }
    t.weights.validate();
    t.config.validate();
    return t;
}

FilterSourceSpec parse_filter_source(const json& j, std::uint64_t default_seed) {
    FilterSourceSpec f;
    const std::string source = j.value("source", std::string("rrc"));
    if (source == "rrc") {
        f.kind = FilterSourceSpec::Kind::kRrc;
        f.label = "rrc";
    } else if (source == "rect") {
        f.kind = FilterSourceSpec::Kind::kRect;
        f.label = "rect";
    } else if (source == "file") {
        f.kind = FilterSourceSpec::Kind::kFile;
        f.path = j.at("path").get<std::string>();
        f.label = j.value("label", std::string("file"));
    } else if (source == "train-inline") {
        f.kind = FilterSourceSpec::Kind::kTrainInline;
        f.train = parse_train(j.at("train"), default_seed);
        f.label = f.train.label;
    } else {
        throw ValidationError("filter: unknown source '" + source + "'");
    }
    if (j.contains("label")) f.label = j.at("label").get<std::string>();
    return f;
}

json summary_base(const ExperimentSpec& spec) {
    json j;
    j["kind"] = spec.kind;
    j["seed"] = spec.seed;
    j["config"] = {{"n_data", spec.config.n_data},
                   {"n_se", spec.config.n_se},
                   {"n_fft", spec.config.n_fft},
                   {"norm_mode", spec.config.norm_mode == NormMode::kMrc ? "mrc" : "literal"}};
    return j;
}

void write_ccdf_files(const std::string& out_dir, const std::string& label,
                      const CcdfCurve& curve) {
    const report::Column cols[] = {{"edge_db", curve.edges_db}, {"ccdf", curve.probs}};
    report::write_csv(out_dir + "/ccdf_" + label + ".csv", cols);
    report::Series s{label, curve.edges_db, curve.probs};
    report::PlotOptions opt;
    opt.title = "PAPR CCDF: " + label;
    opt.x_label = "PAPR [dB]";
    opt.y_label = "Pr[PAPR > x]";
    opt.log_y = true;
    report::write_svg_plot(out_dir + "/ccdf_" + label + ".svg", {&s, 1}, opt);
}

void write_sweep_files(const std::string& out_dir, const std::string& label,
                       const SweepResult& sweep) {
    dvec snr, ser, blocks;
    for (const auto& p : sweep.points) {
        snr.push_back(p.snr_db);
        ser.push_back(p.ser);
        blocks.push_back(static_cast<double>(p.n_blocks));
    }
    const report::Column cols[] = {{"snr_db", snr}, {"ser", ser}, {"n_blocks", blocks}};
    report::write_csv(out_dir + "/ser_" + label + ".csv", cols);
    report::Series s{label, snr, ser};
    report::PlotOptions opt;
    opt.title = "SER vs SNR: " + label;
    opt.x_label = "Es/N0 [dB]";
    opt.y_label = "SER";
    opt.log_y = true;
    report::write_svg_plot(out_dir + "/ser_" + label + ".svg", {&s, 1}, opt);
}

void write_train_files(const std::string& out_dir, const std::string& label,
                       const TrainReport& rep, const SystemConfig& cfg) {
    save_filter(out_dir + "/filter_" + label + ".json", rep.model, cfg);
    dvec step, e, p, s, total;
    for (const auto& h : rep.history) {
        step.push_back(h.step);
        e.push_back(h.loss.mse);
        p.push_back(h.loss.papr);
        s.push_back(h.loss.shape);
        total.push_back(h.loss.total);
    }
    const report::Column cols[] = {
        {"step", step}, {"E", e}, {"P", p}, {"S", s}, {"total", total}};
    report::write_csv(out_dir + "/train_history_" + label + ".csv", cols);

    json j;
    j["label"] = label;
    j["design"] = design_name(rep.model.design);
    j["best_loss"] = rep.best_loss;
    j["best_step"] = rep.best_step;
    j["steps"] = rep.history.empty() ? 0 : rep.history.back().step;
    j["train_snr_db"] = rep.train_snr_db;
    j["seed"] = rep.seed;
    j["wall_seconds"] = rep.wall_seconds;
    j["coeffs"] = rep.model.coeffs;
    report::write_text_atomic(out_dir + "/train_report_" + label + ".json", j.dump(2) + "\n");
}

TrainReport run_training(const TrainSpec& t, const SystemConfig& cfg,
                         const std::string& out_dir) {
    const TrainReport rep = train(t.design, cfg, t.weights, t.config);
    write_train_files(out_dir, t.label, rep, cfg);
    return rep;
}

}  // namespace

ExperimentSpec load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open experiment spec: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("malformed experiment spec " + path + ": " + e.what());
    }

    ExperimentSpec spec;
    try {
        spec.kind = j.at("kind").get<std::string>();
        spec.config = parse_config(j.value("config", json::object()));
        spec.seed = j.value("seed", spec.seed);
        spec.out_dir = j.value("out", spec.out_dir);
        if (j.contains("ccdf")) spec.ccdf = parse_ccdf(j.at("ccdf"));
        if (j.contains("ser")) spec.ser = parse_ser(j.at("ser"));
        if (j.contains("filter")) spec.filter = parse_filter_source(j.at("filter"), spec.seed);
        if (j.contains("candidate")) {
            spec.filter = parse_filter_source(j.at("candidate"), spec.seed);
        }
        if (j.contains("baseline")) {
            spec.baseline = parse_filter_source(j.at("baseline"), spec.seed);
        }
        if (j.contains("train")) spec.train = parse_train(j.at("train"), spec.seed);
        if (j.contains("wide_config")) spec.wide_config = parse_config(j.at("wide_config"));
        if (j.contains("retrain")) spec.retrain = parse_train(j.at("retrain"), spec.seed);
    } catch (const json::exception& e) {
        throw ValidationError("invalid experiment spec " + path + ": " + e.what());
    }
    return spec;
}

ResolvedFilter resolve_filter(const FilterSourceSpec& src, const SystemConfig& cfg,
                              std::uint64_t seed, const std::string& out_dir) {
    ResolvedFilter out;
    out.label = src.label;
    out.cfg = cfg;
    switch (src.kind) {
        case FilterSourceSpec::Kind::kRrc:
            out.taps = rrc_taps(cfg);
            return out;
        case FilterSourceSpec::Kind::kRect:
            // vanilla DFT-s-OFDM: same data subcarriers, no extension
            out.cfg.n_se = 0;
            out.taps = rect_taps(out.cfg);
            return out;
        case FilterSourceSpec::Kind::kFile: {
            const FilterFile f = load_filter(src.path);
            if (f.n_data != cfg.n_data || f.n_se != cfg.n_se) {
                throw ValidationError("filter file " + src.path +
                                      " dimensions do not match the experiment config");
            }
            out.taps = f.taps;
            out.model = f.model;
            return out;
        }
        case FilterSourceSpec::Kind::kTrainInline: {
            TrainSpec t = src.train;
            (void)seed;  // training seed comes from the spec (defaulted at parse)
            const TrainReport rep = run_training(t, cfg, out_dir);
            out.taps = eval_poly_filter(rep.model, cfg, Rectifier::kHard);
            out.model = rep.model;
            return out;
        }
    }
    throw ValidationError("unknown filter source");
}

std::string cmd_ccdf(const ExperimentSpec& spec) {
    if (spec.ccdf.level * static_cast<double>(spec.ccdf.n_blocks) < 100.0) {
        throw ValidationError("ccdf: need level * n_blocks >= 100 for a stable readout");
    }
    const ResolvedFilter f = resolve_filter(spec.filter, spec.config, spec.seed, spec.out_dir);
    const DftsOfdmChain chain(f.cfg);
    const CcdfCurve curve =
        simulate_papr_ccdf(chain, f.taps, spec.ccdf.n_blocks, spec.seed, default_papr_edges_db());
    write_ccdf_files(spec.out_dir, f.label, curve);

    json j = summary_base(spec);
    j["filter"] = f.label;
    j["n_blocks"] = curve.n_samples;
    j["level"] = spec.ccdf.level;
    j["papr_db_at_level"] = ccdf_level(curve, spec.ccdf.level);
    const std::string text = j.dump(2) + "\n";
    report::write_text_atomic(spec.out_dir + "/summary.json", text);
    return text;
}

std::string cmd_ser_sweep(const ExperimentSpec& spec) {
    if (!spec.ser) throw ValidationError("ser-sweep: spec has no 'ser' section");
    const ResolvedFilter f = resolve_filter(spec.filter, spec.config, spec.seed, spec.out_dir);
    const DftsOfdmChain chain(f.cfg);
    const SweepResult sweep =
        simulate_ser_sweep(chain, f.taps, spec.ser->snr_grid_db, spec.ser->stop, spec.seed);
    write_sweep_files(spec.out_dir, f.label, sweep);

    json j = summary_base(spec);
    j["filter"] = f.label;
    j["target_ser"] = spec.ser->target_ser;
    try {
        j["snr_db_at_target"] = snr_at_ser(sweep, spec.ser->target_ser);
    } catch (const SimulationError&) {
        j["snr_db_at_target"] = nullptr;  // target not bracketed by the grid
    }
    const std::string text = j.dump(2) + "\n";
    report::write_text_atomic(spec.out_dir + "/summary.json", text);
    return text;
}

std::string cmd_train(const ExperimentSpec& spec) {
    const TrainReport rep = run_training(spec.train, spec.config, spec.out_dir);
    const FilterTaps taps = eval_poly_filter(rep.model, spec.config, Rectifier::kHard);

    json j = summary_base(spec);
    j["label"] = spec.train.label;
    j["design"] = design_name(spec.train.design);
    j["best_loss"] = rep.best_loss;
    j["best_step"] = rep.best_step;
    j["initial_loss"] = rep.history.front().loss.total;
    j["sfm_db"] = spectral_flatness_db(taps, spec.config);
    j["zero_isi_residual"] = check_zero_isi(taps, spec.config);
    j["filter_file"] = spec.out_dir + "/filter_" + spec.train.label + ".json";
    const std::string text = j.dump(2) + "\n";
    report::write_text_atomic(spec.out_dir + "/summary.json", text);
    return text;
}

std::string cmd_compare(const ExperimentSpec& spec) {
    if (spec.ccdf.level * static_cast<double>(spec.ccdf.n_blocks) < 100.0) {
        throw ValidationError("compare: need level * n_blocks >= 100 for a stable readout");
    }
    const ResolvedFilter cand =
        resolve_filter(spec.filter, spec.config, spec.seed, spec.out_dir);
    const ResolvedFilter base =
        resolve_filter(spec.baseline, spec.config, spec.seed, spec.out_dir);
    const DftsOfdmChain cand_chain(cand.cfg);
    const DftsOfdmChain base_chain(base.cfg);

    // identical seeds: both filters see the same symbol blocks (and noise,
    // for the sweeps), so the difference readouts are low-variance
    const CcdfCurve cand_curve = simulate_papr_ccdf(cand_chain, cand.taps, spec.ccdf.n_blocks,
                                                    spec.seed, default_papr_edges_db());
    const CcdfCurve base_curve = simulate_papr_ccdf(base_chain, base.taps, spec.ccdf.n_blocks,
                                                    spec.seed, default_papr_edges_db());
    write_ccdf_files(spec.out_dir, cand.label, cand_curve);
    write_ccdf_files(spec.out_dir, base.label, base_curve);
    {
        const report::Series overlay[] = {
            {cand.label, cand_curve.edges_db, cand_curve.probs},
            {base.label, base_curve.edges_db, base_curve.probs}};
        report::PlotOptions opt;
        opt.title = "PAPR CCDF";
        opt.x_label = "PAPR [dB]";
        opt.y_label = "Pr[PAPR > x]";
        opt.log_y = true;
        report::write_svg_plot(spec.out_dir + "/ccdf_compare.svg", overlay, opt);
    }

    json j = summary_base(spec);
    j["candidate"] = cand.label;
    j["baseline"] = base.label;
    j["ccdf_level"] = spec.ccdf.level;
    j["papr_gain_db"] = papr_gain_db(base_curve, cand_curve, spec.ccdf.level);
    j["papr_db_candidate"] = ccdf_level(cand_curve, spec.ccdf.level);
    j["papr_db_baseline"] = ccdf_level(base_curve, spec.ccdf.level);

    if (spec.ser) {
        const SweepResult cand_sweep = simulate_ser_sweep(cand_chain, cand.taps,
                                                          spec.ser->snr_grid_db,
                                                          spec.ser->stop, spec.seed);
        const SweepResult base_sweep = simulate_ser_sweep(base_chain, base.taps,
                                                          spec.ser->snr_grid_db,
                                                          spec.ser->stop, spec.seed);
        write_sweep_files(spec.out_dir, cand.label, cand_sweep);
        write_sweep_files(spec.out_dir, base.label, base_sweep);
        j["target_ser"] = spec.ser->target_ser;
        j["snr_loss_db"] = snr_loss_db(cand_sweep, base_sweep, spec.ser->target_ser);
    }

    const std::string text = j.dump(2) + "\n";
    report::write_text_atomic(spec.out_dir + "/compare_report.json", text);
    return text;
}

std::string cmd_resample_study(const ExperimentSpec& spec) {
    if (!spec.wide_config) throw ValidationError("resample-study: missing wide_config");
    const SystemConfig& wide = *spec.wide_config;

    const ResolvedFilter base_filter =
        resolve_filter(spec.filter, spec.config, spec.seed, spec.out_dir);
    if (!base_filter.model) {
        throw ValidationError("resample-study: filter source must carry polynomial "
                              "coefficients (file or train-inline)");
    }
    if (base_filter.model->design != FilterDesign::kZeroIsi) {
        throw ValidationError("resample-study: expected a zero_isi model");
    }

    // (a) reuse the base model at the wide configuration
    const FilterTaps resampled = resample(*base_filter.model, wide, Rectifier::kHard);
    // (b) retrain from scratch at the wide configuration
    TrainSpec retrain_spec = spec.retrain;
    if (retrain_spec.label == "learned") retrain_spec.label = "retrained";
    const TrainReport retrained_rep = run_training(retrain_spec, wide, spec.out_dir);
    const FilterTaps retrained = eval_poly_filter(retrained_rep.model, wide, Rectifier::kHard);

    const DftsOfdmChain chain(wide);
    const FilterTaps rrc = rrc_taps(wide);
    const dvec edges = default_papr_edges_db();
    const CcdfCurve rrc_curve =
        simulate_papr_ccdf(chain, rrc, spec.ccdf.n_blocks, spec.seed, edges);
    const CcdfCurve resampled_curve =
        simulate_papr_ccdf(chain, resampled, spec.ccdf.n_blocks, spec.seed, edges);
    const CcdfCurve retrained_curve =
        simulate_papr_ccdf(chain, retrained, spec.ccdf.n_blocks, spec.seed, edges);

    write_ccdf_files(spec.out_dir, "rrc_wide", rrc_curve);
    write_ccdf_files(spec.out_dir, "resampled", resampled_curve);
    write_ccdf_files(spec.out_dir, retrain_spec.label, retrained_curve);

    json j = summary_base(spec);
    j["wide_config"] = {{"n_data", wide.n_data}, {"n_se", wide.n_se}, {"n_fft", wide.n_fft}};
    j["ccdf_level"] = spec.ccdf.level;
    j["resampled_gain_db"] = papr_gain_db(rrc_curve, resampled_curve, spec.ccdf.level);
    j["retrained_gain_db"] = papr_gain_db(rrc_curve, retrained_curve, spec.ccdf.level);
    const std::string text = j.dump(2) + "\n";
    report::write_text_atomic(spec.out_dir + "/study_report.json", text);
    return text;
}

std::string run_experiment(const ExperimentSpec& spec) {
    if (spec.kind == "ccdf") return cmd_ccdf(spec);
    if (spec.kind == "ser-sweep") return cmd_ser_sweep(spec);
    if (spec.kind == "train") return cmd_train(spec);
    if (spec.kind == "compare") return cmd_compare(spec);
    if (spec.kind == "resample-study") return cmd_resample_study(spec);
    throw ValidationError("unknown experiment kind: " + spec.kind);
}

}  // namespace fdss
