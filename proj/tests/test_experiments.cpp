#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fdss/experiments.hpp"
#include "fdss/report.hpp"

using namespace fdss;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("fdss_exp_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_spec(const fs::path& dir, const std::string& name, const std::string& body) {
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << body;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("ccdf command: files written, level recorded, reruns byte-identical") {
    const fs::path dir = scratch_dir("ccdf");
    const std::string spec_path = write_spec(dir, "spec.json", R"({
      "kind": "ccdf",
      "config": {"n_data": 84, "n_se": 6, "n_fft": 256},
      "seed": 5,
      "ccdf": {"n_blocks": 4000, "level": 0.05},
      "filter": {"source": "rrc"}
    })");
    ExperimentSpec spec = load_experiment(spec_path);
    spec.out_dir = (dir / "out").string();
    cmd_ccdf(spec);

    CHECK(fs::exists(dir / "out/ccdf_rrc.csv"));
    CHECK(fs::exists(dir / "out/ccdf_rrc.svg"));
    CHECK(fs::exists(dir / "out/summary.json"));

    const std::string csv = slurp(dir / "out/ccdf_rrc.csv");
    CHECK(csv.rfind("edge_db,ccdf\n", 0) == 0);

    cmd_ccdf(spec);  // rerun: identical bytes
    CHECK(slurp(dir / "out/ccdf_rrc.csv") == csv);

    const std::string summary = slurp(dir / "out/summary.json");
    CHECK(summary.find("papr_db_at_level") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("ccdf readout precondition: level * n_blocks >= 100") {
    const fs::path dir = scratch_dir("ccdf_pre");
    const std::string spec_path = write_spec(dir, "spec.json", R"({
      "kind": "ccdf",
      "config": {"n_data": 84, "n_se": 6, "n_fft": 256},
      "ccdf": {"n_blocks": 1, "level": 0.001},
      "filter": {"source": "rrc"}
    })");
    ExperimentSpec spec = load_experiment(spec_path);
    spec.out_dir = (dir / "out").string();
    CHECK_THROWS_AS(cmd_ccdf(spec), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("ser-sweep command writes the (snr_db, ser, n_blocks) schema") {
    const fs::path dir = scratch_dir("sweep");
    const std::string spec_path = write_spec(dir, "spec.json", R"({
      "kind": "ser-sweep",
      "config": {"n_data": 48, "n_se": 6, "n_fft": 128},
      "seed": 2,
      "ser": {"snr_grid_db": {"start": 7.0, "stop": 9.0, "step": 1.0},
              "target_ser": 0.01,
              "min_errors": 100, "min_blocks": 500, "max_blocks": 2000},
      "filter": {"source": "rrc"}
    })");
    ExperimentSpec spec = load_experiment(spec_path);
    spec.out_dir = (dir / "out").string();
    cmd_ser_sweep(spec);
    const std::string csv = slurp(dir / "out/ser_rrc.csv");
    CHECK(csv.rfind("snr_db,ser,n_blocks\n", 0) == 0);
    // three grid points -> header + 3 rows
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    fs::remove_all(dir);
}

TEST_CASE("train command exports a loadable filter and a loss history") {
    const fs::path dir = scratch_dir("train");
    const std::string spec_path = write_spec(dir, "spec.json", R"({
      "kind": "train",
      "config": {"n_data": 48, "n_se": 6, "n_fft": 128},
      "seed": 3,
      "train": {
        "label": "smoke",
        "design": "zero_isi",
        "weights": {"lambda1": 1.0, "lambda2": 0.02},
        "steps": 3, "batch_blocks": 32, "lr": 0.002
      }
    })");
    ExperimentSpec spec = load_experiment(spec_path);
    spec.out_dir = (dir / "out").string();
    cmd_train(spec);

    const FilterFile f = load_filter((dir / "out/filter_smoke.json").string());
    CHECK(f.model.design == FilterDesign::kZeroIsi);
    CHECK(f.n_data == 48);

    const std::string hist = slurp(dir / "out/train_history_smoke.csv");
    CHECK(hist.rfind("step,E,P,S,total\n", 0) == 0);
    CHECK(std::count(hist.begin(), hist.end(), '\n') == 5);  // steps 0..3 + header

    // the exported filter feeds back in through the file source
    const std::string spec2_path = write_spec(dir, "spec2.json", std::string(R"({
      "kind": "ccdf",
      "config": {"n_data": 48, "n_se": 6, "n_fft": 128},
      "ccdf": {"n_blocks": 3000, "level": 0.05},
      "filter": {"source": "file", "path": ")") +
        (dir / "out/filter_smoke.json").string() + R"(", "label": "smoke"}
    })");
    ExperimentSpec spec2 = load_experiment(spec2_path);
    spec2.out_dir = (dir / "out2").string();
    cmd_ccdf(spec2);
    CHECK(fs::exists(dir / "out2/ccdf_smoke.csv"));

    // dimension mismatch between filter file and config is rejected
    const std::string bad_path = write_spec(dir, "bad.json", std::string(R"({
      "kind": "ccdf",
      "config": {"n_data": 84, "n_se": 6, "n_fft": 256},
      "ccdf": {"n_blocks": 3000, "level": 0.05},
      "filter": {"source": "file", "path": ")") +
        (dir / "out/filter_smoke.json").string() + R"("}
    })");
    ExperimentSpec bad = load_experiment(bad_path);
    bad.out_dir = (dir / "out3").string();
    CHECK_THROWS_AS(cmd_ccdf(bad), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("compare command: rect baseline loses to RRC in PAPR") {
    const fs::path dir = scratch_dir("compare");
    const std::string spec_path = write_spec(dir, "spec.json", R"({
      "kind": "compare",
      "config": {"n_data": 84, "n_se": 6, "n_fft": 256},
      "seed": 4,
      "ccdf": {"n_blocks": 100000, "level": 0.001},
      "candidate": {"source": "rrc"},
      "baseline": {"source": "rect"}
    })");
    ExperimentSpec spec = load_experiment(spec_path);
    spec.out_dir = (dir / "out").string();
    const std::string summary = cmd_compare(spec);
    CHECK(summary.find("papr_gain_db") != std::string::npos);

    // parse the gain back out of the report
    const std::string text = slurp(dir / "out/compare_report.json");
    const auto pos = text.find("\"papr_gain_db\":");
    REQUIRE(pos != std::string::npos);
    const double gain = std::stod(text.substr(pos + 15));
    CHECK(gain > 0.0);  // RRC shaping lowers PAPR vs vanilla
    fs::remove_all(dir);
}

TEST_CASE("unknown kinds and malformed specs are validation errors") {
    const fs::path dir = scratch_dir("bad");
    const std::string p1 = write_spec(dir, "a.json", R"({"kind": "mystery"})");
    CHECK_THROWS_AS(run_experiment(load_experiment(p1)), ValidationError);

    const std::string p2 = write_spec(dir, "b.json", R"({not json)");
    CHECK_THROWS_AS(load_experiment(p2), ValidationError);

    const std::string p3 = write_spec(dir, "c.json", R"({
      "kind": "ccdf",
      "config": {"n_data": 8, "n_se": 20, "n_fft": 64}
    })");
    CHECK_THROWS_AS(load_experiment(p3), ValidationError);

    CHECK_THROWS_AS(load_experiment((dir / "missing.json").string()), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("resample study runs end to end at smoke scale") {
    const fs::path dir = scratch_dir("study");
    const std::string spec_path = write_spec(dir, "spec.json", R"({
      "kind": "resample-study",
      "config": {"n_data": 84, "n_se": 6, "n_fft": 256},
      "wide_config": {"n_data": 72, "n_se": 12, "n_fft": 256},
      "seed": 8,
      "ccdf": {"n_blocks": 5000, "level": 0.01},
      "filter": {"source": "train-inline", "train": {
        "label": "zero_isi_base", "design": "zero_isi",
        "weights": {"lambda1": 1.0, "lambda2": 0.02},
        "steps": 2, "batch_blocks": 32, "lr": 0.002
      }},
      "retrain": {
        "label": "retrained", "design": "zero_isi",
        "weights": {"lambda1": 1.0, "lambda2": 0.02},
        "steps": 2, "batch_blocks": 32, "lr": 0.002
      }
    })");
    ExperimentSpec spec = load_experiment(spec_path);
    spec.out_dir = (dir / "out").string();
    const std::string summary = cmd_resample_study(spec);
    CHECK(summary.find("resampled_gain_db") != std::string::npos);
    CHECK(summary.find("retrained_gain_db") != std::string::npos);
    CHECK(fs::exists(dir / "out/ccdf_rrc_wide.csv"));
    CHECK(fs::exists(dir / "out/ccdf_resampled.csv"));
    CHECK(fs::exists(dir / "out/ccdf_retrained.csv"));
    fs::remove_all(dir);
}
