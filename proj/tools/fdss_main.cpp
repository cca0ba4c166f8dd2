// Command-line front end: runs CCDF/SER campaigns, trains FDSS filters,
// compares candidates against the RRC baseline, and runs the resample study.
// Experiments are described by JSON spec files; see experiments/ for the
// shipped ones.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fdss/experiments.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct CommonArgs {
    std::string spec_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--spec", args.spec_path, "experiment spec file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "override the spec's RNG seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--out", args.out_dir, "override the spec's output directory");
    cmd->add_option("--threads", args.threads, "worker threads (0 = runtime default)");
}

int run(const std::string& kind, const CommonArgs& args) {
#ifdef _OPENMP
    if (args.threads > 0) omp_set_num_threads(args.threads);
#endif
    fdss::ExperimentSpec spec = fdss::load_experiment(args.spec_path);
    if (spec.kind != kind) {
        throw fdss::ValidationError("spec file is of kind '" + spec.kind +
                                    "', expected '" + kind + "'");
    }
    if (args.seed_set) spec.seed = args.seed;
    if (!args.out_dir.empty()) spec.out_dir = args.out_dir;
    std::cout << fdss::run_experiment(spec);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DFT-s-OFDM spectrum-shaping simulator and FDSS filter trainer"};
    app.require_subcommand(1);

    const char* kinds[] = {"ccdf", "ser-sweep", "train", "compare", "resample-study"};
    const char* descriptions[] = {
        "simulate the PAPR CCDF of one filter",
        "measure SER over an SNR grid",
        "learn FDSS filter coefficients",
        "candidate vs baseline: PAPR gain and SNR loss",
        "reuse a learned filter at a wider extension vs retraining",
    };
    CommonArgs args[5];
    for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(kinds[i], descriptions[i]), args[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        for (int i = 0; i < 5; ++i) {
            if (app.get_subcommand(kinds[i])->parsed()) return run(kinds[i], args[i]);
        }
        return kExitValidation;
    } catch (const fdss::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
