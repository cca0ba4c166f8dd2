// Benchmark comparing the serial reference kernels against the
// OpenMP-parallel ones, and verifying that both produce identical results.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fdss/montecarlo.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::int64_t n_blocks = 20000;
    int threads = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--blocks" && i + 1 < argc) {
            n_blocks = std::atoll(argv[++i]);
        } else if (arg == "--threads" && i + 1 < argc) {
            threads = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--blocks N] [--threads T]\n", argv[0]);
            return 2;
        }
    }
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
    const int max_threads = omp_get_max_threads();
#else
    const int max_threads = 1;
#endif

    fdss::SystemConfig cfg;  // paper-scale dimensions (336/24/1024)
    const fdss::DftsOfdmChain chain(cfg);
    const fdss::FilterTaps rrc = fdss::rrc_taps(cfg);
    const fdss::PreparedFilter prepared = chain.prepare(rrc);
    const fdss::NoiseModel noise = fdss::calibrate_noise(8.0, cfg);
    const fdss::dvec edges = fdss::default_papr_edges_db();
    const std::uint64_t seed = 42;

    std::printf("chain benchmark: n_data=%d n_se=%d n_fft=%d blocks=%lld threads=%d\n",
                cfg.n_data, cfg.n_se, cfg.n_fft, static_cast<long long>(n_blocks),
                max_threads);
    std::printf("%-24s %12s %12s %9s\n", "kernel", "serial [s]", "parallel [s]", "speedup");

    {
        auto t0 = std::chrono::steady_clock::now();
        const auto serial = fdss::simulate_papr_ccdf_serial(chain, rrc, n_blocks, seed, edges);
        const double ts = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        const auto parallel = fdss::simulate_papr_ccdf(chain, rrc, n_blocks, seed, edges);
        const double tp = seconds_since(t0);
        if (serial.probs != parallel.probs) {
            std::fprintf(stderr, "FAIL: papr ccdf serial/parallel mismatch\n");
            return 1;
        }
        std::printf("%-24s %12.3f %12.3f %8.2fx\n", "papr-ccdf (tx only)", ts, tp, ts / tp);
    }
    {
        auto t0 = std::chrono::steady_clock::now();
        const auto serial =
            fdss::evaluate_batch_serial(chain, prepared, noise, n_blocks, seed, 0);
        const double ts = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        const auto parallel = fdss::evaluate_batch(chain, prepared, noise, n_blocks, seed, 0);
        const double tp = seconds_since(t0);
        if (serial.papr_db != parallel.papr_db || serial.sq_err != parallel.sq_err) {
            std::fprintf(stderr, "FAIL: batch serial/parallel mismatch\n");
            return 1;
        }
        std::printf("%-24s %12.3f %12.3f %8.2fx\n", "full chain batch", ts, tp, ts / tp);
        std::printf("full chain throughput: %.0f blocks/s serial, %.0f blocks/s parallel\n",
                    n_blocks / ts, n_blocks / tp);
    }
    return 0;
}
