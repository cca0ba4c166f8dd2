#pragma once

#include <cstdint>

#include "fdss/chain.hpp"
#include "fdss/metrics.hpp"

namespace fdss {

/// Early-stopping rule for SER sweeps: a point stops once it has seen at
/// least min_errors symbol errors and min_blocks blocks, or at max_blocks.
struct SerStopRule {
    std::int64_t min_errors = 400;
    std::int64_t min_blocks = 10'000;
    std::int64_t max_blocks = 100'000;
};

/// Per-block batch statistics for the trainer; entry b is a pure function
/// of (seed, block_offset + b), never of thread count.
struct BatchStats {
    dvec papr_db;
    dvec sq_err;
};

// OpenMP-parallel kernels. Block b draws its symbols and noise from
// counter-based streams keyed by (seed, stream, b), and reductions are
// either integer counts or deterministic pairwise sums, so results are
// identical for any thread count.

CcdfCurve simulate_papr_ccdf(const DftsOfdmChain& chain, const FilterTaps& taps,
                             std::int64_t n_blocks, std::uint64_t seed,
                             const dvec& edges_db);

SweepResult simulate_ser_sweep(const DftsOfdmChain& chain, const FilterTaps& taps,
                               std::span<const double> snr_grid_db,
                               const SerStopRule& stop, std::uint64_t seed);

BatchStats evaluate_batch(const DftsOfdmChain& chain, const PreparedFilter& filter,
                          const NoiseModel& noise, std::int64_t n_blocks,
                          std::uint64_t seed, std::uint64_t block_offset);

// Serial reference implementations: plain loops over the same per-block
// kernels. Kept for testing (parallel results must match bit for bit) and
// for the benchmark baseline.

CcdfCurve simulate_papr_ccdf_serial(const DftsOfdmChain& chain, const FilterTaps& taps,
                                    std::int64_t n_blocks, std::uint64_t seed,
                                    const dvec& edges_db);

SweepResult simulate_ser_sweep_serial(const DftsOfdmChain& chain, const FilterTaps& taps,
                                      std::span<const double> snr_grid_db,
                                      const SerStopRule& stop, std::uint64_t seed);

BatchStats evaluate_batch_serial(const DftsOfdmChain& chain, const PreparedFilter& filter,
                                 const NoiseModel& noise, std::int64_t n_blocks,
                                 std::uint64_t seed, std::uint64_t block_offset);

}  // namespace fdss
