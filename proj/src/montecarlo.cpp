#include "fdss/montecarlo.hpp"

#include <algorithm>

namespace fdss {

namespace {

// fixed chunk so early-stopping decisions do not depend on thread count
constexpr std::int64_t kSweepChunk = 4096;

void draw_block_symbols(const DftsOfdmChain& chain, std::uint64_t seed,
                        std::uint64_t block, SymbolVec& out) {
    BlockRng rng(seed, stream::kSymbols, block);
    chain.draw_symbols(rng, out);
}

}  // namespace

CcdfCurve simulate_papr_ccdf(const DftsOfdmChain& chain, const FilterTaps& taps,
                             std::int64_t n_blocks, std::uint64_t seed,
                             const dvec& edges_db) {
    if (n_blocks <= 0) throw ValidationError("simulate_papr_ccdf: n_blocks must be positive");
    const PreparedFilter f = chain.prepare(taps);
    CcdfAccumulator total(edges_db);
#pragma omp parallel
    {
        ChainWorkspace ws;
        CcdfAccumulator local(edges_db);
#pragma omp for schedule(static)
        for (std::int64_t b = 0; b < n_blocks; ++b) {
            draw_block_symbols(chain, seed, static_cast<std::uint64_t>(b), ws.sym);
            local.add(chain.tx_papr_db(f, ws.sym, ws));
        }
#pragma omp critical
        total.merge(local);  // integer counts: merge order cannot matter
    }
    return total.curve();
}

CcdfCurve simulate_papr_ccdf_serial(const DftsOfdmChain& chain, const FilterTaps& taps,
                                    std::int64_t n_blocks, std::uint64_t seed,
                                    const dvec& edges_db) {
    if (n_blocks <= 0) throw ValidationError("simulate_papr_ccdf: n_blocks must be positive");
    const PreparedFilter f = chain.prepare(taps);
    CcdfAccumulator acc(edges_db);
    ChainWorkspace ws;
    for (std::int64_t b = 0; b < n_blocks; ++b) {
        draw_block_symbols(chain, seed, static_cast<std::uint64_t>(b), ws.sym);
        acc.add(chain.tx_papr_db(f, ws.sym, ws));
    }
    return acc.curve();
}

namespace {

SerPoint sweep_point(const DftsOfdmChain& chain, const PreparedFilter& f, double snr_db,
                     const SerStopRule& stop, std::uint64_t seed, bool parallel) {
    const NoiseModel noise = calibrate_noise(snr_db, chain.config());
    std::int64_t blocks = 0;
    std::int64_t errors = 0;
    std::vector<int> chunk_errors;
    while (blocks < stop.max_blocks) {
        const std::int64_t chunk = std::min(kSweepChunk, stop.max_blocks - blocks);
        chunk_errors.assign(static_cast<std::size_t>(chunk), 0);
        if (parallel) {
#pragma omp parallel
            {
                ChainWorkspace ws;
                SymbolVec sym;
#pragma omp for schedule(static)
                for (std::int64_t i = 0; i < chunk; ++i) {
                    const std::uint64_t b = static_cast<std::uint64_t>(blocks + i);
                    draw_block_symbols(chain, seed, b, sym);
                    BlockRng noise_rng(seed, stream::kNoise, b);
                    chunk_errors[static_cast<std::size_t>(i)] =
                        chain.run(f, sym, noise, noise_rng, ws).sym_errors;
                }
            }
        } else {
            ChainWorkspace ws;
            SymbolVec sym;
            for (std::int64_t i = 0; i < chunk; ++i) {
                const std::uint64_t b = static_cast<std::uint64_t>(blocks + i);
                draw_block_symbols(chain, seed, b, sym);
                BlockRng noise_rng(seed, stream::kNoise, b);
                chunk_errors[static_cast<std::size_t>(i)] =
                    chain.run(f, sym, noise, noise_rng, ws).sym_errors;
            }
        }
        for (int e : chunk_errors) errors += e;
        blocks += chunk;
        if (errors >= stop.min_errors && blocks >= stop.min_blocks) break;
    }
    SerPoint p;
    p.snr_db = snr_db;
    p.n_blocks = blocks;
    p.n_errors = errors;
    p.ser = static_cast<double>(errors) /
            (static_cast<double>(blocks) * chain.config().n_data);
    return p;
}

}  // namespace

SweepResult simulate_ser_sweep(const DftsOfdmChain& chain, const FilterTaps& taps,
                               std::span<const double> snr_grid_db,
                               const SerStopRule& stop, std::uint64_t seed) {
    if (snr_grid_db.empty()) throw ValidationError("simulate_ser_sweep: empty SNR grid");
    const PreparedFilter f = chain.prepare(taps);
    SweepResult out;
    for (double snr : snr_grid_db) {
        out.points.push_back(sweep_point(chain, f, snr, stop, seed, true));
    }
    return out;
}

SweepResult simulate_ser_sweep_serial(const DftsOfdmChain& chain, const FilterTaps& taps,
                                      std::span<const double> snr_grid_db,
                                      const SerStopRule& stop, std::uint64_t seed) {
    if (snr_grid_db.empty()) throw ValidationError("simulate_ser_sweep: empty SNR grid");
    const PreparedFilter f = chain.prepare(taps);
    SweepResult out;
    for (double snr : snr_grid_db) {
        out.points.push_back(sweep_point(chain, f, snr, stop, seed, false));
    }
    return out;
}

BatchStats evaluate_batch(const DftsOfdmChain& chain, const PreparedFilter& filter,
                          const NoiseModel& noise, std::int64_t n_blocks,
                          std::uint64_t seed, std::uint64_t block_offset) {
    if (n_blocks <= 0) throw ValidationError("evaluate_batch: n_blocks must be positive");
    BatchStats stats;
    stats.papr_db.resize(static_cast<std::size_t>(n_blocks));
    stats.sq_err.resize(static_cast<std::size_t>(n_blocks));
#pragma omp parallel
    {
        ChainWorkspace ws;
        SymbolVec sym;
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n_blocks; ++i) {
            const std::uint64_t b = block_offset + static_cast<std::uint64_t>(i);
            draw_block_symbols(chain, seed, b, sym);
            BlockRng noise_rng(seed, stream::kNoise, b);
            const ChainOutput out = chain.run(filter, sym, noise, noise_rng, ws);
            stats.papr_db[static_cast<std::size_t>(i)] = out.papr_db;
            stats.sq_err[static_cast<std::size_t>(i)] = out.sq_error;
        }
    }
    return stats;
}

BatchStats evaluate_batch_serial(const DftsOfdmChain& chain, const PreparedFilter& filter,
                                 const NoiseModel& noise, std::int64_t n_blocks,
                                 std::uint64_t seed, std::uint64_t block_offset) {
    if (n_blocks <= 0) throw ValidationError("evaluate_batch: n_blocks must be positive");
    BatchStats stats;
    stats.papr_db.resize(static_cast<std::size_t>(n_blocks));
    stats.sq_err.resize(static_cast<std::size_t>(n_blocks));
    ChainWorkspace ws;
    SymbolVec sym;
    for (std::int64_t i = 0; i < n_blocks; ++i) {
        const std::uint64_t b = block_offset + static_cast<std::uint64_t>(i);
        draw_block_symbols(chain, seed, b, sym);
        BlockRng noise_rng(seed, stream::kNoise, b);
        const ChainOutput out = chain.run(filter, sym, noise, noise_rng, ws);
        stats.papr_db[static_cast<std::size_t>(i)] = out.papr_db;
        stats.sq_err[static_cast<std::size_t>(i)] = out.sq_error;
    }
    return stats;
}

}  // namespace fdss
