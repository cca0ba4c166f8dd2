#pragma once

#include <cstddef>
#include <span>

#include "fdss/common.hpp"

namespace fdss {

/**
 * @brief Unitary DFT plan for a fixed length.
 *
 * Power-of-two lengths run an iterative radix-2 transform with precomputed
 * twiddles; other lengths go through Bluestein's chirp-z algorithm on top of
 * an internal power-of-two plan. Both directions scale by 1/sqrt(n), so
 * forward followed by inverse is the identity and energy is preserved.
 *
 * Plans are immutable after construction; forward()/inverse() are safe to
 * call concurrently from multiple threads.
 */
class Dft {
public:
    explicit Dft(std::size_t n);

    std::size_t size() const { return n_; }

    /// X_k = (1/sqrt(n)) * sum_m x_m exp(-2*pi*i*k*m/n), in place.
    void forward(std::span<cplx> data) const;

    /// x_m = (1/sqrt(n)) * sum_k X_k exp(+2*pi*i*k*m/n), in place.
    void inverse(std::span<cplx> data) const;

private:
    void radix2(cplx* data, bool invert) const;
    void bluestein(cplx* data, bool invert) const;

    std::size_t n_ = 0;
    bool pow2_ = false;

    // radix-2 tables (for n_ itself, or for the Bluestein inner size)
    std::size_t fft_n_ = 0;
    std::vector<std::size_t> bitrev_;
    cvec twiddle_;  // twiddle_[j] = exp(-i*pi*j/fft_n_ * 2), laid out per stage

    // Bluestein tables
    cvec chirp_;      // exp(-i*pi*k^2/n), length n_
    cvec chirp_fft_;  // forward raw FFT of the zero-padded conjugate chirp
};

}  // namespace fdss
