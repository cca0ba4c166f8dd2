#include "fdss/dft.hpp"

#include <cmath>

namespace fdss {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

}  // namespace

Dft::Dft(std::size_t n) : n_(n) {
    if (n_ == 0) throw ValidationError("Dft: length must be positive");
    pow2_ = is_pow2(n_);
    fft_n_ = pow2_ ? n_ : next_pow2(2 * n_ - 1);

    // bit-reversal permutation for the radix-2 size
    bitrev_.assign(fft_n_, 0);
    for (std::size_t i = 1, j = 0; i < fft_n_; ++i) {
        std::size_t bit = fft_n_ >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        bitrev_[i] = j;
    }

    // twiddle_[j] = exp(-2*pi*i*j/fft_n_), j < fft_n_/2
    twiddle_.resize(fft_n_ / 2);
    for (std::size_t j = 0; j < fft_n_ / 2; ++j) {
        const double ang = -2.0 * kPi * static_cast<double>(j) / static_cast<double>(fft_n_);
        twiddle_[j] = {std::cos(ang), std::sin(ang)};
    }

    if (!pow2_) {
        // chirp_[m] = exp(-i*pi*m^2/n); reduce m^2 mod 2n to keep the angle small
        chirp_.resize(n_);
        const auto two_n = static_cast<unsigned long long>(2 * n_);
        for (std::size_t m = 0; m < n_; ++m) {
            const unsigned long long m2 =
                (static_cast<unsigned long long>(m) * m) % two_n;
            const double ang = -kPi * static_cast<double>(m2) / static_cast<double>(n_);
            chirp_[m] = {std::cos(ang), std::sin(ang)};
        }
        // kernel c_j = conj(chirp_[|j|]) wrapped onto [0, fft_n_), then raw FFT
        chirp_fft_.assign(fft_n_, cplx{0.0, 0.0});
        chirp_fft_[0] = std::conj(chirp_[0]);
        for (std::size_t j = 1; j < n_; ++j) {
            chirp_fft_[j] = std::conj(chirp_[j]);
            chirp_fft_[fft_n_ - j] = std::conj(chirp_[j]);
        }
        radix2(chirp_fft_.data(), false);
    }
}

void Dft::radix2(cplx* data, bool invert) const {
    const std::size_t n = fft_n_;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t j = bitrev_[i];
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t stride = n / len;
        for (std::size_t base = 0; base < n; base += len) {
            for (std::size_t j = 0; j < half; ++j) {
                cplx w = twiddle_[j * stride];
                if (invert) w = std::conj(w);
                const cplx u = data[base + j];
                const cplx v = data[base + j + half] * w;
                data[base + j] = u + v;
                data[base + j + half] = u - v;
            }
        }
    }
}

void Dft::bluestein(cplx* data, bool invert) const {
    // inverse = conj(forward(conj(x))) with unitary scaling handled by caller
    if (invert) {
        for (std::size_t m = 0; m < n_; ++m) data[m] = std::conj(data[m]);
    }
    cvec buf(fft_n_, cplx{0.0, 0.0});
    for (std::size_t m = 0; m < n_; ++m) buf[m] = data[m] * chirp_[m];
    radix2(buf.data(), false);
    for (std::size_t j = 0; j < fft_n_; ++j) buf[j] *= chirp_fft_[j];
    radix2(buf.data(), true);
    const double inv_m = 1.0 / static_cast<double>(fft_n_);
    for (std::size_t k = 0; k < n_; ++k) {
        cplx v = chirp_[k] * buf[k] * inv_m;
        data[k] = invert ? std::conj(v) : v;
    }
}

void Dft::forward(std::span<cplx> data) const {
    if (data.size() != n_) throw ValidationError("Dft::forward: length mismatch");
    if (pow2_) {
        radix2(data.data(), false);
    } else {
        bluestein(data.data(), false);
    }
    const double s = 1.0 / std::sqrt(static_cast<double>(n_));
    for (auto& v : data) v *= s;
}

void Dft::inverse(std::span<cplx> data) const {
    if (data.size() != n_) throw ValidationError("Dft::inverse: length mismatch");
    if (pow2_) {
        radix2(data.data(), true);
    } else {
        bluestein(data.data(), true);
    }
    const double s = 1.0 / std::sqrt(static_cast<double>(n_));
    for (auto& v : data) v *= s;
}

}  // namespace fdss
