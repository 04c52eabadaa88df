#pragma once

#include <complex>
#include <span>
#include <vector>

namespace qkr {

using cplx = std::complex<double>;

/// In-place radix-2 FFT on a power-of-two length:
///   a[j] <- sum_m a[m] * exp(sign * 2*pi*i * j*m / n)
/// sign = -1 is the conventional forward transform, sign = +1 the unscaled
/// inverse. No normalization is applied. Twiddle tables are cached per
/// (length) in thread-local storage, so concurrent use from worker threads
/// needs no locking.
void fft(std::span<cplx> a, int sign);

/// Bit-reversal permutation table for n = 2^bits (index -> reversed index).
const std::vector<std::size_t>& bit_reversal_table(int bits);

bool is_pow2(std::size_t n);
int log2_exact(std::size_t n);

}  // namespace qkr
