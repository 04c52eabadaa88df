#include "qkr/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace qkr {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
  if (!is_pow2(n)) throw std::invalid_argument("length must be a power of two");
  int b = 0;
  while ((std::size_t{1} << b) != n) ++b;
  return b;
}

const std::vector<std::size_t>& bit_reversal_table(int bits) {
  thread_local std::unordered_map<int, std::vector<std::size_t>> cache;
  auto it = cache.find(bits);
  if (it != cache.end()) return it->second;
  const std::size_t n = std::size_t{1} << bits;
  std::vector<std::size_t> rev(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t x = i, y = 0;
    for (int b = 0; b < bits; ++b) {
      y = (y << 1) | (x & 1);
      x >>= 1;
    }
    rev[i] = y;
  }
  return cache.emplace(bits, std::move(rev)).first->second;
}

namespace {

// Twiddles for the sign=-1 kernel; conjugated on use for sign=+1.
const std::vector<cplx>& twiddles(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::vector<cplx>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> w(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    w[k] = {std::cos(ang), std::sin(ang)};
  }
  return cache.emplace(n, std::move(w)).first->second;
}

}  // namespace

void fft(std::span<cplx> a, int sign) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  const int bits = log2_exact(n);
  const auto& rev = bit_reversal_table(bits);
  for (std::size_t i = 0; i < n; ++i)
    if (i < rev[i]) std::swap(a[i], a[rev[i]]);

  const auto& w = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t stride = n / len;
    for (std::size_t base = 0; base < n; base += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cplx tw = w[k * stride];
        if (sign > 0) tw = std::conj(tw);
        const cplx u = a[base + k];
        const cplx v = a[base + k + half] * tw;
        a[base + k] = u + v;
        a[base + k + half] = u - v;
      }
    }
  }
}

}  // namespace qkr
