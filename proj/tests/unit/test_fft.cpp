#include "doctest.h"
#include "qkr/fft.hpp"
#include "qkr/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <numbers>
#include <vector>

using qkr::cplx;

namespace {

// Naive DFT oracle with the same kernel convention.
std::vector<cplx> naive_dft(const std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  std::vector<cplx> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx s{0.0, 0.0};
    for (std::size_t m = 0; m < n; ++m) {
      const double ang =
          sign * 2.0 * std::numbers::pi * double((j * m) % n) / double(n);
      s += a[m] * std::polar(1.0, ang);
    }
    out[j] = s;
  }
  return out;
}

std::vector<cplx> random_vec(std::size_t n, std::uint64_t seed) {
  auto rng = qkr::CounterRng::stream(seed, 0);
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx{rng.uniform() - 0.5, rng.uniform() - 0.5};
  return v;
}

}  // namespace

TEST_CASE("fft matches the naive dft for both signs") {
  for (std::size_t n : {1u, 2u, 8u, 64u, 256u}) {
    for (int sign : {-1, +1}) {
      auto a = random_vec(n, 11 + n + sign);
      auto want = naive_dft(a, sign);
      qkr::fft(a, sign);
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(a[i] - want[i]));
      CHECK(worst < 1e-11 * double(n));
    }
  }
}

TEST_CASE("forward then unscaled inverse is N * identity") {
  auto a = random_vec(512, 99);
  auto orig = a;
  qkr::fft(a, -1);
  qkr::fft(a, +1);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] / 512.0 - orig[i]));
  CHECK(worst < 1e-12);
}

TEST_CASE("non power of two is rejected") {
  std::vector<cplx> a(12);
  CHECK_THROWS_AS(qkr::fft(a, -1), std::invalid_argument);
}
