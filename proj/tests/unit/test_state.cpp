#include "doctest.h"
#include "qkr/state.hpp"

#include <cmath>
#include <stdexcept>
#include <numbers>

using namespace qkr;

namespace {
NoiseModel exact_gates() { return NoiseModel{}; }
}  // namespace

TEST_CASE("hadamard on |0> gives the uniform pair") {
  QuantumState s(1, 0);
  auto noise = exact_gates();
  apply_hadamard(s, 0, noise);
  const double r = std::numbers::sqrt2 / 2.0;
  CHECK(std::abs(s[0] - cplx{r, 0.0}) < 1e-15);
  CHECK(std::abs(s[1] - cplx{r, 0.0}) < 1e-15);
}

TEST_CASE("hadamard squared is identity") {
  QuantumState s(1, 0);
  auto noise = exact_gates();
  apply_hadamard(s, 0, noise);
  apply_hadamard(s, 0, noise);
  CHECK(std::abs(s[0] - cplx{1.0, 0.0}) < 1e-15);
  CHECK(std::abs(s[1]) < 1e-15);
}

TEST_CASE("imperfect hadamard keeps unit norm and bounded infidelity") {
  // For u at angle beta from u0 the action on any input state satisfies
  // |<H psi|H' psi>|^2 >= cos^2(beta) >= cos^2(pi*eps); sweep seeds to check.
  const double eps = 0.01;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    QuantumState noisy_state(1, 0);
    NoiseModel noise(eps, seed, 0);
    apply_hadamard(noisy_state, 0, noise);
    CHECK(std::abs(noisy_state.norm() - 1.0) < 1e-12);

    QuantumState want(1, 0);
    auto id = exact_gates();
    apply_hadamard(want, 0, id);
    const double f = std::norm(want.inner_product(noisy_state));
    const double bound = std::cos(std::numbers::pi * eps);
    CHECK(f >= bound * bound - 1e-12);
  }
}

TEST_CASE("imperfect hadamard in 3d tilt mode stays unitary") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    QuantumState s(2, 1);
    NoiseModel noise(0.3, seed, 5, /*tilt=*/true);
    apply_hadamard(s, 0, noise);
    apply_hadamard(s, 1, noise);
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("controlled phase acts only on |11>") {
  auto noise = exact_gates();
  SUBCASE("|11> at alpha=pi flips sign") {
    QuantumState s(2, 3);
    apply_controlled_phase(s, 0, 1, std::numbers::pi, noise);
    CHECK(std::abs(s[3] - cplx{-1.0, 0.0}) < 1e-15);
  }
  SUBCASE("|01> unchanged for any alpha and eps") {
    QuantumState s(2, 1);
    NoiseModel noisy(0.5, 7, 7);
    apply_controlled_phase(s, 0, 1, 1.234, noisy);
    CHECK(std::abs(s[1] - cplx{1.0, 0.0}) < 1e-15);
  }
}

TEST_CASE("controlled phase jitter range at alpha=0") {
  // |11>, alpha=0, eps=0.5: result is e^{i gamma}|11> with |gamma| < pi/2,
  // i.e. positive real part.
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    QuantumState s(2, 3);
    NoiseModel noise(0.5, seed, 1);
    apply_controlled_phase(s, 0, 1, 0.0, noise);
    CHECK(std::abs(std::abs(s[3]) - 1.0) < 1e-12);
    CHECK(s[3].real() > 0.0);
  }
}

TEST_CASE("single-qubit phase gate") {
  auto noise = exact_gates();
  SUBCASE("|1> picks up i at alpha=pi/2") {
    QuantumState s(1, 1);
    apply_phase_single(s, 0, std::numbers::pi / 2.0, noise);
    CHECK(std::abs(s[1] - cplx{0.0, 1.0}) < 1e-15);
  }
  SUBCASE("|0> unchanged") {
    QuantumState s(1, 0);
    apply_phase_single(s, 0, 2.5, noise);
    CHECK(std::abs(s[0] - cplx{1.0, 0.0}) < 1e-15);
  }
}

TEST_CASE("gate determinism: equal seeds, equal amplitudes to the last bit") {
  auto run = [] {
    QuantumState s(3, 5);
    NoiseModel noise(0.02, 123, 45);
    for (int rep = 0; rep < 20; ++rep) {
      apply_hadamard(s, rep % 3, noise);
      apply_controlled_phase(s, rep % 3, (rep + 1) % 3, 0.7, noise);
      apply_phase_single(s, (rep + 2) % 3, -0.3, noise);
    }
    return s;
  };
  QuantumState a = run(), b = run();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    CHECK(a[i].real() == b[i].real());
    CHECK(a[i].imag() == b[i].imag());
  }
}

TEST_CASE("norm drift below 1e-10 over 1e4 noisy gates") {
  QuantumState s(6, 13);
  NoiseModel noise(0.3, 99, 0);
  for (int i = 0; i < 2500; ++i) {
    apply_hadamard(s, i % 6, noise);
    apply_controlled_phase(s, i % 6, (i + 1) % 6, 0.9, noise);
    apply_phase_single(s, (i + 3) % 6, 1.7, noise);
    apply_hadamard(s, (i + 4) % 6, noise);
  }
  CHECK(std::abs(s.norm() - 1.0) < 1e-10);
}

TEST_CASE("validation errors") {
  QuantumState s(2, 0);
  auto noise = exact_gates();
  CHECK_THROWS_AS(apply_hadamard(s, 2, noise), std::out_of_range);
  CHECK_THROWS_AS(apply_controlled_phase(s, 1, 1, 0.1, noise), std::invalid_argument);
  CHECK_THROWS_AS(NoiseModel(-0.1, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(QuantumState(2, 4), std::out_of_range);
}
