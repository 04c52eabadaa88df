#pragma once

#include <string>
#include <vector>

#include "qkr/circuits.hpp"

namespace qkr::oracle {

/// Dense reference operators built directly from their definitions, kept
/// independent of the gate-level implementation they are used to check.
/// Practical up to n_q ~ 10 (O(N^2) storage).

/// F[j][n] = exp(+2*pi*i*j*n/N)/sqrt(N), row-major.
std::vector<cplx> dense_dft(int n_q);

/// d[n] = exp(-i*T*((n - n_bar)^2 - n_bar^2)/2); same dropped-constant
/// convention as the gate decomposition, so states compare exactly.
std::vector<cplx> rotation_diagonal(const RotatorParams& params);

/// One-period operator F^dag * diag(kick) * F * diag(rotation), row-major.
std::vector<cplx> dense_step_operator(const RotatorParams& params);

std::vector<cplx> apply_dense(const std::vector<cplx>& op, std::span<const cplx> v);

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b);

/// Seeded random unit vector, for property-style checks.
std::vector<cplx> random_state(int n_q, std::uint64_t seed);

struct CheckResult {
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// The small-N equivalence suite: gate QFT vs dense DFT (1e-12), rotation vs
/// diagonal (1e-12), `step` iterated vs dense operator powers (1e-9/step).
std::vector<CheckResult> equivalence_suite(int max_n_q, int steps, std::uint64_t seed);

}  // namespace qkr::oracle
