#pragma once

#include <cstddef>

#include "qkr/state.hpp"

namespace qkr {

/// Parameters of one kicked-rotator run. K = k*T is the classical chaos
/// parameter; T plays the role of an effective Planck constant. n_bar is the
/// center of the free rotation (default N/2), n0 the initial momentum level.
struct RotatorParams {
  int n_q = 4;
  double k = 10.0;
  double T = 0.5;
  double n_bar = 0.0;
  std::size_t n0 = 0;

  std::size_t dim() const { return std::size_t{1} << n_q; }
  double K() const { return k * T; }

  static RotatorParams from_K(int n_q, double K, double T, double n_bar, std::size_t n0);
  void validate() const;
};

/// |n0> in the momentum basis.
QuantumState prepare_momentum_state(int n_q, std::size_t n0);

/// Gate-level quantum Fourier transform. Forward maps Momentum -> Angle with
/// kernel exp(+2*pi*i*n*j/N)/sqrt(N); inverse applies the reversed circuit.
/// Bit reversal is an internal index permutation (not a gate, never noisy);
/// callers always see natural ordering. n_q Hadamards + n_q(n_q-1)/2
/// controlled phases per call, each drawing its own noise.
void qft(QuantumState& state, NoiseModel& noise, bool inverse = false);

/// Diagonal phase exp(-i*T*((n - n_bar)^2 - n_bar^2)/2) built from the binary
/// decomposition of n: one single-qubit phase per squared bit, one per linear
/// cross term, one two-qubit phase per bit pair. The constant n_bar^2 term is
/// a global phase and is dropped.
void free_rotation(QuantumState& state, const RotatorParams& params, NoiseModel& noise);

/// Multiplication by exp(-i*k*cos(theta_j)), theta_j = 2*pi*j/N, in the angle
/// basis. Applied exactly (no gate decomposition, no noise).
void kick(QuantumState& state, const RotatorParams& params);

/// One full period: free rotation, QFT to angle, kick, inverse QFT.
void step(QuantumState& state, const RotatorParams& params, NoiseModel& noise);

/// Noisy gate invocations in one `step` (QFT pair + rotation).
std::size_t gates_per_step(int n_q);

}  // namespace qkr
