#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qkr/rng.hpp"

namespace qkr {

using cplx = std::complex<double>;

enum class Representation { Momentum, Angle };

/// Dense state vector over N = 2^n_q amplitudes, tagged with the current
/// basis. Qubit j corresponds to bit j of the amplitude index (LSB = qubit 0).
/// Gates mutate amplitudes in place; a state is single-writer.
class QuantumState {
 public:
  QuantumState(int n_q, std::size_t basis_index = 0,
               Representation rep = Representation::Momentum);

  int n_qubits() const { return n_q_; }
  std::size_t dim() const { return amps_.size(); }
  Representation representation() const { return rep_; }
  void set_representation(Representation r) { rep_ = r; }

  std::span<cplx> amplitudes() { return amps_; }
  std::span<const cplx> amplitudes() const { return amps_; }
  cplx& operator[](std::size_t i) { return amps_[i]; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }

  double norm() const;
  /// <a|b> with the conjugate on this state.
  cplx inner_product(const QuantumState& other) const;

 private:
  int n_q_;
  Representation rep_;
  std::vector<cplx> amps_;
};

/// Coherent gate-error model: every imperfect gate draws a fresh angle from
/// the stream owned by this object. epsilon = 0 is the exact path and never
/// touches the stream. Identical (master_seed, stream_id) reproduce an
/// identical angle sequence bit for bit.
struct NoiseModel {
  double epsilon = 0.0;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  /// Rotate the Hadamard axis out of the x-z plane (a second azimuth draw per
  /// Hadamard). Off by default: the exact gate has no y component.
  bool tilt_3d = false;

  CounterRng rng;

  NoiseModel() = default;
  NoiseModel(double eps, std::uint64_t seed, std::uint64_t stream, bool tilt = false);

  bool noisy() const { return epsilon > 0.0; }
  /// Uniform in (-pi*epsilon, pi*epsilon].
  double draw_angle() { return rng.uniform_symmetric(3.14159265358979323846 * epsilon); }
  /// Uniform in [0, 2*pi), used only in tilt_3d mode.
  double draw_azimuth() { return rng.uniform() * 2.0 * 3.14159265358979323846; }
};

/// Hadamard on `target`, or its imperfect variant H' = u.sigma with u a unit
/// vector at a random angle |beta| < pi*epsilon from (1/sqrt2, 0, 1/sqrt2).
void apply_hadamard(QuantumState& state, int target, NoiseModel& noise);

/// diag(1,1,1,exp(i(alpha+gamma))) on the (q1,q2) subspace, |gamma| < pi*epsilon.
void apply_controlled_phase(QuantumState& state, int q1, int q2, double alpha,
                            NoiseModel& noise);

/// diag(1, exp(i(alpha+gamma))) on `target`, same jitter model as the
/// controlled phase.
void apply_phase_single(QuantumState& state, int target, double alpha, NoiseModel& noise);

}  // namespace qkr
