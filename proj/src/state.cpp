#include "qkr/state.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qkr {

QuantumState::QuantumState(int n_q, std::size_t basis_index, Representation rep)
    : n_q_(n_q), rep_(rep) {
  if (n_q < 1 || n_q > 30) throw std::invalid_argument("n_q out of range");
  const std::size_t n = std::size_t{1} << n_q;
  if (basis_index >= n) throw std::out_of_range("basis index out of range");
  amps_.assign(n, cplx{0.0, 0.0});
  amps_[basis_index] = cplx{1.0, 0.0};
}

double QuantumState::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

cplx QuantumState::inner_product(const QuantumState& other) const {
  if (dim() != other.dim()) throw std::invalid_argument("dimension mismatch");
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < amps_.size(); ++i) s += std::conj(amps_[i]) * other.amps_[i];
  return s;
}

NoiseModel::NoiseModel(double eps, std::uint64_t seed, std::uint64_t stream, bool tilt)
    : epsilon(eps), master_seed(seed), stream_id(stream), tilt_3d(tilt),
      rng(CounterRng::stream(seed, stream)) {
  if (eps < 0.0) throw std::invalid_argument("epsilon must be >= 0");
}

namespace {

inline void check_target(const QuantumState& s, int q) {
  if (q < 0 || q >= s.n_qubits()) throw std::out_of_range("qubit index out of range");
}

// Generic real/complex 2x2 on one qubit: [[m00, m01], [m10, m11]].
inline void apply_1q(QuantumState& state, int target, cplx m00, cplx m01, cplx m10,
                     cplx m11) {
  auto a = state.amplitudes();
  const std::size_t n = a.size();
  const std::size_t step = std::size_t{1} << target;
  const std::size_t block = step << 1;
  for (std::size_t base = 0; base < n; base += block) {
    for (std::size_t off = 0; off < step; ++off) {
      const std::size_t i0 = base + off;
      const std::size_t i1 = i0 + step;
      const cplx x = a[i0], y = a[i1];
      a[i0] = m00 * x + m01 * y;
      a[i1] = m10 * x + m11 * y;
    }
  }
}

// Multiply every amplitude whose `target` bit is set by `phase`.
inline void apply_diag_1q(QuantumState& state, int target, cplx phase) {
  auto a = state.amplitudes();
  const std::size_t n = a.size();
  const std::size_t step = std::size_t{1} << target;
  const std::size_t block = step << 1;
  for (std::size_t base = step; base < n; base += block)
    for (std::size_t off = 0; off < step; ++off) a[base + off] *= phase;
}

}  // namespace

void apply_hadamard(QuantumState& state, int target, NoiseModel& noise) {
  check_target(state, target);
  if (!noise.noisy()) {
    const double s = std::numbers::sqrt2 / 2.0;
    apply_1q(state, target, s, s, s, -s);
    return;
  }
  const double beta = noise.draw_angle();
  if (!noise.tilt_3d) {
    // u = (cos(pi/4+beta), 0, sin(pi/4+beta)); u.sigma = [[uz, ux], [ux, -uz]].
    const double phi = std::numbers::pi / 4.0 + beta;
    const double ux = std::cos(phi), uz = std::sin(phi);
    apply_1q(state, target, uz, ux, ux, -uz);
    return;
  }
  // Tilt u0 by beta about a random axis orthogonal to u0:
  // u = u0 cos(beta) + (e1 cos(az) + e2 sin(az)) sin(beta),
  // e1 = (1/sqrt2, 0, -1/sqrt2), e2 = (0, 1, 0).
  const double az = noise.draw_azimuth();
  const double s = std::numbers::sqrt2 / 2.0;
  const double cb = std::cos(beta), sb = std::sin(beta);
  const double ux = s * cb + s * std::cos(az) * sb;
  const double uy = std::sin(az) * sb;
  const double uz = s * cb - s * std::cos(az) * sb;
  apply_1q(state, target, cplx{uz, 0.0}, cplx{ux, -uy}, cplx{ux, uy}, cplx{-uz, 0.0});
}

void apply_controlled_phase(QuantumState& state, int q1, int q2, double alpha,
                            NoiseModel& noise) {
  check_target(state, q1);
  check_target(state, q2);
  if (q1 == q2) throw std::invalid_argument("controlled phase needs two distinct qubits");
  const double gamma = noise.noisy() ? noise.draw_angle() : 0.0;
  const cplx phase = std::polar(1.0, alpha + gamma);

  const int lo = q1 < q2 ? q1 : q2;
  const int hi = q1 < q2 ? q2 : q1;
  auto a = state.amplitudes();
  const std::size_t n = a.size();
  const std::size_t s_lo = std::size_t{1} << lo;
  const std::size_t s_hi = std::size_t{1} << hi;
  for (std::size_t base = s_hi; base < n; base += (s_hi << 1))
    for (std::size_t mid = s_lo; mid < s_hi; mid += (s_lo << 1))
      for (std::size_t off = 0; off < s_lo; ++off) a[base + mid + off] *= phase;
}

void apply_phase_single(QuantumState& state, int target, double alpha, NoiseModel& noise) {
  check_target(state, target);
  const double gamma = noise.noisy() ? noise.draw_angle() : 0.0;
  apply_diag_1q(state, target, std::polar(1.0, alpha + gamma));
}

}  // namespace qkr
