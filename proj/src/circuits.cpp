#include "qkr/circuits.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "qkr/fft.hpp"

namespace qkr {

RotatorParams RotatorParams::from_K(int n_q, double K, double T, double n_bar,
                                    std::size_t n0) {
  RotatorParams p;
  p.n_q = n_q;
  p.T = T;
  p.k = K / T;
  p.n_bar = n_bar;
  p.n0 = n0;
  p.validate();
  return p;
}

void RotatorParams::validate() const {
  if (n_q < 1 || n_q > 30) throw std::invalid_argument("n_q out of range");
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  if (n0 >= dim()) throw std::invalid_argument("n0 out of range");
  if (n_bar < 0.0 || n_bar > static_cast<double>(dim()))
    throw std::invalid_argument("n_bar out of range");
}

QuantumState prepare_momentum_state(int n_q, std::size_t n0) {
  return QuantumState(n_q, n0, Representation::Momentum);
}

namespace {

void bit_reverse_amplitudes(QuantumState& state) {
  const auto& rev = bit_reversal_table(state.n_qubits());
  auto a = state.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (i < rev[i]) std::swap(a[i], a[rev[i]]);
}

}  // namespace

void qft(QuantumState& state, NoiseModel& noise, bool inverse) {
  const int n_q = state.n_qubits();
  if (!inverse) {
    if (state.representation() != Representation::Momentum)
      throw std::logic_error("forward qft expects a momentum-basis state");
    for (int j = n_q - 1; j >= 0; --j) {
      apply_hadamard(state, j, noise);
      for (int k = j - 1; k >= 0; --k)
        apply_controlled_phase(state, k, j, std::numbers::pi / double(1ull << (j - k)),
                               noise);
    }
    bit_reverse_amplitudes(state);
    state.set_representation(Representation::Angle);
  } else {
    if (state.representation() != Representation::Angle)
      throw std::logic_error("inverse qft expects an angle-basis state");
    bit_reverse_amplitudes(state);
    for (int j = 0; j < n_q; ++j) {
      for (int k = 0; k < j; ++k)
        apply_controlled_phase(state, k, j, -std::numbers::pi / double(1ull << (j - k)),
                               noise);
      apply_hadamard(state, j, noise);
    }
    state.set_representation(Representation::Momentum);
  }
}

void free_rotation(QuantumState& state, const RotatorParams& params, NoiseModel& noise) {
  if (state.representation() != Representation::Momentum)
    throw std::logic_error("free rotation expects a momentum-basis state");
  const int n_q = state.n_qubits();
  const double T = params.T;
  // Gate order is part of the determinism contract: squared terms, linear
  // cross terms, then bit pairs in lexicographic order.
  for (int j = 0; j < n_q; ++j)
    apply_phase_single(state, j, -T * double(1ull << (2 * j)) / 2.0, noise);
  for (int j = 0; j < n_q; ++j)
    apply_phase_single(state, j, T * params.n_bar * double(1ull << j), noise);
  for (int j1 = 0; j1 < n_q; ++j1)
    for (int j2 = j1 + 1; j2 < n_q; ++j2)
      apply_controlled_phase(state, j1, j2, -T * double(1ull << (j1 + j2)), noise);
}

namespace {

// The kick diagonal is fixed for a given (N, k); cache it per thread.
const std::vector<cplx>& kick_diagonal(std::size_t n, double k) {
  struct Key {
    std::size_t n;
    double k;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& key) const {
      return key.n ^ std::hash<double>{}(key.k);
    }
  };
  thread_local std::unordered_map<Key, std::vector<cplx>, KeyHash> cache;
  auto it = cache.find(Key{n, k});
  if (it != cache.end()) return it->second;
  std::vector<cplx> d(n);
  const double w = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j)
    d[j] = std::polar(1.0, -k * std::cos(w * static_cast<double>(j)));
  return cache.emplace(Key{n, k}, std::move(d)).first->second;
}

}  // namespace

void kick(QuantumState& state, const RotatorParams& params) {
  if (state.representation() != Representation::Angle)
    throw std::logic_error("kick expects an angle-basis state");
  auto a = state.amplitudes();
  const auto& d = kick_diagonal(a.size(), params.k);
  for (std::size_t j = 0; j < a.size(); ++j) a[j] *= d[j];
}

void step(QuantumState& state, const RotatorParams& params, NoiseModel& noise) {
  if (state.n_qubits() != params.n_q) throw std::invalid_argument("state/params mismatch");
  free_rotation(state, params, noise);
  qft(state, noise);
  kick(state, params);
  qft(state, noise, /*inverse=*/true);
}

std::size_t gates_per_step(int n_q) {
  const std::size_t nq = static_cast<std::size_t>(n_q);
  const std::size_t pairs = nq * (nq - 1) / 2;
  return 3 * pairs + 4 * nq;  // rotation pairs + 2 qft pairs, singles + hadamards
}

}  // namespace qkr
