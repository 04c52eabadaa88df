#include "qkr/oracle.hpp"

#include <cmath>
#include <numbers>

#include "qkr/rng.hpp"

namespace qkr::oracle {

std::vector<cplx> dense_dft(int n_q) {
  const std::size_t n = std::size_t{1} << n_q;
  std::vector<cplx> f(n * n);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t m = 0; m < n; ++m) {
      // j*m mod n keeps the phase argument small for exactness.
      const double ang = 2.0 * std::numbers::pi * static_cast<double>((j * m) % n) /
                         static_cast<double>(n);
      f[j * n + m] = std::polar(inv_sqrt, ang);
    }
  return f;
}

std::vector<cplx> rotation_diagonal(const RotatorParams& params) {
  const std::size_t n = params.dim();
  std::vector<cplx> d(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double x = static_cast<double>(m);
    d[m] = std::polar(1.0, -params.T * (x * x - 2.0 * params.n_bar * x) / 2.0);
  }
  return d;
}

std::vector<cplx> dense_step_operator(const RotatorParams& params) {
  const std::size_t n = params.dim();
  const auto f = dense_dft(params.n_q);
  const auto rot = rotation_diagonal(params);
  std::vector<cplx> kick(n);
  for (std::size_t j = 0; j < n; ++j)
    kick[j] = std::polar(
        1.0, -params.k * std::cos(2.0 * std::numbers::pi * static_cast<double>(j) /
                                  static_cast<double>(n)));
  // U = F^dag * diag(kick) * F * diag(rot)
  std::vector<cplx> u(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      cplx s{0.0, 0.0};
      for (std::size_t j = 0; j < n; ++j)
        s += std::conj(f[j * n + r]) * kick[j] * f[j * n + c];
      u[r * n + c] = s * rot[c];
    }
  return u;
}

std::vector<cplx> apply_dense(const std::vector<cplx>& op, std::span<const cplx> v) {
  const std::size_t n = v.size();
  std::vector<cplx> out(n);
  for (std::size_t r = 0; r < n; ++r) {
    cplx s{0.0, 0.0};
    for (std::size_t c = 0; c < n; ++c) s += op[r * n + c] * v[c];
    out[r] = s;
  }
  return out;
}

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

std::vector<cplx> random_state(int n_q, std::uint64_t seed) {
  const std::size_t n = std::size_t{1} << n_q;
  auto rng = CounterRng::stream(seed, 0);
  std::vector<cplx> v(n);
  double norm2 = 0.0;
  for (auto& x : v) {
    x = cplx{rng.uniform() - 0.5, rng.uniform() - 0.5};
    norm2 += std::norm(x);
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : v) x *= inv;
  return v;
}

std::vector<CheckResult> equivalence_suite(int max_n_q, int steps, std::uint64_t seed) {
  std::vector<CheckResult> results;
  for (int n_q = 2; n_q <= max_n_q; ++n_q) {
    const auto params = RotatorParams::from_K(n_q, 5.0, 0.5,
                                              static_cast<double>((1u << n_q) / 2), 0);
    const auto init = random_state(n_q, seed + static_cast<std::uint64_t>(n_q));
    NoiseModel exact;

    // QFT vs dense DFT
    {
      QuantumState s(n_q);
      std::copy(init.begin(), init.end(), s.amplitudes().begin());
      qft(s, exact);
      const auto want = apply_dense(dense_dft(n_q), init);
      const double worst = max_abs_diff(s.amplitudes(), want);
      results.push_back({"qft vs dense dft, n_q=" + std::to_string(n_q), worst, 1e-12,
                         worst <= 1e-12});
    }
    // rotation vs diagonal
    {
      QuantumState s(n_q);
      std::copy(init.begin(), init.end(), s.amplitudes().begin());
      free_rotation(s, params, exact);
      const auto diag = rotation_diagonal(params);
      std::vector<cplx> want(init.size());
      for (std::size_t i = 0; i < init.size(); ++i) want[i] = diag[i] * init[i];
      const double worst = max_abs_diff(s.amplitudes(), want);
      results.push_back({"rotation vs diagonal, n_q=" + std::to_string(n_q), worst, 1e-12,
                         worst <= 1e-12});
    }
    // iterated step vs dense operator
    {
      QuantumState s(n_q);
      std::copy(init.begin(), init.end(), s.amplitudes().begin());
      const auto u = dense_step_operator(params);
      auto want = init;
      double worst = 0.0;
      for (int t = 0; t < steps; ++t) {
        step(s, params, exact);
        want = apply_dense(u, want);
        worst = std::max(worst, max_abs_diff(s.amplitudes(), want));
      }
      results.push_back({"step vs dense operator, n_q=" + std::to_string(n_q) + ", t=" +
                             std::to_string(steps),
                         worst, 1e-9, worst <= 1e-9});
    }
  }
  return results;
}

}  // namespace qkr::oracle
