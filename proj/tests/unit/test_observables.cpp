#include "doctest.h"
#include "qkr/observables.hpp"
#include "qkr/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <numbers>

using namespace qkr;

TEST_CASE("second moment basics") {
  auto s = prepare_momentum_state(4, 9);
  CHECK(second_moment(s, 9.0) == 0.0);

  QuantumState pair(4);
  pair[0] = cplx{0.0, 0.0};
  pair[8] = cplx{std::numbers::sqrt2 / 2.0, 0.0};
  pair[10] = cplx{std::numbers::sqrt2 / 2.0, 0.0};
  CHECK(std::abs(second_moment(pair, 9.0) - 1.0) < 1e-14);
}

TEST_CASE("second moment is translation invariant away from the edges") {
  auto rng = CounterRng::stream(21, 0);
  for (int trial = 0; trial < 20; ++trial) {
    QuantumState a(6);
    QuantumState b(6);
    a[20] = cplx{0, 0};
    const int shift = 1 + int(rng.uniform() * 10);
    double norm2 = 0.0;
    std::vector<cplx> amps(8);
    for (auto& x : amps) {
      x = cplx{rng.uniform() - 0.5, rng.uniform() - 0.5};
      norm2 += std::norm(x);
    }
    for (auto& x : amps) x /= std::sqrt(norm2);
    for (int i = 0; i < 8; ++i) {
      a[10 + i] = amps[i];
      b[10 + shift + i] = amps[i];
    }
    a[0] = b[0] = cplx{0, 0};
    const double ma = second_moment(a, 12.0);
    const double mb = second_moment(b, 12.0 + shift);
    CHECK(std::abs(ma - mb) < 1e-12);
  }
}

TEST_CASE("fidelity basics and symmetries") {
  auto a = prepare_momentum_state(3, 2);
  auto b = prepare_momentum_state(3, 2);
  CHECK(fidelity(a, b) == 1.0);
  auto c = prepare_momentum_state(3, 5);
  CHECK(fidelity(a, c) == 0.0);

  // symmetry and global-phase invariance on random states
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto va = oracle::random_state(4, seed);
    auto vb = oracle::random_state(4, seed + 100);
    QuantumState sa(4), sb(4), sb_phase(4);
    std::copy(va.begin(), va.end(), sa.amplitudes().begin());
    std::copy(vb.begin(), vb.end(), sb.amplitudes().begin());
    const cplx phase = std::polar(1.0, 1.234);
    for (std::size_t i = 0; i < vb.size(); ++i) sb_phase[i] = vb[i] * phase;
    CHECK(std::abs(fidelity(sa, sb) - fidelity(sb, sa)) < 1e-14);
    CHECK(std::abs(fidelity(sa, sb) - fidelity(sa, sb_phase)) < 1e-14);
  }
}

TEST_CASE("time series rejects non-increasing times") {
  TimeSeries ts;
  ts.push(0, 1.0);
  ts.push(5, 2.0);
  CHECK_THROWS_AS(ts.push(5, 3.0), std::invalid_argument);
}

TEST_CASE("doubling time extraction") {
  TimeSeries exact;
  for (int t = 0; t <= 100; ++t) exact.push(t, 100.0);  // saturated plateau

  SUBCASE("noisy equal to exact never doubles") {
    CHECK(!extract_doubling_time(exact, exact).has_value());
  }
  SUBCASE("linear growth crosses at tau") {
    const double tau = 37.0;
    TimeSeries noisy;
    for (int t = 0; t <= 100; ++t) noisy.push(t, 100.0 * (1.0 + t / tau));
    auto tq = extract_doubling_time(exact, noisy);
    REQUIRE(tq.has_value());
    CHECK(std::abs(*tq - tau) < 0.2);
  }
}

TEST_CASE("fidelity time extraction") {
  SUBCASE("constant 1 never crosses") {
    TimeSeries f;
    for (int t = 0; t <= 50; ++t) f.push(t, 1.0);
    CHECK(!extract_fidelity_time(f).has_value());
  }
  SUBCASE("exponential decay crosses at tau ln 2") {
    const double tau = 12.0;
    TimeSeries f;
    for (int t = 0; t <= 100; ++t) f.push(t, std::exp(-t / tau));
    auto tf = extract_fidelity_time(f);
    REQUIRE(tf.has_value());
    CHECK(std::abs(*tf - tau * std::log(2.0)) < 1e-6);  // log-linear interp is exact here
  }
  SUBCASE("requires f(0)=1") {
    TimeSeries f;
    f.push(0, 0.9);
    CHECK_THROWS_AS(extract_fidelity_time(f), std::invalid_argument);
  }
}

TEST_CASE("wigner time extraction") {
  SUBCASE("zero error never crosses") {
    TimeSeries d;
    for (int t = 0; t <= 50; ++t) d.push(t, 0.0);
    CHECK(!extract_wigner_time(d).has_value());
  }
  SUBCASE("linear ramp crosses threshold/slope") {
    const double tau = 40.0;
    TimeSeries d;
    for (int t = 0; t <= 100; ++t) d.push(t, t / tau);
    auto tw = extract_wigner_time(d);
    REQUIRE(tw.has_value());
    CHECK(std::abs(*tw - tau / 2.0) < 0.3);
  }
}

TEST_CASE("phase-space domain membership") {
  PhaseSpaceDomain d;
  d.shape = PhaseSpaceDomain::Shape::Circle;
  d.center_theta = std::numbers::pi;
  d.center_p = 0.0;
  d.radius = 0.1;
  const double T = 2.0 * std::numbers::pi / 64.0;
  const double n_bar = 32.0;
  CHECK(d.contains(std::numbers::pi, 32.0, T, n_bar));
  CHECK(!d.contains(0.0, 32.0, T, n_bar));
  CHECK(!d.contains(std::numbers::pi, 52.0, T, n_bar));
  // momentum wraps across the cell
  CHECK(d.contains(std::numbers::pi, 32.0 + 64.0, T, n_bar));
}

TEST_CASE("tunneling probability integrates the husimi density") {
  auto params = RotatorParams::from_K(6, 1.3, 2.0 * std::numbers::pi / 64.0, 32.0, 1);
  auto s = prepare_momentum_state(6, 1);
  auto grid = husimi(s, params);

  PhaseSpaceDomain full;
  full.shape = PhaseSpaceDomain::Shape::Rectangle;
  full.center_theta = std::numbers::pi;
  full.center_p = 0.0;
  full.extent_u = 1.0;
  full.extent_v = 1.0;
  CHECK(std::abs(tunneling_probability(grid, full) - 1.0) < 1e-12);

  // state at n=1 is far from a small domain at the cell center
  PhaseSpaceDomain core;
  core.center_theta = std::numbers::pi;
  core.center_p = 0.0;
  core.radius = 0.05;
  CHECK(tunneling_probability(grid, core) < 1e-4);

  // a vanishing circle placed between grid cell centers intersects nothing
  PhaseSpaceDomain empty;
  empty.center_theta = std::numbers::pi / 64.0;
  empty.center_p = params.T / 2.0;
  empty.radius = 1e-9;
  CHECK_THROWS_AS(tunneling_probability(grid, empty), std::invalid_argument);
}

TEST_CASE("linear fit recovers slope and correlation") {
  std::vector<double> x, y;
  for (int i = 0; i < 30; ++i) {
    x.push_back(i);
    y.push_back(3.0 * i + 1.0);
  }
  auto fit = linear_fit(x, y);
  CHECK(std::abs(fit.slope - 3.0) < 1e-12);
  CHECK(std::abs(fit.intercept - 1.0) < 1e-10);
  CHECK(std::abs(fit.correlation - 1.0) < 1e-12);
}
