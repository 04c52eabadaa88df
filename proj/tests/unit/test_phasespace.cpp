#include "doctest.h"
#include "qkr/phasespace.hpp"
#include "qkr/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <numbers>

using namespace qkr;

namespace {

// Test-side oracle: Eq-by-the-book evaluation of the doubled-lattice Wigner
// sum with a naive DFT for the angle wave function. O(N^3); keep N small.
std::vector<cplx> naive_angle_wf(const QuantumState& s) {
  const std::size_t n = s.dim();
  std::vector<cplx> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx acc{0, 0};
    for (std::size_t m = 0; m < n; ++m)
      acc += s[m] * std::polar(1.0, 2.0 * std::numbers::pi * double((j * m) % n) / double(n));
    out[j] = acc / std::sqrt(double(n));
  }
  return out;
}

cplx wigner_point_oracle(const std::vector<cplx>& psi_theta, std::size_t it, std::size_t in) {
  const std::size_t n = psi_theta.size();
  cplx acc{0, 0};
  for (std::size_t m = 0; m < n; ++m) {
    const double ang = -2.0 * std::numbers::pi * double(in) *
                       (double(m) - double(it) / 2.0) / double(n);
    acc += std::polar(1.0, ang) * std::conj(psi_theta[(it + n - m) % n]) * psi_theta[m];
  }
  return acc / (2.0 * double(n));
}

QuantumState random_momentum_state(int n_q, std::uint64_t seed) {
  auto v = oracle::random_state(n_q, seed);
  QuantumState s(n_q);
  std::copy(v.begin(), v.end(), s.amplitudes().begin());
  return s;
}

}  // namespace

TEST_CASE("wigner matches the direct lattice sum and is real") {
  for (int n_q : {2, 3, 4}) {
    auto s = random_momentum_state(n_q, 100 + n_q);
    auto grid = wigner(s);
    auto psi = naive_angle_wf(s);
    const std::size_t n = s.dim();
    double worst = 0.0, worst_im = 0.0;
    for (std::size_t it = 0; it < 2 * n; ++it)
      for (std::size_t in = 0; in < 2 * n; ++in) {
        const cplx w = wigner_point_oracle(psi, it, in);
        worst = std::max(worst, std::abs(grid.value_at(it, in) - w.real()));
        worst_im = std::max(worst_im, std::abs(w.imag()));
      }
    CHECK(worst < 1e-12);
    CHECK(worst_im < 1e-10);       // defining sum itself is real
    CHECK(grid.max_imag_residue < 1e-10);
  }
}

TEST_CASE("wigner sum rules and marginals") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto s = random_momentum_state(6, 300 + seed);
    auto grid = wigner(s);
    const double n = double(s.dim());

    double sum = 0.0, sum2 = 0.0;
    for (double w : grid.values) {
      sum += w;
      sum2 += w * w;
    }
    CHECK(std::abs(sum - 1.0) < 1e-10);
    CHECK(std::abs(sum2 - 1.0 / n) < 1e-10);

    auto mom = wigner_momentum_marginal(grid);
    for (std::size_t lvl = 0; lvl < s.dim(); ++lvl)
      CHECK(std::abs(mom[lvl] - std::norm(s[lvl])) < 1e-10);

    auto ang = wigner_angle_marginal(grid);
    auto psi = naive_angle_wf(s);
    for (std::size_t j = 0; j < s.dim(); ++j)
      CHECK(std::abs(ang[j] - std::norm(psi[j])) < 1e-10);

    // odd rows/columns carry no marginal weight
    const std::size_t side = grid.side();
    for (std::size_t j = 1; j < side; j += 2) {
      double col = 0.0, row = 0.0;
      for (std::size_t i = 0; i < side; ++i) {
        col += grid.value_at(i, j);
        row += grid.value_at(j, i);
      }
      CHECK(std::abs(col) < 1e-10);
      CHECK(std::abs(row) < 1e-10);
    }
  }
}

TEST_CASE("wigner of a momentum eigenstate: constant line plus alternating ghost") {
  const int n_q = 4;
  const std::size_t n = 16, n0 = 5;
  auto s = prepare_momentum_state(n_q, n0);
  auto grid = wigner(s);
  const double v = 1.0 / (2.0 * double(n));
  for (std::size_t it = 0; it < 2 * n; ++it) {
    CHECK(std::abs(grid.value_at(it, 2 * n0) - v) < 1e-13);
    const double ghost = grid.value_at(it, (2 * n0 + n) % (2 * n));
    CHECK(std::abs(std::abs(ghost) - v) < 1e-13);  // alternating +-
    for (std::size_t in = 0; in < 2 * n; ++in)
      if (in != 2 * n0 && in != (2 * n0 + n) % (2 * n))
        CHECK(std::abs(grid.value_at(it, in)) < 1e-13);
  }
  // line structure pins the IPR: sum W^4 = 2 * 2N / (2N)^4 -> xi = 4N
  CHECK(std::abs(ipr_wigner(grid) - 4.0 * double(n)) < 1e-9);
  CHECK(std::abs(wigner_ipr(s) - 4.0 * double(n)) < 1e-9);
}

TEST_CASE("ipr reference values") {
  // N equal weights 1/N on one lattice point each -> xi = N;
  // N^2 components of magnitude 1/N^(3/2) -> xi = N^2.
  WignerGrid g;
  g.N = 8;
  g.values.assign(4 * 64, 0.0);
  for (std::size_t i = 0; i < 8; ++i) g.values[i * 17] = 1.0 / 8.0;
  CHECK(std::abs(ipr_wigner(g) - 8.0) < 1e-12);
  std::fill(g.values.begin(), g.values.end(), 0.0);
  for (std::size_t i = 0; i < 64; ++i) g.values[i] = 1.0 / (8.0 * std::sqrt(8.0));
  CHECK(std::abs(ipr_wigner(g) - 64.0) < 1e-9);
  std::fill(g.values.begin(), g.values.end(), 0.0);
  CHECK_THROWS_AS(ipr_wigner(g), std::invalid_argument);
}

TEST_CASE("wigner_values_at agrees with the full grid") {
  auto s = random_momentum_state(5, 41);
  auto grid = wigner(s);
  std::vector<LatticePoint> pts;
  auto rng = CounterRng::stream(8, 0);
  for (int i = 0; i < 40; ++i)
    pts.push_back({std::size_t(rng.uniform() * 64), std::size_t(rng.uniform() * 64)});
  auto vals = wigner_values_at(s, pts);
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(std::abs(vals[i] - grid.value_at(pts[i].theta_idx, pts[i].mom_idx)) < 1e-13);
}

TEST_CASE("wigner_error basics") {
  auto s = random_momentum_state(4, 55);
  auto g = wigner(s);
  std::vector<LatticePoint> region;
  for (std::size_t i = 0; i < 32; ++i) region.push_back({i, (i * 3) % 32});
  CHECK(wigner_error(g, g, region) == 0.0);
  auto neg = g;
  for (auto& v : neg.values) v = -v;
  CHECK(std::abs(wigner_error(g, neg, region) - 2.0) < 1e-12);
  CHECK_THROWS_AS(wigner_error(g, g, {}), std::invalid_argument);
}

TEST_CASE("zone sampling stays inside the zone and is deterministic") {
  auto params = RotatorParams::from_K(6, 5.0, 0.5, 32.0, 32);
  Zone zone;
  zone.name = "localized";
  zone.theta_lo = 0.0;
  zone.theta_hi = 2.0 * std::numbers::pi;
  zone.mom_lo = 20.0;
  zone.mom_hi = 44.0;
  zone.unit = Zone::MomentumUnit::LevelAbsolute;
  auto pts = sample_zone_points(zone, params, 128, 99);
  auto pts2 = sample_zone_points(zone, params, 128, 99);
  REQUIRE(pts.size() == 128);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].theta_idx < 128);
    CHECK(pts[i].mom_idx >= 40);
    CHECK(pts[i].mom_idx <= 88);
    CHECK(pts[i].theta_idx == pts2[i].theta_idx);
    CHECK(pts[i].mom_idx == pts2[i].mom_idx);
  }
}

TEST_CASE("husimi of a momentum eigenstate is a theta-independent gaussian ridge") {
  auto params = RotatorParams::from_K(5, 1.3, 2.0 * std::numbers::pi / 32.0, 16.0, 8);
  auto s = prepare_momentum_state(5, 8);
  auto grid = husimi(s, params);
  REQUIRE(grid.n_theta == 32);
  REQUIRE(grid.n_momentum == 32);
  // theta-independent at fixed n
  for (int im = 0; im < 32; ++im)
    for (int it = 1; it < 32; ++it)
      CHECK(std::abs(grid.value_at(im, it) - grid.value_at(im, 0)) < 1e-12);
  // gaussian ratio between adjacent rows near the peak:
  // |h(n0+d)|^2 ~ exp(-T d^2)
  const double r1 = grid.value_at(9, 0) / grid.value_at(8, 0);
  CHECK(std::abs(r1 - std::exp(-params.T)) < 1e-6);
  const double r2 = grid.value_at(10, 0) / grid.value_at(8, 0);
  CHECK(std::abs(r2 - std::exp(-4.0 * params.T)) < 1e-6);
  // normalized
  double total = 0.0;
  for (double v : grid.values) total += v;
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("husimi interference of two adjacent momentum states") {
  // (|n0> + |n0+1>)/sqrt2: density at fixed n oscillates in theta with
  // period 2 pi; closed form from the two-term sum.
  const int n_q = 5;
  const std::size_t n0 = 12;
  auto params = RotatorParams::from_K(n_q, 1.3, 2.0 * std::numbers::pi / 32.0, 16.0, n0);
  QuantumState s(n_q);
  s[0] = cplx{0.0, 0.0};
  s[n0] = cplx{std::numbers::sqrt2 / 2.0, 0.0};
  s[n0 + 1] = cplx{std::numbers::sqrt2 / 2.0, 0.0};
  auto grid = husimi(s, params);

  const double t = params.T;
  const double pref = std::sqrt(t / std::numbers::pi) / 32.0 / 2.0;
  auto closed_form = [&](int nc, double theta) {
    const double g0 = std::exp(-0.5 * t * double(nc - int(n0)) * double(nc - int(n0)));
    const double g1 = std::exp(-0.5 * t * double(nc - int(n0) - 1) * double(nc - int(n0) - 1));
    return pref * (g0 * g0 + g1 * g1 + 2.0 * g0 * g1 * std::cos(theta));
  };
  double raw_total = grid.raw_total;
  for (int im = 8; im <= 16; ++im)
    for (int it = 0; it < 32; it += 5) {
      const double want = closed_form(im, grid.theta(it)) / raw_total;
      CHECK(std::abs(grid.value_at(im, it) - want) < 1e-9);
    }
}

TEST_CASE("husimi is non-negative and bounded by normalization") {
  auto params = RotatorParams::from_K(6, 1.3, 2.0 * std::numbers::pi / 64.0, 32.0, 1);
  auto s = random_momentum_state(6, 1234);
  auto grid = husimi(s, params);
  double total = 0.0;
  for (double v : grid.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    total += v;
  }
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("husimi equals the gaussian-smoothed wigner where density is significant") {
  // Coarse-grain W with the minimal-uncertainty kernel (var 1/(2T) in n,
  // T/2 in theta); compare pointwise where density > 10% of max.
  const int n_q = 5;
  const std::size_t n = 32;
  auto params = RotatorParams::from_K(n_q, 1.3, 2.0 * std::numbers::pi / double(n), 16.0, 1);
  const double T = params.T;
  auto s = random_momentum_state(n_q, 777);
  auto grid_h = husimi(s, params);
  auto grid_w = wigner(s);

  // predicted(theta0, n0) = sum_{lattice} W * exp(-(dn)^2 T - (dth)^2 / T)
  // with half-index lattice coordinates and wrapped distances.
  std::vector<double> pred(n * n, 0.0);
  for (std::size_t i0 = 0; i0 < n; ++i0) {
    const double th0 = 2.0 * std::numbers::pi * double(i0) / double(n);
    for (std::size_t m0 = 0; m0 < n; ++m0) {
      double acc = 0.0;
      for (std::size_t it = 0; it < 2 * n; ++it) {
        double dth = grid_w.theta(it) - th0;
        dth = std::remainder(dth, 2.0 * std::numbers::pi);
        const double wth = std::exp(-dth * dth / T);
        for (std::size_t in = 0; in < 2 * n; ++in) {
          double dn = grid_w.momentum_level(in) - double(m0);
          dn = std::remainder(dn * T, 2.0 * std::numbers::pi) / T;  // wrap in p
          acc += grid_w.value_at(it, in) * wth * std::exp(-dn * dn * T);
        }
      }
      pred[m0 * n + i0] = acc;
    }
  }
  double pred_total = 0.0;
  for (double v : pred) pred_total += v;
  for (auto& v : pred) v /= pred_total;

  double peak = 0.0;
  for (double v : grid_h.values) peak = std::max(peak, v);
  for (std::size_t m0 = 0; m0 < n; ++m0)
    for (std::size_t i0 = 0; i0 < n; ++i0) {
      const double h = grid_h.value_at(int(m0), int(i0));
      if (h < 0.1 * peak) continue;
      CHECK(std::abs(pred[m0 * n + i0] - h) / h < 0.05);
    }
}

TEST_CASE("husimi input validation") {
  auto params = RotatorParams::from_K(4, 1.0, 0.5, 8.0, 0);
  auto s = prepare_momentum_state(4, 0);
  HusimiGridSpec bad;
  bad.n_theta = 12;
  CHECK_THROWS_AS(husimi(s, params, bad), std::invalid_argument);
  bad.n_theta = 16;
  bad.n_momentum = 5;
  CHECK_THROWS_AS(husimi(s, params, bad), std::invalid_argument);
}
