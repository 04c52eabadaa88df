#include "qkr/classical.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qkr {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap_2pi(double x) {
  x = std::fmod(x, two_pi);
  if (x < 0.0) x += two_pi;
  return x;
}

}  // namespace

ClassicalPoint iterate(ClassicalPoint p, double k, double T) {
  const double n_new = p.n + k * std::sin(p.theta);
  return {n_new, wrap_2pi(p.theta + T * n_new)};
}

ClassicalPoint iterate_inverse(ClassicalPoint p, double k, double T) {
  const double theta_old = wrap_2pi(p.theta - T * p.n);
  return {p.n - k * std::sin(theta_old), theta_old};
}

ClassicalPoint iterate_noisy(ClassicalPoint p, double k, double T, double eps_classical,
                             CounterRng& rng) {
  ClassicalPoint q = iterate(p, k, T);
  if (eps_classical > 0.0) {
    const double half = std::numbers::pi * eps_classical;
    q.theta = wrap_2pi(q.theta + rng.uniform_symmetric(half));
    q.n += rng.uniform_symmetric(half) / T;  // delta_p = T*delta_n
  }
  return q;
}

void ClassicalEnsemble::evolve(int steps, CounterRng& rng) {
  for (int t = 0; t < steps; ++t)
    for (auto& p : points) p = iterate_noisy(p, k, T, noise_epsilon, rng);
}

std::vector<PortraitPoint> phase_portrait(double K, int n_trajectories, int t,
                                          std::uint64_t seed,
                                          std::optional<double> line_p0) {
  if (K < 0.0) throw std::invalid_argument("K must be >= 0");
  // Work in (theta, p = T*n) with T = 1: the folded map depends on K alone.
  auto rng = CounterRng::stream(seed, 0);
  std::vector<PortraitPoint> out;
  out.reserve(static_cast<std::size_t>(n_trajectories) * static_cast<std::size_t>(t));
  for (int traj = 0; traj < n_trajectories; ++traj) {
    ClassicalPoint p = line_p0
        ? ClassicalPoint{*line_p0, two_pi * (traj + 0.5) / n_trajectories}
        : ClassicalPoint{rng.uniform() * two_pi - std::numbers::pi,
                         rng.uniform() * two_pi};
    for (int i = 0; i < t; ++i) {
      p = iterate(p, K, 1.0);
      double folded = std::fmod(p.n, two_pi);
      if (folded < -std::numbers::pi) folded += two_pi;
      if (folded >= std::numbers::pi) folded -= two_pi;
      out.push_back({p.theta, folded});
    }
  }
  return out;
}

DensityGrid classical_density(const ClassicalEnsemble& ensemble, int n_theta,
                              int n_momentum, double n_lo, double n_hi) {
  if (n_theta <= 0 || n_momentum <= 0) throw std::invalid_argument("degenerate grid");
  if (ensemble.points.empty()) throw std::invalid_argument("empty ensemble");
  DensityGrid g;
  g.n_theta = n_theta;
  g.n_momentum = n_momentum;
  g.n_lo = n_lo;
  g.n_hi = n_hi;
  g.values.assign(static_cast<std::size_t>(n_theta) * n_momentum, 0.0);
  const double span = n_hi - n_lo;
  std::size_t used = 0;
  for (const auto& p : ensemble.points) {
    // Fold momentum into [n_lo, n_hi).
    double n = std::fmod(p.n - n_lo, span);
    if (n < 0.0) n += span;
    const int in = static_cast<int>(n / span * n_momentum);
    const int it = static_cast<int>(wrap_2pi(p.theta) / two_pi * n_theta);
    g.at(it >= n_theta ? n_theta - 1 : it, in >= n_momentum ? n_momentum - 1 : in) += 1.0;
    ++used;
  }
  for (auto& v : g.values) v /= static_cast<double>(used);
  return g;
}

double occupied_cell_fraction(const std::vector<PortraitPoint>& points, int grid) {
  std::vector<char> hit(static_cast<std::size_t>(grid) * grid, 0);
  for (const auto& p : points) {
    int it = static_cast<int>(wrap_2pi(p.theta) / two_pi * grid);
    int ip = static_cast<int>((p.p + std::numbers::pi) / two_pi * grid);
    if (it >= grid) it = grid - 1;
    if (ip >= grid) ip = grid - 1;
    if (ip < 0) ip = 0;
    hit[static_cast<std::size_t>(it) * grid + ip] = 1;
  }
  std::size_t count = 0;
  for (char h : hit) count += h;
  return static_cast<double>(count) / static_cast<double>(hit.size());
}

namespace {

// An orbit launched inside the island librates around (pi, 0); escape is
// detected by leaving a generous bounding box.
bool stays_trapped(double K, double theta0, double p0, int steps) {
  ClassicalPoint p{p0, theta0};  // T = 1, so n == p
  for (int t = 0; t < steps; ++t) {
    p = iterate(p, K, 1.0);
    double dth = p.theta - std::numbers::pi;
    if (std::abs(p.n) > 1.9 || std::abs(dth) > 1.9) return false;
  }
  return true;
}

double bisect_radius(double K, int steps, bool along_theta) {
  double lo = 0.0, hi = 1.9;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double theta0 = std::numbers::pi + (along_theta ? mid : 0.0);
    const double p0 = along_theta ? 0.0 : mid;
    if (stays_trapped(K, theta0, p0, steps))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

IslandEstimate locate_main_island(double K, int probe_steps) {
  IslandEstimate est;
  est.theta_center = std::numbers::pi;
  est.p_center = 0.0;
  est.radius_theta = bisect_radius(K, probe_steps, true) / two_pi;
  est.radius_p = bisect_radius(K, probe_steps, false) / two_pi;
  return est;
}

}  // namespace qkr
