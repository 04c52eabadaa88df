#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qkr/rng.hpp"

namespace qkr {

/// One point of the standard map, momentum in level units, theta in [0, 2pi).
struct ClassicalPoint {
  double n = 0.0;
  double theta = 0.0;
};

/// n' = n + k sin(theta); theta' = theta + T n', theta wrapped to [0, 2pi).
ClassicalPoint iterate(ClassicalPoint p, double k, double T);

/// Exact inverse of `iterate`.
ClassicalPoint iterate_inverse(ClassicalPoint p, double k, double T);

/// One iterate followed by additive noise, uniform delta_theta and delta_p in
/// (-pi*eps, pi*eps) with p = T*n the rescaled momentum (so classical and
/// quantum epsilon are comparable per step).
ClassicalPoint iterate_noisy(ClassicalPoint p, double k, double T, double eps_classical,
                             CounterRng& rng);

struct ClassicalEnsemble {
  std::vector<ClassicalPoint> points;
  double k = 0.0;
  double T = 1.0;
  double noise_epsilon = 0.0;

  void evolve(int steps, CounterRng& rng);
};

/// All iterates of `n_trajectories` seeded points over `t` steps, with
/// momentum folded into one 2*pi/T cell. Points are returned in (theta, p)
/// with p = T*n mod 2*pi shifted to [-pi, pi). Initial points are uniform
/// over the cell, or evenly spaced along the line p = *line_p0 when given.
struct PortraitPoint {
  double theta = 0.0;
  double p = 0.0;
};
std::vector<PortraitPoint> phase_portrait(double K, int n_trajectories, int t,
                                          std::uint64_t seed,
                                          std::optional<double> line_p0 = {});

/// Normalized occupancy histogram of an ensemble over a (theta, n) grid
/// covering theta in [0, 2pi) x n in [n_lo, n_hi). Weights sum to 1.
struct DensityGrid {
  int n_theta = 0;
  int n_momentum = 0;
  double n_lo = 0.0;
  double n_hi = 0.0;
  std::vector<double> values;  // row-major [theta][n]

  double& at(int it, int in) { return values[static_cast<std::size_t>(it) * n_momentum + in]; }
  double at(int it, int in) const {
    return values[static_cast<std::size_t>(it) * n_momentum + in];
  }
};
DensityGrid classical_density(const ClassicalEnsemble& ensemble, int n_theta,
                              int n_momentum, double n_lo, double n_hi);

/// Fraction of cells of a coarse (theta, p) grid visited by a portrait.
double occupied_cell_fraction(const std::vector<PortraitPoint>& points, int grid);

/// Numerical estimate of the main stability island around the period-1 fixed
/// point (theta = pi, p = 0). Radii are measured in cell-normalized units
/// (theta/2pi, p/2pi) by bisecting the largest launch offset whose orbit
/// stays bounded.
struct IslandEstimate {
  double theta_center = 0.0;   // radians
  double p_center = 0.0;       // radians
  double radius_theta = 0.0;   // cell units
  double radius_p = 0.0;       // cell units
  double inscribed_radius() const { return radius_theta < radius_p ? radius_theta : radius_p; }
};
IslandEstimate locate_main_island(double K, int probe_steps = 4000);

}  // namespace qkr
