#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qkr/circuits.hpp"
#include "qkr/state.hpp"

namespace qkr {

/// Discrete Wigner function on the doubled 2N x 2N lattice.
///
/// Conventions (pinned by the sum-rule tests):
///   - first index it: doubled angle index, theta = pi*it/N, it in [0, 2N)
///   - second index in: doubled momentum index, level = in/2, in in [0, 2N)
///   - W(it, in) = Re[ exp(i*pi*in*it/N)/(2N) *
///                     sum_m exp(-2*pi*i*in*m/N) psi(it-m)* psi(m) ]
///     where psi is the angle-basis wave function and indices on psi are mod N.
/// With this lattice the defining sum is real, sum W = 1, sum W^2 = 1/N, the
/// momentum marginal lands on even `in` and the angle marginal on even `it`.
struct WignerGrid {
  std::size_t N = 0;
  std::vector<double> values;      // row-major, 2N rows (angle) x 2N cols (momentum)
  double max_imag_residue = 0.0;   // largest |Im| seen while evaluating

  std::size_t side() const { return 2 * N; }
  double value_at(std::size_t theta_idx, std::size_t mom_idx) const {
    return values[theta_idx * side() + mom_idx];
  }
  double theta(std::size_t theta_idx) const;
  double momentum_level(std::size_t mom_idx) const { return 0.5 * static_cast<double>(mom_idx); }
};

/// Full-lattice transform; O(N^2 log N), O(N^2) storage. Keep n_q <= 12.
WignerGrid wigner(const QuantumState& state);

/// Momentum marginal: sum over the angle axis, length-N vector indexed by
/// level (even columns of the lattice). Odd columns are checked to vanish by
/// the invariant tests, not here.
std::vector<double> wigner_momentum_marginal(const WignerGrid& grid);
/// Angle marginal on theta_j = 2*pi*j/N (even rows).
std::vector<double> wigner_angle_marginal(const WignerGrid& grid);

/// xi = 1/(N^2 sum W^4) over the whole lattice.
double ipr_wigner(const WignerGrid& grid);

/// Same value without materializing the lattice; usable at any n_q.
double wigner_ipr(const QuantumState& state);

struct LatticePoint {
  std::size_t theta_idx = 0;  // [0, 2N)
  std::size_t mom_idx = 0;    // [0, 2N)
};

/// W at selected lattice points, grouped by row internally (one length-N FFT
/// per distinct theta row).
std::vector<double> wigner_values_at(const QuantumState& state,
                                     const std::vector<LatticePoint>& points);

/// Relative error <|W - W_eps|> / <|W|>, both means over `region`.
double wigner_error(const WignerGrid& exact, const WignerGrid& noisy,
                    const std::vector<LatticePoint>& region);
double wigner_error_values(const std::vector<double>& exact,
                           const std::vector<double>& noisy);

/// Named phase-space rectangle. Momentum bounds are either in rescaled
/// momentum p = T*(n - n_bar) (radians, portable across n_q) or absolute
/// levels.
struct Zone {
  enum class MomentumUnit { CellRadians, LevelAbsolute };
  std::string name;
  double theta_lo = 0.0, theta_hi = 2.0 * 3.14159265358979323846;
  double mom_lo = 0.0, mom_hi = 0.0;
  MomentumUnit unit = MomentumUnit::CellRadians;
};

/// `count` lattice points inside the zone: up to 32 distinct theta rows drawn
/// uniformly from the zone's row range, columns uniform per row. Deterministic
/// in (zone bounds, params, seed).
std::vector<LatticePoint> sample_zone_points(const Zone& zone, const RotatorParams& params,
                                             std::size_t count, std::uint64_t seed);

/// Husimi density |h(theta, n)|^2 on an n_momentum x n_theta grid,
/// normalized so the grid sums to 1. h is the Gaussian-windowed transform of
/// the momentum wave function with width set by T; the window is truncated at
/// |m - n| <= N/2 with wraparound in m.
struct HusimiGridSpec {
  int n_theta = 0;     // 0: use N (must be a power of two)
  int n_momentum = 0;  // 0: use N (must divide N)
};

struct HusimiGrid {
  std::size_t N = 0;
  double T = 0.0;
  double n_bar = 0.0;
  int n_theta = 0;
  int n_momentum = 0;
  double raw_total = 0.0;       // grid sum before normalization
  std::vector<double> values;   // row-major, n_momentum rows x n_theta cols

  double value_at(int mom_idx, int theta_idx) const {
    return values[static_cast<std::size_t>(mom_idx) * n_theta + theta_idx];
  }
  double theta(int theta_idx) const;
  double momentum_level(int mom_idx) const {
    return static_cast<double>(mom_idx) * (static_cast<double>(N) / n_momentum);
  }
};

HusimiGrid husimi(const QuantumState& state, const RotatorParams& params,
                  HusimiGridSpec spec = {});

}  // namespace qkr
