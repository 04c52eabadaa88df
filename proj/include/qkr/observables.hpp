#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qkr/phasespace.hpp"
#include "qkr/state.hpp"

namespace qkr {

/// One observable sampled along a trajectory, kick counts strictly increasing.
struct TimeSeries {
  std::vector<std::int64_t> times;
  std::vector<double> values;
  std::string observable;

  void push(std::int64_t t, double v);
  std::size_t size() const { return times.size(); }
};

/// sum_n (n - n0)^2 |a_n|^2 with plain integer distances (no wraparound):
/// far transfers are supposed to count at face value.
double second_moment(const QuantumState& state, double n0);

/// |<a|b>|^2.
double fidelity(const QuantumState& a, const QuantumState& b);

/// Circle or rectangle in phase space. Coordinates are cell-normalized:
/// u = theta/2pi and v = (n - n_bar)*T/2pi, both wrapped to one cell, so a
/// circle is isotropic and the same domain works across n_q.
struct PhaseSpaceDomain {
  enum class Shape { Circle, Rectangle };
  Shape shape = Shape::Circle;
  double center_theta = 0.0;  // radians
  double center_p = 0.0;      // p = T*(n - n_bar), radians
  double radius = 0.0;        // cell units (circle)
  double extent_u = 0.0;      // cell units, full width (rectangle)
  double extent_v = 0.0;

  bool contains(double theta, double level, double T, double n_bar) const;
};

/// I = sum of the normalized Husimi density over grid cells whose centers
/// lie in the domain.
double tunneling_probability(const HusimiGrid& grid, const PhaseSpaceDomain& domain);

/// First time the noisy second moment reaches twice the exact saturation
/// plateau. The plateau is the mean of the exact series over its trailing
/// half; crossings are located by log-linear interpolation between samples.
/// nullopt: never crossed within the series.
std::optional<double> extract_doubling_time(const TimeSeries& exact,
                                            const TimeSeries& noisy);

/// Interpolated crossing of f = 0.5 from above; requires f(0) = 1.
std::optional<double> extract_fidelity_time(const TimeSeries& fidelity_series);

/// Interpolated crossing of `threshold` from below on a relative-error series.
std::optional<double> extract_wigner_time(const TimeSeries& delta_w_series,
                                          double threshold = 0.5);

/// Least-squares slope/intercept plus Pearson correlation.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double correlation = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qkr
