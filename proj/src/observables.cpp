#include "qkr/observables.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qkr {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap_half(double x) {
  // wrap to [-0.5, 0.5)
  x -= std::floor(x + 0.5);
  return x;
}
}  // namespace

void TimeSeries::push(std::int64_t t, double v) {
  if (!times.empty() && t <= times.back())
    throw std::invalid_argument("time series must be strictly increasing");
  times.push_back(t);
  values.push_back(v);
}

double second_moment(const QuantumState& state, double n0) {
  if (state.representation() != Representation::Momentum)
    throw std::logic_error("second moment expects a momentum-basis state");
  const auto a = state.amplitudes();
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    const double d = static_cast<double>(n) - n0;
    s += d * d * std::norm(a[n]);
  }
  return s;
}

double fidelity(const QuantumState& a, const QuantumState& b) {
  return std::norm(a.inner_product(b));
}

bool PhaseSpaceDomain::contains(double theta, double level, double T, double n_bar) const {
  const double u = wrap_half((theta - center_theta) / two_pi);
  const double v = wrap_half((T * (level - n_bar) - center_p) / two_pi);
  if (shape == Shape::Circle) return u * u + v * v <= radius * radius;
  return std::abs(u) <= 0.5 * extent_u && std::abs(v) <= 0.5 * extent_v;
}

double tunneling_probability(const HusimiGrid& grid, const PhaseSpaceDomain& domain) {
  double s = 0.0;
  std::size_t hit = 0;
  for (int im = 0; im < grid.n_momentum; ++im) {
    const double level = grid.momentum_level(im);
    for (int it = 0; it < grid.n_theta; ++it) {
      if (domain.contains(grid.theta(it), level, grid.T, grid.n_bar)) {
        s += grid.value_at(im, it);
        ++hit;
      }
    }
  }
  if (hit == 0) throw std::invalid_argument("domain does not intersect the Husimi grid");
  return s;
}

namespace {

// Crossing time of `level`, scanning in the given direction (+1: first value
// >= level, -1: first value <= level). Log-linear in value when both
// bracketing samples are positive, linear otherwise.
std::optional<double> crossing_time(const TimeSeries& s, double level, int direction) {
  if (s.size() < 1) return std::nullopt;
  auto crossed = [&](double v) { return direction > 0 ? v >= level : v <= level; };
  if (crossed(s.values[0])) return static_cast<double>(s.times[0]);
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!crossed(s.values[i])) continue;
    const double t1 = static_cast<double>(s.times[i - 1]);
    const double t2 = static_cast<double>(s.times[i]);
    const double v1 = s.values[i - 1], v2 = s.values[i];
    if (v1 > 0.0 && v2 > 0.0 && level > 0.0 && v1 != v2) {
      const double f = (std::log(level) - std::log(v1)) / (std::log(v2) - std::log(v1));
      return t1 + f * (t2 - t1);
    }
    if (v1 != v2) return t1 + (level - v1) / (v2 - v1) * (t2 - t1);
    return t2;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> extract_doubling_time(const TimeSeries& exact,
                                            const TimeSeries& noisy) {
  if (exact.size() < 2 || noisy.size() < 2) return std::nullopt;
  double plateau = 0.0;
  std::size_t count = 0;
  for (std::size_t i = exact.size() / 2; i < exact.size(); ++i) {
    plateau += exact.values[i];
    ++count;
  }
  plateau /= static_cast<double>(count);
  if (plateau <= 0.0) return std::nullopt;
  return crossing_time(noisy, 2.0 * plateau, +1);
}

std::optional<double> extract_fidelity_time(const TimeSeries& fidelity_series) {
  if (fidelity_series.size() == 0) return std::nullopt;
  if (std::abs(fidelity_series.values[0] - 1.0) > 1e-9 || fidelity_series.times[0] != 0)
    throw std::invalid_argument("fidelity series must start at f(0) = 1");
  return crossing_time(fidelity_series, 0.5, -1);
}

std::optional<double> extract_wigner_time(const TimeSeries& delta_w_series,
                                          double threshold) {
  return crossing_time(delta_w_series, threshold, +1);
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  LinearFit fit;
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cov = sxy - sx * sy / n;
  if (vx <= 0.0) throw std::invalid_argument("degenerate x values");
  fit.slope = cov / vx;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.correlation = vy > 0.0 ? cov / std::sqrt(vx * vy) : 0.0;
  return fit;
}

}  // namespace qkr
