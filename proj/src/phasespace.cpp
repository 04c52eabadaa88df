#include "qkr/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qkr/fft.hpp"
#include "qkr/rng.hpp"

namespace qkr {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Angle-basis wave function under the project QFT convention:
// psi_theta(j) = (1/sqrt N) sum_n a_n exp(+2*pi*i*n*j/N).
std::vector<cplx> angle_amplitudes(const QuantumState& state) {
  if (state.representation() != Representation::Momentum)
    throw std::logic_error("phase-space transforms expect a momentum-basis state");
  std::vector<cplx> psi(state.amplitudes().begin(), state.amplitudes().end());
  fft(psi, +1);
  const double inv = 1.0 / std::sqrt(static_cast<double>(psi.size()));
  for (auto& x : psi) x *= inv;
  return psi;
}

// Unit phases exp(i*pi*r/N) for r in [0, 2N). Row phases use the exact
// integer residue (in*it mod 2N), which keeps arguments small.
std::vector<cplx> half_phase_table(std::size_t N) {
  std::vector<cplx> tab(2 * N);
  for (std::size_t r = 0; r < 2 * N; ++r)
    tab[r] = std::polar(1.0, std::numbers::pi * static_cast<double>(r) /
                                 static_cast<double>(N));
  return tab;
}

// One theta row of the lattice: F(r) = sum_m e^{-2 pi i r m / N} psi(it-m)* psi(m).
void wigner_row_transform(const std::vector<cplx>& psi_theta, std::size_t theta_idx,
                          std::vector<cplx>& scratch) {
  const std::size_t N = psi_theta.size();
  scratch.resize(N);
  for (std::size_t m = 0; m < N; ++m) {
    const std::size_t shifted = (theta_idx + N - (m % N)) % N;  // (it - m) mod N
    scratch[m] = std::conj(psi_theta[shifted]) * psi_theta[m];
  }
  fft(scratch, -1);
}

}  // namespace

double WignerGrid::theta(std::size_t theta_idx) const {
  return std::numbers::pi * static_cast<double>(theta_idx) / static_cast<double>(N);
}

WignerGrid wigner(const QuantumState& state) {
  const std::size_t N = state.dim();
  if (state.n_qubits() > 12)
    throw std::invalid_argument("full Wigner lattice above n_q=12 (use streaming paths)");
  const auto psi = angle_amplitudes(state);
  const auto phase = half_phase_table(N);

  WignerGrid grid;
  grid.N = N;
  grid.values.assign(4 * N * N, 0.0);
  std::vector<cplx> row;
  const double inv = 1.0 / (2.0 * static_cast<double>(N));
  for (std::size_t it = 0; it < 2 * N; ++it) {
    wigner_row_transform(psi, it, row);
    double* out = &grid.values[it * 2 * N];
    for (std::size_t in = 0; in < 2 * N; ++in) {
      const cplx w = phase[(in * it) % (2 * N)] * row[in % N] * inv;
      out[in] = w.real();
      const double im = std::abs(w.imag());
      if (im > grid.max_imag_residue) grid.max_imag_residue = im;
    }
  }
  return grid;
}

std::vector<double> wigner_momentum_marginal(const WignerGrid& grid) {
  const std::size_t side = grid.side();
  std::vector<double> marg(grid.N, 0.0);
  for (std::size_t it = 0; it < side; ++it)
    for (std::size_t lvl = 0; lvl < grid.N; ++lvl)
      marg[lvl] += grid.values[it * side + 2 * lvl];
  return marg;
}

std::vector<double> wigner_angle_marginal(const WignerGrid& grid) {
  const std::size_t side = grid.side();
  std::vector<double> marg(grid.N, 0.0);
  for (std::size_t j = 0; j < grid.N; ++j) {
    const double* row = &grid.values[2 * j * side];
    double s = 0.0;
    for (std::size_t in = 0; in < side; ++in) s += row[in];
    marg[j] = s;
  }
  return marg;
}

double ipr_wigner(const WignerGrid& grid) {
  double s4 = 0.0;
  for (double w : grid.values) s4 += w * w * w * w;
  if (s4 == 0.0) throw std::invalid_argument("all-zero Wigner grid");
  const double n = static_cast<double>(grid.N);
  return 1.0 / (n * n * s4);
}

double wigner_ipr(const QuantumState& state) {
  const std::size_t N = state.dim();
  const auto psi = angle_amplitudes(state);
  const auto phase = half_phase_table(N);
  const double inv = 1.0 / (2.0 * static_cast<double>(N));
  std::vector<cplx> row;
  double s4 = 0.0;
  for (std::size_t it = 0; it < 2 * N; ++it) {
    wigner_row_transform(psi, it, row);
    for (std::size_t in = 0; in < 2 * N; ++in) {
      const double w = (phase[(in * it) % (2 * N)] * row[in % N]).real() * inv;
      s4 += w * w * w * w;
    }
  }
  if (s4 == 0.0) throw std::invalid_argument("all-zero Wigner lattice");
  const double n = static_cast<double>(N);
  return 1.0 / (n * n * s4);
}

std::vector<double> wigner_values_at(const QuantumState& state,
                                     const std::vector<LatticePoint>& points) {
  const std::size_t N = state.dim();
  const auto psi = angle_amplitudes(state);
  const auto phase = half_phase_table(N);
  const double inv = 1.0 / (2.0 * static_cast<double>(N));

  // Group point indices by theta row.
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a].theta_idx < points[b].theta_idx;
  });

  std::vector<double> out(points.size(), 0.0);
  std::vector<cplx> row;
  std::size_t i = 0;
  while (i < order.size()) {
    const std::size_t it = points[order[i]].theta_idx;
    if (it >= 2 * N) throw std::out_of_range("lattice point out of range");
    wigner_row_transform(psi, it, row);
    for (; i < order.size() && points[order[i]].theta_idx == it; ++i) {
      const std::size_t in = points[order[i]].mom_idx;
      if (in >= 2 * N) throw std::out_of_range("lattice point out of range");
      out[order[i]] = (phase[(in * it) % (2 * N)] * row[in % N]).real() * inv;
    }
  }
  return out;
}

double wigner_error_values(const std::vector<double>& exact,
                           const std::vector<double>& noisy) {
  if (exact.size() != noisy.size() || exact.empty())
    throw std::invalid_argument("mismatched or empty Wigner sample sets");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    num += std::abs(exact[i] - noisy[i]);
    den += std::abs(exact[i]);
  }
  if (den == 0.0) throw std::invalid_argument("reference Wigner values are all zero");
  return num / den;
}

double wigner_error(const WignerGrid& exact, const WignerGrid& noisy,
                    const std::vector<LatticePoint>& region) {
  if (exact.N != noisy.N) throw std::invalid_argument("Wigner grid shape mismatch");
  if (region.empty()) throw std::invalid_argument("empty region");
  std::vector<double> a(region.size()), b(region.size());
  for (std::size_t i = 0; i < region.size(); ++i) {
    a[i] = exact.value_at(region[i].theta_idx, region[i].mom_idx);
    b[i] = noisy.value_at(region[i].theta_idx, region[i].mom_idx);
  }
  return wigner_error_values(a, b);
}

std::vector<LatticePoint> sample_zone_points(const Zone& zone, const RotatorParams& params,
                                             std::size_t count, std::uint64_t seed) {
  const std::size_t N = params.dim();
  const double lattice_theta = std::numbers::pi / static_cast<double>(N);

  // Theta rows covered by the zone.
  auto row_of = [&](double theta) { return theta / lattice_theta; };
  std::size_t it_lo = static_cast<std::size_t>(std::ceil(row_of(zone.theta_lo)));
  std::size_t it_hi = static_cast<std::size_t>(std::floor(row_of(zone.theta_hi)));
  it_hi = std::min<std::size_t>(it_hi, 2 * N - 1);
  if (it_hi < it_lo) throw std::invalid_argument("zone contains no theta rows");

  // Momentum columns: doubled index = 2 * level.
  double lvl_lo, lvl_hi;
  if (zone.unit == Zone::MomentumUnit::CellRadians) {
    lvl_lo = params.n_bar + zone.mom_lo / params.T;
    lvl_hi = params.n_bar + zone.mom_hi / params.T;
  } else {
    lvl_lo = zone.mom_lo;
    lvl_hi = zone.mom_hi;
  }
  double in_lo_d = std::ceil(2.0 * lvl_lo);
  double in_hi_d = std::floor(2.0 * lvl_hi);
  in_lo_d = std::max(in_lo_d, 0.0);
  in_hi_d = std::min(in_hi_d, static_cast<double>(2 * N - 1));
  if (in_hi_d < in_lo_d) throw std::invalid_argument("zone contains no momentum columns");
  const std::size_t in_lo = static_cast<std::size_t>(in_lo_d);
  const std::size_t in_hi = static_cast<std::size_t>(in_hi_d);

  // Up to 32 distinct rows, then columns uniform per row; this keeps the
  // evaluation cost at a handful of row FFTs per snapshot.
  auto rng = CounterRng::stream(seed, 0x5a5a);
  const std::size_t rows_avail = it_hi - it_lo + 1;
  const std::size_t n_rows = std::min<std::size_t>(32, std::min(rows_avail, count));
  std::vector<std::size_t> rows(rows_avail);
  for (std::size_t i = 0; i < rows_avail; ++i) rows[i] = it_lo + i;
  for (std::size_t i = 0; i < n_rows; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform() * double(rows_avail - i));
    std::swap(rows[i], rows[j]);
  }

  std::vector<LatticePoint> pts;
  pts.reserve(count);
  const std::size_t cols_span = in_hi - in_lo + 1;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t it = rows[i % n_rows];
    const std::size_t in = in_lo + static_cast<std::size_t>(rng.uniform() * double(cols_span));
    pts.push_back({it, std::min(in, in_hi)});
  }
  return pts;
}

double HusimiGrid::theta(int theta_idx) const {
  return two_pi * static_cast<double>(theta_idx) / static_cast<double>(n_theta);
}

HusimiGrid husimi(const QuantumState& state, const RotatorParams& params,
                  HusimiGridSpec spec) {
  if (state.representation() != Representation::Momentum)
    throw std::logic_error("husimi expects a momentum-basis state");
  const std::size_t N = state.dim();
  const double T = params.T;

  int n_theta = spec.n_theta > 0 ? spec.n_theta : static_cast<int>(N);
  int n_mom = spec.n_momentum > 0 ? spec.n_momentum : static_cast<int>(N);
  if (!is_pow2(static_cast<std::size_t>(n_theta)))
    throw std::invalid_argument("husimi theta grid must be a power of two");
  if (n_mom <= 0 || N % static_cast<std::size_t>(n_mom) != 0)
    throw std::invalid_argument("husimi momentum grid must divide N");
  const std::size_t stride = N / static_cast<std::size_t>(n_mom);

  HusimiGrid grid;
  grid.N = N;
  grid.T = T;
  grid.n_bar = params.n_bar;
  grid.n_theta = n_theta;
  grid.n_momentum = n_mom;
  grid.values.assign(static_cast<std::size_t>(n_mom) * n_theta, 0.0);

  const auto amps = state.amplitudes();
  const double prefactor = std::pow(T / std::numbers::pi, 0.25) /
                           std::sqrt(static_cast<double>(N));
  // Gaussian window half-width: the definition truncates at N/2; weights
  // below ~1e-18 cannot contribute at double precision, so the loop also
  // stops there.
  const long half_def = static_cast<long>(N / 2);
  const long half_eps = static_cast<long>(std::ceil(std::sqrt(2.0 * 41.5 / T)));
  const long half = std::min(half_def, half_eps);

  std::vector<cplx> folded(static_cast<std::size_t>(n_theta));
  double total = 0.0;
  for (int im = 0; im < n_mom; ++im) {
    const long center = static_cast<long>(im) * static_cast<long>(stride);
    std::fill(folded.begin(), folded.end(), cplx{0.0, 0.0});
    for (long m = center - half; m <= center + half; ++m) {
      const double d = static_cast<double>(m - center);
      const double w = std::exp(-0.5 * T * d * d);
      const std::size_t src = static_cast<std::size_t>(((m % long(N)) + long(N)) % long(N));
      // e^{i m theta_j} folds mod n_theta on the theta grid.
      const std::size_t dst =
          static_cast<std::size_t>(((m % n_theta) + n_theta) % n_theta);
      folded[dst] += prefactor * w * amps[src];
    }
    fft(folded, +1);  // h(theta_j) = sum_r folded[r] e^{+2 pi i r j / n_theta}
    double* out = &grid.values[static_cast<std::size_t>(im) * n_theta];
    for (int j = 0; j < n_theta; ++j) {
      const double dens = std::norm(folded[static_cast<std::size_t>(j)]);
      out[j] = dens;
      total += dens;
    }
  }
  if (total <= 0.0) throw std::invalid_argument("degenerate Husimi grid");
  grid.raw_total = total;
  const double inv = 1.0 / total;
  for (auto& v : grid.values) v *= inv;
  return grid;
}

}  // namespace qkr
