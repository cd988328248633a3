#pragma once

// Test-only reference computations, kept independent of the library paths
// they check.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "deltanls/grid.hpp"
#include "deltanls/transforms.hpp"

namespace oracles {

using deltanls::Complex;

inline constexpr double pi = std::numbers::pi;
inline const double sqrt_pi = std::sqrt(pi);

// Closed-form free evolution of exp(-x^2/2) under i u_t = -1/2 u_xx:
//   u(t, x) = (1 + i t)^{-1/2} exp(-x^2 / (2 (1 + i t))).
inline Complex free_gaussian(double t, double x) {
  const Complex a{1.0, t};
  return std::exp(-x * x / (2.0 * a)) / std::sqrt(a);
}

// |u(t,0)| of the same solution.
inline double free_gaussian_sup(double t) {
  return std::pow(1.0 + t * t, -0.25);
}

// int_x^0 exp(-(y-c)^2/2) exp(-q y) dy via the error function.
inline double gauss_exp_integral(double x, double c, double q) {
  const double pref = std::exp(0.5 * q * q - q * c);
  const double lo = (x - (c - q)) / std::sqrt(2.0);
  const double hi = (0.0 - (c - q)) / std::sqrt(2.0);
  return pref * std::sqrt(pi / 2.0) * (std::erf(hi) - std::erf(lo));
}

// band-limited random field, deterministic in seed
inline deltanls::WaveField random_smooth_field(const deltanls::Grid& grid,
                                               std::uint64_t seed,
                                               double band_fraction = 0.125) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  deltanls::FourierField F;
  F.grid = grid;
  F.coefficients.assign(static_cast<size_t>(grid->n), Complex{0.0, 0.0});
  const double band = band_fraction * grid->nyquist_freq();
  for (int k = 0; k < grid->n; ++k) {
    const double xi = grid->freqs[k];
    const double damp = std::exp(-(xi / band) * (xi / band));
    F.coefficients[k] = damp * Complex{gauss(rng), gauss(rng)};
  }
  deltanls::WaveField f = deltanls::from_fourier(F);
  // keep the mass away from the box edges
  const double w = 0.3 * grid->half_width;
  for (int j = 0; j < grid->n; ++j) {
    const double s = grid->xs[j] / w;
    f.values[j] *= std::exp(-0.5 * s * s);
  }
  return f;
}

// least-squares slope of y against x (plain, not log-log)
inline double linear_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t k = 0; k < n; ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracles
