#include "deltanls/transforms.hpp"

#include <cmath>
#include <stdexcept>

#include "deltanls/fft.hpp"
#include "deltanls/norms.hpp"

namespace deltanls {

FourierField to_fourier(const WaveField& f) {
  const int n = f.grid->n;
  FourierField F;
  F.grid = f.grid;
  F.coefficients.resize(static_cast<size_t>(n));
  dft_forward(n, f.values.data(), F.coefficients.data());
  const double inv_n = 1.0 / n;
  for (Complex& c : F.coefficients) c *= inv_n;
  return F;
}

WaveField from_fourier(const FourierField& F) {
  const int n = F.grid->n;
  WaveField f;
  f.grid = F.grid;
  f.values.resize(static_cast<size_t>(n));
  dft_inverse(n, F.coefficients.data(), f.values.data());
  return f;
}

WaveField apply_multiplier(const WaveField& f, const std::vector<Complex>& m) {
  const int n = f.grid->n;
  if (static_cast<int>(m.size()) != n) {
    throw std::invalid_argument("apply_multiplier: multiplier size mismatch");
  }
  std::vector<Complex> work(static_cast<size_t>(n));
  dft_forward(n, f.values.data(), work.data());
  const double inv_n = 1.0 / n;
  for (int k = 0; k < n; ++k) work[k] *= m[k] * inv_n;
  WaveField out;
  out.grid = f.grid;
  out.values.resize(static_cast<size_t>(n));
  dft_inverse(n, work.data(), out.values.data());
  return out;
}

WaveField spectral_derivative(const WaveField& f) {
  const GridSpec& g = *f.grid;
  std::vector<Complex> m(static_cast<size_t>(g.n));
  for (int k = 0; k < g.n; ++k) m[k] = Complex{0.0, g.freqs[k]};
  m[static_cast<size_t>(g.n / 2)] = Complex{0.0, 0.0};  // drop the lone Nyquist mode
  return apply_multiplier(f, m);
}

WaveField translate(const WaveField& f, double x0) {
  const GridSpec& g = *f.grid;
  if (!(std::abs(x0) < g.half_width)) {
    throw std::invalid_argument("translate: |x0| must be below half_width");
  }
  if (x0 == 0.0) return f;

  // Mass about to wrap across the periodic boundary.
  double wrap = 0.0, total = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double m = std::norm(f.values[j]);
    total += m;
    const double x = g.xs[j];
    if ((x0 > 0.0 && x >= g.half_width - x0) || (x0 < 0.0 && x < -g.half_width - x0)) {
      wrap += m;
    }
  }
  if (total > 0.0 && wrap / total > 1e-8) {
    warn("translate: " + std::to_string(wrap / total) +
         " of the mass wraps across the boundary (shift " + std::to_string(x0) + ")");
  }

  const double shift_cells = x0 / g.dx;
  const double nearest = std::round(shift_cells);
  if (std::abs(shift_cells - nearest) < 1e-12) {
    // exact sample rotation
    const int s = static_cast<int>(nearest);
    WaveField out;
    out.grid = f.grid;
    out.values.resize(static_cast<size_t>(g.n));
    for (int j = 0; j < g.n; ++j) {
      int src = (j - s) % g.n;
      if (src < 0) src += g.n;
      out.values[j] = f.values[src];
    }
    return out;
  }

  std::vector<Complex> m(static_cast<size_t>(g.n));
  for (int k = 0; k < g.n; ++k) {
    m[k] = std::exp(Complex{0.0, -g.freqs[k] * x0});
  }
  return apply_multiplier(f, m);
}

WaveField reflect(const WaveField& f) {
  const int n = f.grid->n;
  WaveField out;
  out.grid = f.grid;
  out.values.resize(static_cast<size_t>(n));
  out.values[0] = f.values[0];
  for (int j = 1; j < n; ++j) out.values[j] = f.values[n - j];
  return out;
}

}  // namespace deltanls
