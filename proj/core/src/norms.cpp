#include "deltanls/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "deltanls/fft.hpp"
#include "deltanls/transforms.hpp"

namespace deltanls {

double l2_norm(const WaveField& f) {
  double s = 0.0;
  for (const Complex& v : f.values) s += std::norm(v);
  return std::sqrt(s * f.grid->dx);
}

double sup_norm(const WaveField& f) {
  double s = 0.0;
  for (const Complex& v : f.values) s = std::max(s, std::norm(v));
  return std::sqrt(s);
}

double lp_norm(const WaveField& f, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("lp_norm: p must be finite and >= 1");
  }
  double s = 0.0;
  for (const Complex& v : f.values) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid->dx, 1.0 / p);
}

double h1_norm(const WaveField& f) {
  const GridSpec& g = *f.grid;
  const int n = g.n;
  std::vector<Complex> c(static_cast<size_t>(n));
  dft_forward(n, f.values.data(), c.data());
  const double w = 2.0 * g.half_width / (static_cast<double>(n) * n);
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double xi = g.freqs[k];
    s += (1.0 + xi * xi) * std::norm(c[k]);
  }
  return std::sqrt(s * w);
}

double form_norm_H(const WaveField& f, double q) {
  if (q < 0.0) {
    throw std::invalid_argument("form_norm_H: q must be >= 0 (form not coercive otherwise)");
  }
  const GridSpec& g = *f.grid;
  const int n = g.n;
  std::vector<Complex> c(static_cast<size_t>(n));
  dft_forward(n, f.values.data(), c.data());
  const double w = 2.0 * g.half_width / (static_cast<double>(n) * n);
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double xi = g.freqs[k];
    s += xi * xi * std::norm(c[k]);
  }
  return 0.5 * s * w + q * std::norm(f.at_origin());
}

Complex inner_l2(const WaveField& a, const WaveField& b) {
  require_same_grid(a, b);
  Complex s{0.0, 0.0};
  for (size_t j = 0; j < a.values.size(); ++j) {
    s += a.values[j] * std::conj(b.values[j]);
  }
  return s * a.grid->dx;
}

double h1_distance(const WaveField& a, const WaveField& b) {
  return h1_norm(a - b);
}

double mixed_time_norm(const std::vector<double>& times,
                       const std::vector<double>& space_norms, double p) {
  if (times.size() != space_norms.size()) {
    throw std::invalid_argument("mixed_time_norm: size mismatch");
  }
  if (times.size() < 2) return 0.0;
  double s = 0.0;
  for (size_t k = 0; k + 1 < times.size(); ++k) {
    const double a = std::pow(space_norms[k], p);
    const double b = std::pow(space_norms[k + 1], p);
    s += 0.5 * (a + b) * (times[k + 1] - times[k]);
  }
  return std::pow(s, 1.0 / p);
}

}  // namespace deltanls
