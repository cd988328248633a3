#include "deltanls/grid.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace deltanls {

namespace {

std::atomic<WarningHandler> g_warning_handler{nullptr};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  return g_warning_handler.exchange(handler);
}

void warn(const std::string& message) {
  WarningHandler h = g_warning_handler.load();
  if (h) {
    h(message);
  } else {
    std::fprintf(stderr, "[deltanls] warning: %s\n", message.c_str());
  }
}

Grid make_grid(int n, double half_width) {
  if (!is_power_of_two(n) || n < 16) {
    throw std::invalid_argument("make_grid: n must be a power of two >= 16, got " +
                                std::to_string(n));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw std::invalid_argument("make_grid: half_width must be positive and finite");
  }
  auto g = std::make_shared<GridSpec>();
  g->n = n;
  g->half_width = half_width;
  g->dx = 2.0 * half_width / n;
  g->xs.resize(n);
  g->freqs.resize(n);
  const double dxi = std::numbers::pi / half_width;
  for (int j = 0; j < n; ++j) {
    g->xs[j] = -half_width + j * g->dx;
    const int m = (j < n / 2) ? j : j - n;
    g->freqs[j] = dxi * m;
  }
  return g;
}

WaveField make_field(Grid grid) {
  WaveField f;
  f.values.assign(static_cast<size_t>(grid->n), Complex{0.0, 0.0});
  f.grid = std::move(grid);
  return f;
}

WaveField gaussian_field(const Grid& grid, double amplitude, double width,
                         double center, double momentum) {
  if (!(width > 0.0)) {
    throw std::invalid_argument("gaussian_field: width must be positive");
  }
  WaveField f = make_field(grid);
  for (int j = 0; j < grid->n; ++j) {
    const double x = grid->xs[j];
    const double s = (x - center) / width;
    const double a = amplitude * std::exp(-0.5 * s * s);
    f.values[j] = a * std::exp(Complex{0.0, momentum * x});
  }
  return f;
}

bool same_grid(const GridSpec& a, const GridSpec& b) {
  return a.n == b.n && a.half_width == b.half_width;
}

void require_same_grid(const WaveField& a, const WaveField& b) {
  if (!a.grid || !b.grid || !same_grid(*a.grid, *b.grid)) {
    throw std::invalid_argument("fields live on different grids");
  }
}

bool all_finite(const WaveField& f) {
  for (const Complex& v : f.values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

double boundary_mass_fraction(const WaveField& f, double band) {
  const GridSpec& g = *f.grid;
  const double edge = (1.0 - band) * g.half_width;
  double outer = 0.0, total = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double m = std::norm(f.values[j]);
    total += m;
    if (std::abs(g.xs[j]) >= edge) outer += m;
  }
  return total > 0.0 ? outer / total : 0.0;
}

WaveField operator+(const WaveField& a, const WaveField& b) {
  require_same_grid(a, b);
  WaveField out = a;
  for (size_t j = 0; j < out.values.size(); ++j) out.values[j] += b.values[j];
  return out;
}

WaveField operator-(const WaveField& a, const WaveField& b) {
  require_same_grid(a, b);
  WaveField out = a;
  for (size_t j = 0; j < out.values.size(); ++j) out.values[j] -= b.values[j];
  return out;
}

WaveField operator*(Complex s, const WaveField& a) {
  WaveField out = a;
  for (Complex& v : out.values) v *= s;
  return out;
}

WaveField operator*(double s, const WaveField& a) {
  return Complex{s, 0.0} * a;
}

WaveField& operator+=(WaveField& a, const WaveField& b) {
  require_same_grid(a, b);
  for (size_t j = 0; j < a.values.size(); ++j) a.values[j] += b.values[j];
  return a;
}

WaveField& operator-=(WaveField& a, const WaveField& b) {
  require_same_grid(a, b);
  for (size_t j = 0; j < a.values.size(); ++j) a.values[j] -= b.values[j];
  return a;
}

}  // namespace deltanls
