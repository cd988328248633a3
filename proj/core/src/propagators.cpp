#include "deltanls/propagators.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "deltanls/fft.hpp"
#include "deltanls/transforms.hpp"

namespace deltanls {

namespace {

// (f restricted to x <= 0) * rho_q on the closed half line, backed by the
// backward trapezoid sweep plus Euler-Maclaurin endpoint corrections. The
// corrections use (d/dx - q)^k f at the moving endpoint and at the x = 0
// edge, with finite-difference stencils that never cross the edge, so a
// derivative jump of the full field at x = 0 cannot contaminate them.
// Only samples f[0..n/2] are read; g vanishes on x > 0 and g(0) = 0.
std::vector<Complex> half_line_convolve(const std::vector<Complex>& f,
                                        const GridSpec& g, double q) {
  const int n = g.n;
  const int i0 = n / 2;
  const double h = g.dx;
  const double a = std::exp(-q * h);

  std::vector<Complex> out(static_cast<size_t>(n), Complex{0.0, 0.0});
  for (int i = i0 - 1; i >= 0; --i) {
    out[i] = a * out[i + 1] - (q * h / 2.0) * (f[i] + a * f[i + 1]);
  }

  // derivatives of f on the half line (index i0 is the edge)
  std::vector<Complex> d1(static_cast<size_t>(i0 + 1));
  std::vector<Complex> d3(static_cast<size_t>(i0 + 1));
  auto at = [&](int i) -> Complex {
    return (i >= 0 && i <= i0) ? f[i] : Complex{0.0, 0.0};
  };
  const double q2 = q * q, q3 = q2 * q;
  for (int i = 0; i <= i0; ++i) {
    Complex fp, fpp, fppp;
    if (i <= i0 - 2) {
      fp = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * h);
      fpp = (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (h * h);
      fppp = (at(i + 2) - 2.0 * at(i + 1) + 2.0 * at(i - 1) - at(i - 2)) / (2.0 * h * h * h);
    } else {
      // backward one-sided stencils for the two nodes nearest the edge
      fp = (25.0 * at(i) - 48.0 * at(i - 1) + 36.0 * at(i - 2) - 16.0 * at(i - 3) +
            3.0 * at(i - 4)) /
           (12.0 * h);
      fpp = (2.0 * at(i) - 5.0 * at(i - 1) + 4.0 * at(i - 2) - at(i - 3)) / (h * h);
      fppp = (5.0 * at(i) - 18.0 * at(i - 1) + 24.0 * at(i - 2) - 14.0 * at(i - 3) +
              3.0 * at(i - 4)) /
             (2.0 * h * h * h);
    }
    d1[i] = fp - q * at(i);
    d3[i] = fppp - 3.0 * q * fpp + 3.0 * q2 * fp - q3 * at(i);
  }

  const double c2 = q * h * h / 12.0;
  const double c4 = q * h * h * h * h / 720.0;
  double decay = 1.0;  // e^{q x_i} relative to the edge
  for (int i = i0 - 1; i >= 0; --i) {
    decay *= a;
    out[i] += c2 * (decay * d1[i0] - d1[i]) - c4 * (decay * d3[i0] - d3[i]);
  }
  return out;
}

// result(x) = base(x) + corr(x) 1_{x>=0} + corr(-x) 1_{x<=0}, the node at
// x = 0 taken from the first branch only (corr is continuous there). The
// x = -L node mirrors to +L, where the correction is negligible by the
// no-wrap contract; the periodic sample there would instead pick up the
// kernel tail e^{-qL}, so that node receives no mirror contribution.
WaveField assemble_with_mirror(const WaveField& base, const WaveField& corr) {
  const int n = base.grid->n;
  const int i0 = n / 2;
  WaveField out = base;
  for (int i = i0; i < n; ++i) out.values[i] += corr.values[i];
  for (int i = 1; i < i0; ++i) out.values[i] += corr.values[n - i];
  return out;
}

double right_mass_fraction(const WaveField& f) {
  const int n = f.grid->n;
  const int i0 = n / 2;
  double right = 0.0, total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double m = std::norm(f.values[i]);
    total += m;
    if (i >= i0 + 2) right += m;  // strictly beyond x = dx
  }
  return total > 0.0 ? right / total : 0.0;
}

}  // namespace

namespace {

// Steppers and pullbacks revisit the same evolution times thousands of
// times; the phase tables are worth keeping.
struct FreeMultiplierKey {
  int n;
  double half_width;
  double t;
  bool operator<(const FreeMultiplierKey& o) const {
    if (n != o.n) return n < o.n;
    if (half_width != o.half_width) return half_width < o.half_width;
    return t < o.t;
  }
};

std::mutex g_free_mutex;
std::map<FreeMultiplierKey, std::shared_ptr<const std::vector<Complex>>>
    g_free_cache;

std::shared_ptr<const std::vector<Complex>> free_multiplier(const GridSpec& g,
                                                            double t) {
  const FreeMultiplierKey key{g.n, g.half_width, t};
  {
    std::lock_guard<std::mutex> lock(g_free_mutex);
    auto it = g_free_cache.find(key);
    if (it != g_free_cache.end()) return it->second;
  }
  auto m = std::make_shared<std::vector<Complex>>(static_cast<size_t>(g.n));
  for (int k = 0; k < g.n; ++k) {
    const double xi = g.freqs[k];
    (*m)[k] = std::exp(Complex{0.0, -0.5 * t * xi * xi});
  }
  std::lock_guard<std::mutex> lock(g_free_mutex);
  if (g_free_cache.size() > 256) g_free_cache.clear();
  auto [it, inserted] = g_free_cache.emplace(key, std::move(m));
  return it->second;
}

}  // namespace

WaveField free_propagate(const WaveField& f, double t) {
  if (t == 0.0) return f;
  return apply_multiplier(f, *free_multiplier(*f.grid, t));
}

WaveField exp_kernel_convolve(const WaveField& f, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("exp_kernel_convolve: q must be > 0");
  const GridSpec& g = *f.grid;
  const int n = g.n;
  const double h = g.dx;
  const double a = std::exp(-q * h);
  WaveField out = make_field(f.grid);
  Complex acc = -(q * h / 2.0) * f.values[n - 1];  // zero tail beyond the box
  out.values[n - 1] = acc;
  for (int i = n - 2; i >= 0; --i) {
    acc = a * acc - (q * h / 2.0) * (f.values[i] + a * f.values[i + 1]);
    out.values[i] = acc;
  }
  return out;
}

WaveField delta_propagate_left(const WaveField& f, double q, double t) {
  if (!(q > 0.0)) throw std::invalid_argument("delta_propagate_left: q must be > 0");
  const double right = right_mass_fraction(f);
  if (right > 1e-10) {
    throw std::invalid_argument(
        "delta_propagate_left: data not supported in x <= 0 (relative mass " +
        std::to_string(right) + " beyond x = dx)");
  }
  WaveField corr;
  corr.grid = f.grid;
  corr.values = half_line_convolve(f.values, *f.grid, q);
  return assemble_with_mirror(free_propagate(f, t), free_propagate(corr, t));
}

WaveField delta_propagate(const WaveField& f, double q, double t) {
  if (q < 0.0) {
    throw std::invalid_argument("delta_propagate: exact kernel requires q >= 0");
  }
  if (q == 0.0) return free_propagate(f, t);

  const GridSpec& g = *f.grid;
  const int n = g.n;
  const int i0 = n / 2;

  // Left part keeps the x = 0 sample; the reflected right part reuses it as
  // the closed-edge value of the restriction to x >= 0.
  std::vector<Complex> left(static_cast<size_t>(n), Complex{0.0, 0.0});
  std::vector<Complex> right_reflected(static_cast<size_t>(n), Complex{0.0, 0.0});
  for (int i = 0; i <= i0; ++i) left[i] = f.values[i];
  for (int j = 0; j <= i0; ++j) right_reflected[j] = f.values[(n - j) % n];

  std::vector<Complex> gl = half_line_convolve(left, g, q);
  std::vector<Complex> gr = half_line_convolve(right_reflected, g, q);
  WaveField corr;
  corr.grid = f.grid;
  corr.values.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) corr.values[i] = gl[i] + gr[i];

  return assemble_with_mirror(free_propagate(f, t), free_propagate(corr, t));
}

namespace {

// Cayley factorization of (I + i theta H) for the hard-wall stencil with the
// q/h lumped coupling; cached across calls since steppers and pullbacks
// reuse the same substep size many times.
struct CayleyFactors {
  Complex aoff;
  std::vector<Complex> bm;       // rows of I - i theta H
  std::vector<Complex> cp;      // Thomas modified super-diagonal
  std::vector<Complex> inv_den;
};

struct CayleyKey {
  int n;
  double q;
  double theta;
  bool operator<(const CayleyKey& o) const {
    if (n != o.n) return n < o.n;
    if (q != o.q) return q < o.q;
    return theta < o.theta;
  }
};

std::mutex g_cayley_mutex;
std::map<CayleyKey, std::shared_ptr<const CayleyFactors>> g_cayley_cache;

std::shared_ptr<const CayleyFactors> cayley_factors(const GridSpec& g, double q,
                                                    double theta) {
  const CayleyKey key{g.n, q, theta};
  {
    std::lock_guard<std::mutex> lock(g_cayley_mutex);
    auto it = g_cayley_cache.find(key);
    if (it != g_cayley_cache.end()) return it->second;
  }
  const int n = g.n;
  const int i0 = n / 2;
  const double h = g.dx;
  const Complex itheta{0.0, theta};
  auto fac = std::make_shared<CayleyFactors>();
  fac->aoff = itheta * (-0.5 / (h * h));
  fac->bm.resize(static_cast<size_t>(n));
  fac->cp.resize(static_cast<size_t>(n));
  fac->inv_den.resize(static_cast<size_t>(n));
  std::vector<Complex> b(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double diag = 1.0 / (h * h) + (i == i0 ? q / h : 0.0);
    b[i] = 1.0 + itheta * diag;
    fac->bm[i] = 1.0 - itheta * diag;
  }
  fac->inv_den[0] = 1.0 / b[0];
  fac->cp[0] = fac->aoff * fac->inv_den[0];
  for (int i = 1; i < n; ++i) {
    fac->inv_den[i] = 1.0 / (b[i] - fac->aoff * fac->cp[i - 1]);
    fac->cp[i] = fac->aoff * fac->inv_den[i];
  }
  std::lock_guard<std::mutex> lock(g_cayley_mutex);
  auto [it, inserted] = g_cayley_cache.emplace(key, std::move(fac));
  return it->second;
}

}  // namespace

WaveField cn_propagate(const WaveField& f, double q, double t, int sub_steps) {
  if (sub_steps < 1) throw std::invalid_argument("cn_propagate: sub_steps must be >= 1");
  if (t == 0.0) return f;

  const GridSpec& g = *f.grid;
  const int n = g.n;
  const double dt = t / sub_steps;
  const auto fac = cayley_factors(g, q, dt / 2.0);
  const Complex aoff = fac->aoff;
  const Complex* bm = fac->bm.data();
  const Complex* cp = fac->cp.data();
  const Complex* inv_den = fac->inv_den.data();

  std::vector<Complex> u = f.values;
  std::vector<Complex> w(static_cast<size_t>(n));
  for (int s = 0; s < sub_steps; ++s) {
    // forward elimination fused with the right-hand side assembly
    Complex prev_u = u[0];
    Complex r0 = bm[0] * u[0] - aoff * u[1];
    w[0] = r0 * inv_den[0];
    for (int i = 1; i < n; ++i) {
      const Complex nb = (i < n - 1) ? prev_u + u[i + 1] : prev_u;
      const Complex ri = bm[i] * u[i] - aoff * nb;
      prev_u = u[i];
      w[i] = (ri - aoff * w[i - 1]) * inv_den[i];
    }
    u[n - 1] = w[n - 1];
    for (int i = n - 2; i >= 0; --i) u[i] = w[i] - cp[i] * u[i + 1];
  }

  WaveField out;
  out.grid = f.grid;
  out.values = std::move(u);
  return out;
}

WaveField linear_propagate(const WaveField& f, double q, double t,
                           const PropagatorMethod& method) {
  switch (method.kind) {
    case PropagatorKind::ExactKernel:
      return q == 0.0 ? free_propagate(f, t) : delta_propagate(f, q, t);
    case PropagatorKind::CrankNicolson: {
      int sub = method.sub_steps;
      if (method.dt_resolution > 0.0) {
        sub = std::max(1, static_cast<int>(std::ceil(std::abs(t) / method.dt_resolution -
                                                     1e-9)));
      }
      return cn_propagate(f, q, t, sub);
    }
  }
  throw std::logic_error("linear_propagate: unknown method");
}

}  // namespace deltanls
