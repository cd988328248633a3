#include "deltanls/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "deltanls/norms.hpp"
#include "deltanls/transforms.hpp"

namespace deltanls {

namespace {

// Degree-7 smoothstep on [0,1] and its derivatives; chi built from it is 1
// on [0,1], 0 on [2,inf) with a C^3 transition.
double smoothstep(double u) {
  return (((-20.0 * u + 70.0) * u - 84.0) * u + 35.0) * u * u * u * u;
}
double smoothstep_d1(double u) {
  return (((-140.0 * u + 420.0) * u - 420.0) * u + 140.0) * u * u * u;
}
double smoothstep_d2(double u) {
  return (((-840.0 * u + 2100.0) * u - 1680.0) * u + 420.0) * u * u;
}
double smoothstep_d3(double u) {
  return (((-4200.0 * u + 8400.0) * u - 5040.0) * u + 840.0) * u;
}
double smoothstep_d4(double u) {
  return ((-16800.0 * u + 25200.0) * u - 10080.0) * u + 840.0;
}

struct CutoffDerivs {
  double chi = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0, d4 = 0.0;
};

CutoffDerivs cutoff(double s) {
  CutoffDerivs c;
  if (s <= 1.0) {
    c.chi = 1.0;
  } else if (s < 2.0) {
    const double u = s - 1.0;
    c.chi = 1.0 - smoothstep(u);
    c.d1 = -smoothstep_d1(u);
    c.d2 = -smoothstep_d2(u);
    c.d3 = -smoothstep_d3(u);
    c.d4 = -smoothstep_d4(u);
  }
  return c;
}

}  // namespace

double cutoff_profile(double s) { return cutoff(s).chi; }

WeightSpec WeightSpec::pure_quadratic(const Grid& grid) {
  WeightSpec w;
  w.kind = Kind::PureQuadratic;
  const int n = grid->n;
  w.lambda.resize(n);
  w.dlambda.resize(n);
  w.d2lambda.assign(n, 2.0);
  w.d4lambda.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const double x = grid->xs[j];
    w.lambda[j] = x * x;
    w.dlambda[j] = 2.0 * x;
  }
  return w;
}

WeightSpec WeightSpec::quadratic_cutoff(const Grid& grid, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("quadratic_cutoff: R must be > 0");
  WeightSpec w;
  w.kind = Kind::QuadraticCutoff;
  w.R = R;
  const int n = grid->n;
  w.lambda.resize(n);
  w.dlambda.resize(n);
  w.d2lambda.resize(n);
  w.d4lambda.resize(n);
  for (int j = 0; j < n; ++j) {
    const double x = grid->xs[j];
    const double ax = std::abs(x);
    const CutoffDerivs c = cutoff(ax / R);
    const double R2 = R * R, R3 = R2 * R, R4 = R2 * R2;
    // lambda = y^2 chi(y/R) evaluated at y = |x|, mirrored by parity
    const double l = ax * ax * c.chi;
    const double l1 = 2.0 * ax * c.chi + ax * ax * c.d1 / R;
    const double l2 = 2.0 * c.chi + 4.0 * ax * c.d1 / R + ax * ax * c.d2 / R2;
    const double l4 = 12.0 * c.d2 / R2 + 8.0 * ax * c.d3 / R3 + ax * ax * c.d4 / R4;
    w.lambda[j] = l;
    w.dlambda[j] = (x < 0.0) ? -l1 : l1;
    w.d2lambda[j] = l2;
    w.d4lambda[j] = l4;
  }
  return w;
}

DecayFit dispersion_decay_fit(const WaveField& f, double q,
                              const std::vector<double>& t_grid,
                              const PropagatorMethod& method,
                              double boundary_threshold) {
  if (t_grid.size() < 2) {
    throw std::invalid_argument("dispersion_decay_fit: need several sample times");
  }
  double tmin = t_grid.front(), tmax = t_grid.front();
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("dispersion_decay_fit: times must be > 0");
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
  }
  if (tmax < 10.0 * tmin) {
    throw std::invalid_argument("dispersion_decay_fit: time grid must span a decade");
  }

  DecayFit fit;
  fit.times = t_grid;
  fit.sup_norms.resize(t_grid.size());
  for (size_t k = 0; k < t_grid.size(); ++k) {
    WaveField u = linear_propagate(f, q, t_grid[k], method);
    const double b = boundary_mass_fraction(u);
    if (b > boundary_threshold) {
      throw std::runtime_error("dispersion_decay_fit: boundary mass " + std::to_string(b) +
                               " at t = " + std::to_string(t_grid[k]) +
                               " (no-wrap horizon exceeded)");
    }
    fit.sup_norms[k] = sup_norm(u);
  }
  fit.fitted_slope = fit_loglog_slope(fit.times, fit.sup_norms, &fit.fit_residual);
  return fit;
}

double strichartz_spacetime_norm(const Trajectory& traj, double p, double r) {
  std::vector<double> lr(traj.states.size());
  for (size_t k = 0; k < traj.states.size(); ++k) lr[k] = lp_norm(traj.states[k], r);
  return mixed_time_norm(traj.times, lr, p);
}

double virial_rhs(const WaveField& u, const WeightSpec& w, const NLSParams& p,
                  double nonlinear_coupling) {
  const GridSpec& g = *u.grid;
  const WaveField du = spectral_derivative(u);
  double grad_term = 0.0, fourth_term = 0.0, nl_term = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double m2 = std::norm(u.values[j]);
    grad_term += w.d2lambda[j] * std::norm(du.values[j]);
    fourth_term += w.d4lambda[j] * m2;
    if (nonlinear_coupling != 0.0) {
      nl_term += w.d2lambda[j] * std::pow(m2, 0.5 * (p.alpha + 2.0));
    }
  }
  grad_term *= g.dx;
  fourth_term *= g.dx;
  nl_term *= g.dx;
  const double delta_term =
      p.q * w.d2lambda[g.n / 2] * std::norm(u.at_origin());
  return grad_term - 0.25 * fourth_term + delta_term +
         nonlinear_coupling * p.alpha / (p.alpha + 2.0) * nl_term;
}

VirialSeries virial_series(const Trajectory& traj, const WeightSpec& w,
                           double nonlinear_coupling) {
  const size_t len = traj.times.size();
  if (len < 3) throw std::invalid_argument("virial_series: need at least 3 snapshots");
  const double delta = traj.times[1] - traj.times[0];
  for (size_t k = 0; k + 1 < len; ++k) {
    if (std::abs(traj.times[k + 1] - traj.times[k] - delta) > 1e-9 * std::max(1.0, delta)) {
      throw std::invalid_argument("virial_series: time stamps must be uniform");
    }
  }

  VirialSeries vs;
  vs.times = traj.times;
  vs.M.resize(len);
  vs.M_dot.resize(len);
  vs.rhs.resize(len);
  vs.residual.assign(len, 0.0);
  vs.consistency.assign(len, 0.0);

  const GridSpec& g = *traj.grid;
  for (size_t k = 0; k < len; ++k) {
    const WaveField& u = traj.states[k];
    const WaveField du = spectral_derivative(u);
    double m = 0.0, mdot = 0.0;
    for (int j = 0; j < g.n; ++j) {
      m += w.lambda[j] * std::norm(u.values[j]);
      mdot += w.dlambda[j] * std::imag(du.values[j] * std::conj(u.values[j]));
    }
    vs.M[k] = m * g.dx;
    vs.M_dot[k] = mdot * g.dx;
    vs.rhs[k] = virial_rhs(u, w, traj.params, nonlinear_coupling);
  }
  for (size_t k = 1; k + 1 < len; ++k) {
    const double dmdot = (vs.M_dot[k + 1] - vs.M_dot[k - 1]) / (2.0 * delta);
    const double d2m = (vs.M[k + 1] - 2.0 * vs.M[k] + vs.M[k - 1]) / (delta * delta);
    vs.residual[k] = std::abs(dmdot - vs.rhs[k]);
    vs.consistency[k] = std::abs(d2m - dmdot);
  }
  return vs;
}

RigidityBound rigidity_lower_bound(const WaveField& u, double R,
                                   const NLSParams& p, double C) {
  const GridSpec& g = *u.grid;
  if (!(R > 0.0) || R >= g.half_width) {
    throw std::invalid_argument("rigidity_lower_bound: need 0 < R < half_width");
  }
  const WaveField du = spectral_derivative(u);
  const double ap2 = p.alpha + 2.0;
  double interior = 0.0, tail = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double ax = std::abs(g.xs[j]);
    const double m2 = std::norm(u.values[j]);
    const double d2 = std::norm(du.values[j]);
    const double nl = std::pow(m2, 0.5 * ap2);
    if (ax < R) {
      interior += d2 + p.alpha / ap2 * nl;
    } else if (ax > R) {
      tail += m2 + d2 + nl;
    }
  }
  RigidityBound b;
  b.interior = interior * g.dx;
  b.tail = tail * g.dx;
  b.bound = b.interior - C * b.tail;
  return b;
}

double translation_agreement(const WaveField& psi, double x0, double q,
                             double t, const PropagatorMethod& method) {
  WaveField shifted = translate(psi, x0);
  const double b = boundary_mass_fraction(shifted);
  if (b > 1e-8) {
    throw std::runtime_error("translation_agreement: shifted data touches the boundary "
                             "(outer-band mass " + std::to_string(b) + ")");
  }
  const WaveField with_delta = linear_propagate(shifted, q, t, method);
  const WaveField free_only = free_propagate(shifted, t);
  return h1_distance(with_delta, free_only);
}

BandSplit band_split(const WaveField& f, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("band_split: R must be > 0");
  const GridSpec& g = *f.grid;
  std::vector<Complex> m(static_cast<size_t>(g.n));
  for (int k = 0; k < g.n; ++k) {
    m[k] = Complex{cutoff(std::abs(g.freqs[k]) / R).chi, 0.0};
  }
  BandSplit out;
  out.low = apply_multiplier(f, m);
  out.high = f - out.low;  // exact complement by construction
  return out;
}

double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y, double* residual) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_loglog_slope: need matching arrays, size >= 2");
  }
  const size_t n = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t k = 0; k < n; ++k) {
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  if (residual) {
    double rss = 0.0;
    for (size_t k = 0; k < n; ++k) {
      const double r = std::log(y[k]) - (intercept + slope * std::log(x[k]));
      rss += r * r;
    }
    *residual = std::sqrt(rss / n);
  }
  return slope;
}

}  // namespace deltanls
