#pragma once

#include "deltanls/nls.hpp"

namespace deltanls {

// Virial weight lambda with sampled derivatives. Either lambda = x^2 on the
// whole box, or x^2 * chi(|x|/R) with a degree-7 smoothstep cutoff so that
// lambda = x^2 on |x| < R and 0 on |x| > 2R. lambda'(0) = 0 exactly.
struct WeightSpec {
  enum class Kind { PureQuadratic, QuadraticCutoff };
  Kind kind = Kind::PureQuadratic;
  double R = 0.0;
  std::vector<double> lambda, dlambda, d2lambda, d4lambda;

  static WeightSpec pure_quadratic(const Grid& grid);
  static WeightSpec quadratic_cutoff(const Grid& grid, double R);
};

struct DecayFit {
  std::vector<double> times;
  std::vector<double> sup_norms;
  double fitted_slope = 0.0;
  double fit_residual = 0.0;  // RMS residual of the log-log fit
};

// Propagates f linearly to each t in t_grid and fits the log-log slope of
// the sup norm. t_grid must span at least a decade; aborts if the outer-band
// mass exceeds boundary_threshold at any sample time.
DecayFit dispersion_decay_fit(const WaveField& f, double q,
                              const std::vector<double>& t_grid,
                              const PropagatorMethod& method = {},
                              double boundary_threshold = 1e-8);

// ( int ||u(t)||_{L^r}^p dt )^{1/p} over the trajectory window, composite
// trapezoid in t.
double strichartz_spacetime_norm(const Trajectory& traj, double p, double r);

// Right side of the virial identity:
//   int l'' |u'|^2 - 1/4 int l'''' |u|^2 + q l''(0) |u(0)|^2
//   + coupling * alpha/(alpha+2) int l'' |u|^{alpha+2}.
// coupling = 0 evaluates the linear-flow identity.
double virial_rhs(const WaveField& u, const WeightSpec& w, const NLSParams& p,
                  double nonlinear_coupling = 1.0);

struct VirialSeries {
  std::vector<double> times;
  std::vector<double> M;        // int lambda |u|^2
  std::vector<double> M_dot;    // Im int lambda' u' conj(u)
  std::vector<double> rhs;
  std::vector<double> residual;     // |centered d/dt M_dot - rhs|, 0 at ends
  std::vector<double> consistency;  // |centered d2 M - centered d M_dot|, 0 at ends
};
VirialSeries virial_series(const Trajectory& traj, const WeightSpec& w,
                           double nonlinear_coupling = 1.0);

struct RigidityBound {
  double interior = 0.0;  // int_{|x|<R} |u'|^2 + a/(a+2) int_{|x|<R} |u|^{a+2}
  double tail = 0.0;      // int_{|x|>R} (|u|^2 + |u'|^2 + |u|^{a+2})
  double bound = 0.0;     // interior - C * tail
};
RigidityBound rigidity_lower_bound(const WaveField& u, double R,
                                   const NLSParams& p, double C);

// || exp(-itH_q) tau_{x0} psi - exp(-itH_0) tau_{x0} psi ||_{H^1}
double translation_agreement(const WaveField& psi, double x0, double q,
                             double t,
                             const PropagatorMethod& method = {});

// Smooth frequency split at scale R: low = chi(|xi|/R) part with chi = 1 on
// |s|<1 and 0 on |s|>2, high = f - low (exact complement).
struct BandSplit {
  WaveField low, high;
};
BandSplit band_split(const WaveField& f, double R);

// Least-squares slope of log y against log x; optional RMS residual out.
double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y,
                        double* residual = nullptr);

// Shared smooth cutoff: 1 on s <= 1, 0 on s >= 2, degree-7 smoothstep in
// between (used by the virial weight, the band split, and the greedy
// profile window).
double cutoff_profile(double s);

}  // namespace deltanls
