#pragma once

#include "deltanls/propagators.hpp"

namespace deltanls {

struct NLSParams {
  double q = 0.0;      // delta strength; the nonlinear flow requires q >= 0
  double alpha = 5.0;  // nonlinearity power, > 0

  // Scattering certification applies for alpha > 4; smaller powers run with
  // an out-of-regime flag.
  bool scattering_regime() const { return alpha > 4.0; }
};

// r = alpha + 2, p = 2 alpha (alpha+2) / (alpha+4),
// q_dual = 2 alpha (alpha+2) / (alpha^2 - alpha - 4), plus Hoelder duals.
// Defined for alpha > 4 only.
struct StrichartzExponents {
  double r = 0.0;
  double p = 0.0;
  double q_dual = 0.0;
  double r_prime = 0.0;
  double q_dual_prime = 0.0;
};
StrichartzExponents strichartz_exponents(double alpha);

struct ScalarRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double sup = 0.0;
  double h1 = 0.0;
  double u0sq = 0.0;
};

struct Trajectory {
  NLSParams params;
  Grid grid;
  std::vector<double> times;       // strictly increasing
  std::vector<WaveField> states;   // one per stamp
  std::vector<ScalarRecord> scalars;
  double mass_drift = 0.0;         // max relative deviation from the t=0 mass
  double mass_tolerance = 0.0;
  double dt = 0.0;                 // stepper dt (0 for directly sampled flows)
  PropagatorMethod method;

  int snapshot_index(double t) const;  // throws if t is not a stamp

  // Linear group consistent with how this trajectory was produced: a
  // Crank-Nicolson stepped run is pulled back by the same Cayley substeps
  // (exact inverses), everything else by the closed-form kernel.
  PropagatorMethod matched_linear_method() const;
};

double mass(const WaveField& u);

// E(u) = 1/4 int |u_x|^2 + (q/2) |u(0)|^2 + (alpha+2)^{-1} int |u|^{alpha+2}
//      = 1/2 form_norm_H(u, q) + (alpha+2)^{-1} lp_norm(u, alpha+2)^{alpha+2}
double energy(const WaveField& u, const NLSParams& p);

// Exact flow of i u_t = u |u|^alpha: u -> u exp(-i dt |u|^alpha).
// Pointwise modulus preserved exactly.
WaveField nonlinear_phase_step(const WaveField& u, double dt, double alpha);

// Symmetric composition: half linear, full nonlinear phase, half linear.
WaveField strang_step(const WaveField& u, double dt, const NLSParams& p,
                      const PropagatorMethod& method);

struct EvolveOptions {
  double t_final = 1.0;
  double dt = 1e-3;
  int stride = 1;  // record every `stride` steps (t=0 and t_final always)
  PropagatorMethod method;
  double boundary_threshold = 1e-8;  // abort above this outer-band mass
  double mass_tolerance = 1e-6;      // abort above this relative mass drift
  bool fuse_linear_halves = true;    // merge adjacent half steps between records
};

Trajectory evolve(const WaveField& phi, const NLSParams& p,
                  const EvolveOptions& opt);

// Raw stepping without snapshots; dt may be negative (reverse flow).
WaveField advance(const WaveField& u, const NLSParams& p, double dt, int steps,
                  const PropagatorMethod& method);

// Linear group sampled at the given times; no splitting error. alpha only
// labels the trajectory (it enters the recorded energy functional).
Trajectory linear_trajectory(const WaveField& phi, double q,
                             const std::vector<double>& times,
                             const PropagatorMethod& method = {},
                             double alpha = 5.0);

struct PerturbationReport {
  double defect_strichartz = 0.0;  // finite-horizon L^p L^r norm of u - v
  double eps = 0.0;                // finite-horizon L^p L^r of exp(-itH_q) phi0
};
PerturbationReport perturbation_probe(const WaveField& phi,
                                      const WaveField& phi0,
                                      const NLSParams& p, double horizon,
                                      double dt,
                                      const PropagatorMethod& method = {});

// Step-doubling self test: compares dt against dt/2 against dt/4 at time t.
// ratio ~ 4 certifies the second-order one-step map.
struct StepRefinementReport {
  double coarse_err = 0.0;
  double fine_err = 0.0;
  double ratio = 0.0;
};
StepRefinementReport strang_self_consistency(const WaveField& phi,
                                             const NLSParams& p, double t,
                                             double dt,
                                             const PropagatorMethod& method);

}  // namespace deltanls
