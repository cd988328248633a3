#pragma once

#include "deltanls/diagnostics.hpp"

namespace deltanls {

struct CauchyDefect {
  double t1 = 0.0, t2 = 0.0;
  double defect = 0.0;    // || w(t1) - w(t2) ||_{H^1} for w(t) = e^{itH_q} u(t)
  double majorant = 0.0;  // C ||u||_{L^inf H^1} int_{t1}^{t2} ||u||_inf^alpha
};

struct ScatteringReport {
  WaveField phi_plus;
  std::vector<CauchyDefect> cauchy_pairs;  // consecutive-stamp defects
  std::vector<std::pair<double, double>> residuals;   // (t, ||e^{-itH}phi+ - u(t)||_{H1})
  std::vector<std::pair<double, double>> tail_alpha;  // (T, int_T^{tmax} ||u||_inf^a dt)
  bool converged = false;
  double horizon = 0.0;
  double tolerance = 0.0;
};

// w(t_k) = e^{+i t_k H_q} u(t_k), realized by propagation with time -t_k
// through the trajectory's matched linear group (exact kernel for exact
// kernel runs, per-substep Cayley inverses for Crank-Nicolson runs).
std::vector<WaveField> inverse_linear_pullback(const Trajectory& traj, double q);

CauchyDefect cauchy_defect(const Trajectory& traj, double q, double t1,
                           double t2);

// phi+ := w(t_max); converged iff the consecutive pullback defects have
// fallen below `tolerance` by the end of the window. residual_samples caps
// the number of stamps at which the forward residual curve is evaluated.
ScatteringReport extract_scattering_state(const Trajectory& traj, double q,
                                          double tolerance,
                                          int residual_samples = 12);

struct WaveOperatorProbe {
  WaveField data_at_zero;
  std::vector<std::pair<double, double>> forward_defect;  // (t, H1 defect)
  double max_defect = 0.0;  // max over t in [T0/2, T0]
  Trajectory forward;       // the re-run forward trajectory on [0, T0]
};

// Prescribes u(T0) = e^{-i T0 H_q} psi, runs the nonlinear flow back to 0,
// then forward again, reporting || u(t) - e^{-itH_q} psi ||_{H^1}. Requires
// sup|e^{-iT0 H_q} psi| <= smallness_ratio * sup|psi| at the start time.
WaveOperatorProbe wave_operator_probe(const WaveField& psi, double q,
                                      double alpha, double T0, double dt,
                                      int stride = 50,
                                      double smallness_ratio = 0.35,
                                      const PropagatorMethod& method = {});

}  // namespace deltanls
