#include "deltanls/scattering.hpp"

#include <cmath>
#include <stdexcept>

#include "deltanls/norms.hpp"

namespace deltanls {

namespace {

// H^1 operator bound of e^{isH_q} combined with the chain-rule bound
// ||u|u|^a||_{H^1} <= (1+a) ||u||_inf^a ||u||_{H^1}; together they majorize
// the Duhamel increment of the pullback.
double majorant_constant(double q, double alpha) {
  return (1.0 + alpha) * std::sqrt(2.0 + q);
}

// trapezoid of sup^alpha between two stamps of the recorded scalars
double sup_alpha_integral(const Trajectory& traj, int k1, int k2, double alpha) {
  double s = 0.0;
  for (int k = k1; k < k2; ++k) {
    const double a = std::pow(traj.scalars[k].sup, alpha);
    const double b = std::pow(traj.scalars[k + 1].sup, alpha);
    s += 0.5 * (a + b) * (traj.times[k + 1] - traj.times[k]);
  }
  return s;
}

}  // namespace

std::vector<WaveField> inverse_linear_pullback(const Trajectory& traj, double q) {
  if (q < 0.0) throw std::invalid_argument("inverse_linear_pullback: q must be >= 0");
  const PropagatorMethod method = traj.matched_linear_method();
  std::vector<WaveField> w;
  w.reserve(traj.states.size());
  for (size_t k = 0; k < traj.states.size(); ++k) {
    w.push_back(linear_propagate(traj.states[k], q, -traj.times[k], method));
  }
  return w;
}

CauchyDefect cauchy_defect(const Trajectory& traj, double q, double t1,
                           double t2) {
  const PropagatorMethod method = traj.matched_linear_method();
  const int k1 = traj.snapshot_index(t1);
  const int k2 = traj.snapshot_index(t2);
  const WaveField w1 = linear_propagate(traj.states[k1], q, -t1, method);
  const WaveField w2 = linear_propagate(traj.states[k2], q, -t2, method);

  CauchyDefect d;
  d.t1 = t1;
  d.t2 = t2;
  d.defect = h1_distance(w1, w2);

  const int lo = std::min(k1, k2), hi = std::max(k1, k2);
  double h1_max = 0.0;
  for (int k = lo; k <= hi; ++k) h1_max = std::max(h1_max, traj.scalars[k].h1);
  d.majorant = majorant_constant(q, traj.params.alpha) * h1_max *
               sup_alpha_integral(traj, lo, hi, traj.params.alpha);
  return d;
}

ScatteringReport extract_scattering_state(const Trajectory& traj, double q,
                                          double tolerance,
                                          int residual_samples) {
  const PropagatorMethod method = traj.matched_linear_method();
  const size_t len = traj.times.size();
  if (len < 3) throw std::invalid_argument("extract_scattering_state: trajectory too short");

  ScatteringReport rep;
  rep.tolerance = tolerance;
  rep.horizon = traj.times.back();

  const std::vector<WaveField> w = inverse_linear_pullback(traj, q);
  for (size_t k = 0; k + 1 < len; ++k) {
    CauchyDefect d;
    d.t1 = traj.times[k];
    d.t2 = traj.times[k + 1];
    d.defect = h1_distance(w[k], w[k + 1]);
    double h1_max = std::max(traj.scalars[k].h1, traj.scalars[k + 1].h1);
    d.majorant = majorant_constant(q, traj.params.alpha) * h1_max *
                 sup_alpha_integral(traj, static_cast<int>(k), static_cast<int>(k) + 1,
                                    traj.params.alpha);
    rep.cauchy_pairs.push_back(d);
  }
  rep.converged = rep.cauchy_pairs.back().defect <= tolerance;
  if (!rep.converged) {
    warn("extract_scattering_state: pullback defects have not fallen below " +
         std::to_string(tolerance) + " within the window (last " +
         std::to_string(rep.cauchy_pairs.back().defect) + ")");
  }
  rep.phi_plus = w.back();

  // forward residual curve || e^{-itH_q} phi+ - u(t) ||_{H^1}
  const int samples = std::max(2, residual_samples);
  const size_t step = std::max<size_t>(1, (len - 1) / static_cast<size_t>(samples - 1));
  for (size_t k = 0; k < len; k += step) {
    const WaveField fwd = linear_propagate(rep.phi_plus, q, traj.times[k], method);
    rep.residuals.emplace_back(traj.times[k], h1_distance(fwd, traj.states[k]));
  }
  if (rep.residuals.back().first != traj.times.back()) {
    const WaveField fwd = linear_propagate(rep.phi_plus, q, traj.times.back(), method);
    rep.residuals.emplace_back(traj.times.back(), h1_distance(fwd, traj.states.back()));
  }

  // tail functional int_T^{tmax} ||u||_inf^alpha dt on a ladder of T
  for (size_t k = 0; k + 1 < len; k += step) {
    rep.tail_alpha.emplace_back(
        traj.times[k], sup_alpha_integral(traj, static_cast<int>(k),
                                          static_cast<int>(len) - 1, traj.params.alpha));
  }
  return rep;
}

WaveOperatorProbe wave_operator_probe(const WaveField& psi, double q,
                                      double alpha, double T0, double dt,
                                      int stride, double smallness_ratio,
                                      const PropagatorMethod& method) {
  if (!(T0 > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("wave_operator_probe: T0 and dt must be > 0");
  }
  NLSParams params;
  params.q = q;
  params.alpha = alpha;

  const int nsteps = std::max(1, static_cast<int>(std::llround(T0 / dt)));
  const double step = T0 / nsteps;
  // linear references live in the same discrete group the stepper uses
  const PropagatorMethod ref = method.kind == PropagatorKind::CrankNicolson
                                   ? cn_resolved(step / 2.0)
                                   : method;

  const WaveField at_T0 = linear_propagate(psi, q, T0, ref);
  const double sup_ratio = sup_norm(at_T0) / sup_norm(psi);
  if (sup_ratio > smallness_ratio) {
    throw std::runtime_error(
        "wave_operator_probe: linear flow not yet small at T0 (sup ratio " +
        std::to_string(sup_ratio) + ")");
  }

  WaveOperatorProbe probe;
  probe.data_at_zero = advance(at_T0, params, -step, nsteps, method);

  EvolveOptions opt;
  opt.t_final = T0;
  opt.dt = step;
  opt.stride = stride;
  opt.method = method;
  opt.boundary_threshold = 1e-3;
  probe.forward = evolve(probe.data_at_zero, params, opt);

  for (size_t k = 0; k < probe.forward.times.size(); ++k) {
    const double t = probe.forward.times[k];
    const WaveField lin = linear_propagate(psi, q, t, ref);
    const double d = h1_distance(probe.forward.states[k], lin);
    probe.forward_defect.emplace_back(t, d);
    if (t >= 0.5 * T0) probe.max_defect = std::max(probe.max_defect, d);
  }
  return probe;
}

}  // namespace deltanls
