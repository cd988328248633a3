#pragma once

#include "deltanls/grid.hpp"

namespace deltanls {

enum class PropagatorKind { ExactKernel, CrankNicolson };

struct PropagatorMethod {
  PropagatorKind kind = PropagatorKind::ExactKernel;
  int sub_steps = 1;  // Crank-Nicolson substeps per application, >= 1
  // When positive, each Crank-Nicolson application uses
  // ceil(|t| / dt_resolution) substeps instead of the fixed count, so a
  // pullback by -t inverts a dt-stepped evolution's linear factor exactly.
  double dt_resolution = 0.0;
};

// Crank-Nicolson factor whose substep count tracks the given time step.
inline PropagatorMethod cn_resolved(double dt) {
  return PropagatorMethod{PropagatorKind::CrankNicolson, 1, dt};
}

// exp(-i t H_0) with H_0 = -1/2 d^2/dx^2, as the multiplier exp(-i t xi^2 / 2).
// Exactly unitary in the discrete L^2 for any t.
WaveField free_propagate(const WaveField& f, double t);

// f * rho_q with rho_q(x) = -q e^{q x} 1_{x<=0}, q > 0, via the one-sided
// backward sweep g_i = e^{-q dx} g_{i+1} - (q dx / 2)(f_i + e^{-q dx} f_{i+1})
// over the whole grid (trapezoid cells, zero tail beyond the right edge).
WaveField exp_kernel_convolve(const WaveField& f, double q);

// exp(-i t H_q) for data supported in x <= 0 (mass at x > dx must be below
// 1e-10 of the total), assembled from the closed form
//   e^{-itH_q} f = e^{-itH_0} f + [e^{-itH_0}(f*rho_q)](x)  1_{x>=0}
//                              + [e^{-itH_0}(f*rho_q)](-x) 1_{x<=0},
// with the x = 0 node assigned to the first indicator branch only.
WaveField delta_propagate_left(const WaveField& f, double q, double t);

// exp(-i t H_q) for arbitrary data: split at x = 0 (node goes to the left
// part), propagate the left part directly and the right part conjugated by
// reflection, and sum. q == 0 falls back to free_propagate; q < 0 is
// rejected on this path.
WaveField delta_propagate(const WaveField& f, double q, double t);

// Crank-Nicolson oracle: H_q discretized with the second-order stencil plus
// a q/dx lumped coupling on the x = 0 row (the derivative-jump condition
// f'(0+) - f'(0-) = 2 q f(0) to second order), advanced by the Cayley
// transform (I + i dt/2 H) u+ = (I - i dt/2 H) u- with dt = t / sub_steps.
// Exactly unitary; accepts q of any sign.
WaveField cn_propagate(const WaveField& f, double q, double t, int sub_steps);

WaveField linear_propagate(const WaveField& f, double q, double t,
                           const PropagatorMethod& method);

}  // namespace deltanls
