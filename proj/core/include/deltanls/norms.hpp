#pragma once

#include "deltanls/grid.hpp"

namespace deltanls {

// Riemann quadrature with weight dx throughout (spectrally accurate for the
// smooth periodic data this code handles).
double l2_norm(const WaveField& f);
double sup_norm(const WaveField& f);
double lp_norm(const WaveField& f, double p);  // p >= 1 finite

// ||f||_{H^1} = sqrt( sum_k (1 + xi_k^2) * 2L * |c_k|^2 )
double h1_norm(const WaveField& f);

// Quadratic form of the point-interaction Hamiltonian:
//   (A f, f) = 1/2 int |f'|^2 dx + q |f(0)|^2,   q >= 0.
// Returns the form value itself (the squared H-"norm").
double form_norm_H(const WaveField& f, double q);

// dx * sum_j a_j conj(b_j)
Complex inner_l2(const WaveField& a, const WaveField& b);

double h1_distance(const WaveField& a, const WaveField& b);

// ( int s(t)^p dt )^{1/p} by composite trapezoid over the given stamps.
double mixed_time_norm(const std::vector<double>& times,
                       const std::vector<double>& space_norms, double p);

}  // namespace deltanls
