#pragma once

#include "deltanls/grid.hpp"

namespace deltanls {

FourierField to_fourier(const WaveField& f);
WaveField from_fourier(const FourierField& F);

// Multiply coefficient k by m[k] and transform back; the workhorse for every
// Fourier multiplier (propagators, shifts, band cutoffs).
WaveField apply_multiplier(const WaveField& f, const std::vector<Complex>& m);

// d/dx via i*xi multiplier; the lone Nyquist mode is dropped.
WaveField spectral_derivative(const WaveField& f);

// tau_{x0} f(y) = f(y - x0). Integer multiples of dx rotate samples exactly;
// fractional shifts go through a phase multiplier. Emits a warning when the
// mass wrapping across the boundary exceeds 1e-8 of the total.
WaveField translate(const WaveField& f, double x0);

// f(x) -> f(-x); index 0 (the x = -L node) is its own mirror under wrap.
WaveField reflect(const WaveField& f);

}  // namespace deltanls
