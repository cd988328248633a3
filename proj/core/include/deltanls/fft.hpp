#pragma once

#include "deltanls/grid.hpp"

namespace deltanls {

// Unnormalized DFTs in the FFTW sign convention:
//   forward:  out_k = sum_j in_j exp(-2 pi i j k / n)
//   inverse:  out_j = sum_k in_k exp(+2 pi i j k / n)
// Plans are cached per size behind a lock; execution is thread safe and
// in==out is allowed.
void dft_forward(int n, const Complex* in, Complex* out);
void dft_inverse(int n, const Complex* in, Complex* out);

}  // namespace deltanls
