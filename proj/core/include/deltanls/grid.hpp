#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace deltanls {

using Complex = std::complex<double>;

// Uniform periodic grid on [-L, L). Node j sits at x_j = -L + j*dx with
// dx = 2L/n, so x = 0 is exactly the node j = n/2. freqs holds the angular
// frequency lattice in FFT index order: xi_k = (pi/L)*k for k < n/2 and
// (pi/L)*(k - n) for k >= n/2; freqs[0] = 0, the Nyquist mode sits at k = n/2.
struct GridSpec {
  int n = 0;
  double half_width = 0.0;
  double dx = 0.0;
  std::vector<double> xs;
  std::vector<double> freqs;

  int origin_index() const { return n / 2; }
  double nyquist_freq() const { return -freqs[n / 2]; }
};

using Grid = std::shared_ptr<const GridSpec>;

// n must be a power of two >= 16; half_width > 0.
Grid make_grid(int n, double half_width);

struct WaveField {
  Grid grid;
  std::vector<Complex> values;

  Complex at_origin() const { return values[static_cast<size_t>(grid->n / 2)]; }
};

// Coefficients c_k = (1/n) sum_j f_j exp(-2 pi i j k / n). With this
// normalization Parseval reads dx * sum_j |f_j|^2 = 2L * sum_k |c_k|^2.
struct FourierField {
  Grid grid;
  std::vector<Complex> coefficients;
};

WaveField make_field(Grid grid);

// amplitude * exp(-(x-center)^2 / (2 width^2)) * exp(i momentum x)
WaveField gaussian_field(const Grid& grid, double amplitude, double width,
                         double center, double momentum = 0.0);

bool same_grid(const GridSpec& a, const GridSpec& b);
void require_same_grid(const WaveField& a, const WaveField& b);
bool all_finite(const WaveField& f);

// Relative mass in the outer `band` fraction of the box on each side.
double boundary_mass_fraction(const WaveField& f, double band = 0.05);

WaveField operator+(const WaveField& a, const WaveField& b);
WaveField operator-(const WaveField& a, const WaveField& b);
WaveField operator*(Complex s, const WaveField& a);
WaveField operator*(double s, const WaveField& a);
WaveField& operator+=(WaveField& a, const WaveField& b);
WaveField& operator-=(WaveField& a, const WaveField& b);

// Non-fatal diagnostics (wrap-around mass, smallness checks) go through a
// process-wide handler so the CLI can count them or promote them to failures.
using WarningHandler = void (*)(const std::string&);
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace deltanls
