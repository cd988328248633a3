#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "deltanls/norms.hpp"
#include "deltanls/propagators.hpp"
#include "deltanls/transforms.hpp"
#include "oracles.hpp"

using namespace deltanls;

namespace {

Grid desk_grid() { return make_grid(4096, 40.0); }

double rel_l2_drift(const WaveField& before, const WaveField& after) {
  return std::abs(l2_norm(after) - l2_norm(before)) / l2_norm(before);
}

}  // namespace

TEST_CASE("free propagator closed form") {
  const Grid g = desk_grid();
  const WaveField f = gaussian_field(g, 1.0, 1.0, 0.0);

  SUBCASE("identity at t = 0") {
    const WaveField u = free_propagate(f, 0.0);
    for (int j = 0; j < g->n; ++j) {
      CHECK(std::abs(u.values[j] - f.values[j]) < 1e-14);
    }
  }

  SUBCASE("Gaussian solution at t = 1") {
    const WaveField u = free_propagate(f, 1.0);
    double err = 0.0;
    for (int j = 0; j < g->n; ++j) {
      err = std::max(err, std::abs(u.values[j] - oracles::free_gaussian(1.0, g->xs[j])));
    }
    CHECK(err < 1e-8);
  }

  SUBCASE("sup norm decay matches the modulus of the closed form") {
    for (double t : {1.0, 2.0, 5.0}) {
      const WaveField u = free_propagate(f, t);
      CHECK(std::abs(sup_norm(u) - oracles::free_gaussian_sup(t)) < 1e-6);
    }
  }

  SUBCASE("exact unitarity") {
    const WaveField r = oracles::random_smooth_field(g, 9);
    CHECK(rel_l2_drift(r, free_propagate(r, 3.7)) < 1e-13);
  }
}

TEST_CASE("exponential kernel convolution") {
  const Grid g = desk_grid();

  SUBCASE("zero input") {
    const WaveField z = make_field(g);
    const WaveField gz = exp_kernel_convolve(z, 1.0);
    CHECK(l2_norm(gz) == 0.0);
    CHECK_THROWS_AS(exp_kernel_convolve(z, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(exp_kernel_convolve(z, -1.0), std::invalid_argument);
  }

  SUBCASE("integral identity int f*rho = -int f on a fine grid") {
    const Grid fine = make_grid(1 << 18, 40.0);
    const WaveField f = gaussian_field(fine, 1.0, 0.5, -5.0);
    const WaveField conv = exp_kernel_convolve(f, 1.0);
    double int_f = 0.0, int_g = 0.0;
    for (int j = 0; j < fine->n; ++j) {
      int_f += f.values[j].real();
      int_g += conv.values[j].real();
    }
    int_f *= fine->dx;
    int_g *= fine->dx;
    CHECK(std::abs(int_g + int_f) / std::abs(int_f) < 1e-8);
  }

  SUBCASE("pointwise values against the erf oracle") {
    const double q = 1.0, c = -5.0;
    auto worst_error = [&](const Grid& grid) {
      const WaveField f = gaussian_field(grid, 1.0, 1.0, c);
      const WaveField conv = exp_kernel_convolve(f, q);
      double err = 0.0;
      for (int j = 0; j < grid->n; j += 7) {
        const double x = grid->xs[j];
        const double tail_above_zero = -oracles::gauss_exp_integral(grid->half_width, c, q);
        const double integral = oracles::gauss_exp_integral(x, c, q) + tail_above_zero;
        const double expected = -q * std::exp(q * x) * integral;
        err = std::max(err, std::abs(conv.values[j].real() - expected));
      }
      return err;
    };
    // trapezoid cells: O(dx^2), so refining 8x buys ~64x
    const double coarse = worst_error(g);
    const double fine = worst_error(make_grid(32768, 40.0));
    CHECK(coarse < 2e-4);
    CHECK(fine < coarse / 40.0);
  }

  SUBCASE("unit-mass narrow bump reproduces the kernel tail") {
    // narrow enough that the delta-approximant width correction
    // (e^{q^2 w^2/2} - 1) stays under the tolerance; fine grid resolves it
    const Grid fg = make_grid(1 << 18, 40.0);
    const double q = 1.0, x0 = -5.0, w = 0.015;
    WaveField f = gaussian_field(fg, 1.0, w, x0);
    const double m = lp_norm(f, 1.0);
    f = (1.0 / m) * f;
    const WaveField conv = exp_kernel_convolve(f, q);
    double err_left = 0.0, err_right = 0.0;
    for (int j = 0; j < fg->n; ++j) {
      const double x = fg->xs[j];
      if (x < x0 - 1.0 && x > -38.0) {
        err_left = std::max(err_left,
                            std::abs(conv.values[j].real() + std::exp(q * (x - x0))));
      }
      if (x > x0 + 1.0) {
        err_right = std::max(err_right, std::abs(conv.values[j].real()));
      }
    }
    CHECK(err_left < 1e-4);
    CHECK(err_right < 1e-6);
  }
}

TEST_CASE("delta propagator, left-supported path") {
  const Grid g = desk_grid();
  const WaveField f = gaussian_field(g, 1.0, 1.0, -8.0);

  SUBCASE("t = 0 reduces to the identity") {
    const WaveField u = delta_propagate_left(f, 1.0, 0.0);
    double err = 0.0;
    for (int j = 0; j < g->n; ++j) err = std::max(err, std::abs(u.values[j] - f.values[j]));
    CHECK(err < 1e-10);
  }

  SUBCASE("support precondition is enforced") {
    const WaveField bad = gaussian_field(g, 1.0, 1.0, 2.0);
    CHECK_THROWS_AS(delta_propagate_left(bad, 1.0, 0.5), std::invalid_argument);
  }

  SUBCASE("unitary over t in [0, 2]") {
    for (double t : {0.5, 1.0, 2.0}) {
      const WaveField u = delta_propagate_left(f, 1.0, t);
      CHECK(rel_l2_drift(f, u) < 1e-8);
    }
  }

  SUBCASE("weak coupling limit approaches the free flow") {
    // the H1 gap to the free flow scales linearly in q with a data-dependent
    // constant (the kernel flattens to a plateau of length ~L as q -> 0)
    const WaveField fr = free_propagate(f, 1.0);
    double prev_c = -1.0;
    for (double q : {1e-3, 1e-4, 1e-5, 1e-6}) {
      const double c = h1_distance(delta_propagate_left(f, q, 1.0), fr) / q;
      if (prev_c > 0.0) CHECK(std::abs(c - prev_c) / prev_c < 0.05);
      prev_c = c;
    }
    const WaveField small = gaussian_field(g, 0.03, 1.0, -5.0);
    CHECK(h1_distance(delta_propagate_left(small, 1e-6, 1.0),
                      free_propagate(small, 1.0)) < 1e-6);
  }
}

TEST_CASE("delta propagator, general data") {
  const Grid g = desk_grid();

  SUBCASE("t = 0 identity for data sitting on the origin") {
    const WaveField f = gaussian_field(g, 1.0, 1.0, 0.0);
    const WaveField u = delta_propagate(f, 1.0, 0.0);
    double err = 0.0;
    for (int j = 0; j < g->n; ++j) err = std::max(err, std::abs(u.values[j] - f.values[j]));
    CHECK(err < 1e-12);
  }

  SUBCASE("even data stays even") {
    const WaveField f = gaussian_field(g, 0.8, 1.3, 0.0);
    const WaveField u = delta_propagate(f, 1.0, 1.0);
    double asym = 0.0;
    for (int j = 1; j < g->n; ++j) {
      asym = std::max(asym, std::abs(u.values[j] - u.values[g->n - j]));
    }
    CHECK(asym < 1e-10);
  }

  SUBCASE("reflection commutation") {
    const WaveField f = gaussian_field(g, 1.0, 1.0, -3.0);
    const WaveField a = delta_propagate(reflect(f), 1.0, 1.0);
    const WaveField b = reflect(delta_propagate(f, 1.0, 1.0));
    CHECK(h1_distance(a, b) < 1e-9);
  }

  SUBCASE("agrees with the left-supported path on left data") {
    const WaveField f = gaussian_field(g, 1.0, 1.0, -7.0);
    const WaveField a = delta_propagate(f, 1.0, 1.0);
    const WaveField b = delta_propagate_left(f, 1.0, 1.0);
    CHECK(h1_distance(a, b) < 1e-9);
  }

  SUBCASE("group law") {
    const WaveField f = gaussian_field(g, 1.0, 1.0, -6.0);
    const WaveField one_shot = delta_propagate(f, 1.0, 1.3);
    const WaveField two_shot = delta_propagate(delta_propagate(f, 1.0, 0.7), 1.0, 0.6);
    CHECK(h1_distance(one_shot, two_shot) < 1e-7);
    // data interacting harder carries the intermediate state's derivative
    // jump on the grid; the composition error then sits at the kink
    // representation level rather than at quadrature level
    const WaveField hot = gaussian_field(g, 1.0, 1.0, -4.0);
    const double coarse = h1_distance(
        delta_propagate(hot, 1.0, 1.3),
        delta_propagate(delta_propagate(hot, 1.0, 0.7), 1.0, 0.6));
    std::printf("  [measure] group law, strongly interacting data: %.3e\n", coarse);
    CHECK(coarse < 1e-4);
  }

  SUBCASE("unitarity at the reference scales") {
    // data far enough from the origin that the kink-quadrature floor stays
    // below the certification level, close enough to interact visibly
    const WaveField f = gaussian_field(g, 1.0, 1.0, -8.0);
    for (double q : {0.5, 1.0, 2.0}) {
      const WaveField u = delta_propagate(f, q, 2.0);
      const double drift = rel_l2_drift(f, u);
      const double interaction = h1_distance(u, free_propagate(f, 2.0));
      std::printf("  [measure] drift q=%.1f t=2: %.3e (interaction %.1e)\n", q,
                  drift, interaction);
      CHECK(drift < 1e-8);
      CHECK(interaction > 1e-4);  // the delta is genuinely exercised
    }
    // closer data interacts harder; the kink quadrature floor is O(h^2)
    const WaveField close_in = gaussian_field(g, 1.0, 1.0, -5.0);
    for (double q : {0.5, 1.0, 2.0}) {
      CHECK(rel_l2_drift(close_in, delta_propagate(close_in, q, 2.0)) < 1e-7);
    }
  }

  SUBCASE("q = 0 falls back to the free propagator") {
    const WaveField f = gaussian_field(g, 1.0, 1.0, -2.0);
    const WaveField a = delta_propagate(f, 0.0, 1.0);
    const WaveField b = free_propagate(f, 1.0);
    for (int j = 0; j < g->n; ++j) CHECK(a.values[j] == b.values[j]);
    CHECK_THROWS_AS(delta_propagate(f, -0.5, 1.0), std::invalid_argument);
  }
}

TEST_CASE("Crank-Nicolson oracle") {
  const Grid g = desk_grid();

  SUBCASE("identity at t = 0 and exact unitarity") {
    const WaveField f = gaussian_field(g, 1.0, 1.0, -3.0);
    const WaveField u0 = cn_propagate(f, 1.0, 0.0, 16);
    for (int j = 0; j < g->n; ++j) CHECK(u0.values[j] == f.values[j]);

    const WaveField u = cn_propagate(f, 1.0, 1.0, 64);
    CHECK(rel_l2_drift(f, u) < 1e-12);
    CHECK_THROWS_AS(cn_propagate(f, 1.0, 1.0, 0), std::invalid_argument);
  }

  SUBCASE("attractive bound state phase") {
    // H_q f = -q^2/2 f for f = e^{q|x|}, q < 0, via the jump condition
    const double q = -1.0;
    WaveField f = make_field(g);
    for (int j = 0; j < g->n; ++j) f.values[j] = std::exp(q * std::abs(g->xs[j]));
    const double t = 1.0;
    const WaveField u = cn_propagate(f, q, t, 8192);
    const Complex overlap = inner_l2(u, f);
    const double lambda = -q * q / 2.0;
    const double phase_err = std::abs(std::arg(overlap) - (-lambda * t));
    std::printf("  [measure] CN bound-state phase error: %.3e\n", phase_err);
    CHECK(phase_err < 1e-4);
  }

  SUBCASE("cross validation against the exact kernel") {
    // width 0.75 keeps the static high-frequency mismatch between the two
    // discretizations below the certification level while the Cayley time
    // error still dominates the coarse end of the ladder
    const WaveField f = gaussian_field(g, 1.0, 0.75, -3.0);
    const WaveField exact = delta_propagate(f, 1.0, 1.0);
    std::vector<double> ladder;
    std::printf("  [measure] CN-vs-exact H1 discrepancy ladder:\n");
    for (int s : {8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096}) {
      const WaveField cn = cn_propagate(f, 1.0, 1.0, s);
      ladder.push_back(h1_distance(exact, cn));
      std::printf("    sub_steps=%5d  D=%.6e\n", s, ladder.back());
    }
    const double floor = ladder.back();
    CHECK(floor < 1e-3);
    int qualifying = 0;
    for (size_t k = 0; k + 1 < ladder.size(); ++k) {
      if (ladder[k + 1] >= 5.0 * floor) {
        const double ratio = ladder[k] / ladder[k + 1];
        std::printf("    qualifying ratio %.2f\n", ratio);
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
        ++qualifying;
      }
    }
    CHECK(qualifying >= 1);
  }
}

TEST_CASE("far translation decoupling") {
  const Grid g = desk_grid();
  const WaveField psi = gaussian_field(g, 1.0, 1.0, 0.0);
  // monotone while the physical coupling stays above the scheme's noise
  // floor; far shifts are only required to fall below a fraction of near ones
  double prev = 1e300;
  double at5 = 0.0, at20 = 0.0;
  for (double x0 : {0.0, -2.0, -5.0, -8.0}) {
    const WaveField shifted = x0 == 0.0 ? psi : translate(psi, x0);
    const double d = h1_distance(delta_propagate(shifted, 1.0, 1.0),
                                 free_propagate(shifted, 1.0));
    std::printf("  [measure] translation agreement x0=%.0f: %.3e\n", x0, d);
    CHECK(d < prev);
    prev = d;
    if (x0 == -5.0) at5 = d;
  }
  at20 = h1_distance(delta_propagate(translate(psi, -20.0), 1.0, 1.0),
                     free_propagate(translate(psi, -20.0), 1.0));
  CHECK(at20 <= 0.1 * at5);
}
