#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "deltanls/diagnostics.hpp"
#include "deltanls/norms.hpp"
#include "deltanls/transforms.hpp"
#include "oracles.hpp"

using namespace deltanls;

namespace {
Grid desk_grid() { return make_grid(4096, 40.0); }

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) {
    out[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1));
  }
  return out;
}
}  // namespace

TEST_CASE("dispersion decay fit") {
  const Grid g = make_grid(8192, 220.0);
  const std::vector<double> t_grid = log_spaced(5.0, 50.0, 12);

  SUBCASE("free Gaussian matches the closed form and the rate") {
    const WaveField f = gaussian_field(g, 1.0, 1.0, 0.0);
    const DecayFit fit = dispersion_decay_fit(f, 0.0, t_grid);
    for (size_t k = 0; k < fit.times.size(); ++k) {
      CHECK(std::abs(fit.sup_norms[k] - oracles::free_gaussian_sup(fit.times[k])) < 1e-6);
    }
    std::printf("  [measure] free decay slope: %.4f\n", fit.fitted_slope);
    CHECK(std::abs(fit.fitted_slope + 0.5) < 0.05);
  }

  SUBCASE("repulsive delta keeps the free rate") {
    // a moving packet transits the delta before the fit window opens; a
    // packet parked next to it keeps exchanging mass with its reflection
    // through the whole decade and fits shallower
    const Grid wide = make_grid(16384, 340.0);
    const WaveField f = gaussian_field(wide, 1.0, 1.0, -5.0, 2.0);
    const DecayFit fit = dispersion_decay_fit(f, 1.0, t_grid);
    std::printf("  [measure] q=1 decay slope: %.4f\n", fit.fitted_slope);
    CHECK(std::abs(fit.fitted_slope + 0.5) < 0.05);

    const WaveField parked = gaussian_field(wide, 1.0, 1.0, -5.0);
    const DecayFit slow = dispersion_decay_fit(parked, 1.0, t_grid);
    std::printf("  [measure] q=1 parked-data slope: %.4f\n", slow.fitted_slope);
    CHECK(slow.fitted_slope > -0.5);  // transient, shallower than the rate
  }

  SUBCASE("a narrow time window is rejected") {
    const WaveField f = gaussian_field(g, 1.0, 1.0, 0.0);
    CHECK_THROWS_AS(dispersion_decay_fit(f, 0.0, {5.0}), std::invalid_argument);
    CHECK_THROWS_AS(dispersion_decay_fit(f, 0.0, {5.0, 20.0}), std::invalid_argument);
  }

  SUBCASE("wrap abort on an undersized box") {
    const Grid small = make_grid(4096, 40.0);
    const WaveField f = gaussian_field(small, 1.0, 1.0, 0.0);
    CHECK_THROWS_AS(dispersion_decay_fit(f, 0.0, t_grid), std::runtime_error);
  }
}

TEST_CASE("spacetime norm quadrature") {
  const Grid g = desk_grid();

  SUBCASE("zero trajectory") {
    Trajectory traj;
    traj.grid = g;
    for (double t : {0.0, 0.5, 1.0}) {
      traj.times.push_back(t);
      traj.states.push_back(make_field(g));
    }
    CHECK(strichartz_spacetime_norm(traj, 70.0 / 9.0, 7.0) == 0.0);
  }

  SUBCASE("stride stability for the linear Gaussian") {
    const WaveField f = gaussian_field(g, 1.0, 1.0, 0.0);
    auto norm_with = [&](int count) {
      std::vector<double> times(count);
      for (int k = 0; k < count; ++k) times[k] = 6.0 * k / (count - 1);
      const Trajectory traj = linear_trajectory(f, 0.0, times);
      return strichartz_spacetime_norm(traj, 70.0 / 9.0, 7.0);
    };
    const double coarse = norm_with(61);
    const double fine = norm_with(121);
    CHECK(std::abs(coarse - fine) / fine < 5e-3);
  }

  SUBCASE("window tail decays for the linear flow") {
    const WaveField f = gaussian_field(g, 1.0, 1.0, 0.0);
    std::vector<double> times(121);
    for (int k = 0; k < 121; ++k) times[k] = 8.0 * k / 120.0;
    const Trajectory traj = linear_trajectory(f, 0.0, times);
    const StrichartzExponents e = strichartz_exponents(5.0);
    // partial mixed norms over [0, T] form a Cauchy-like sequence
    double prev_tail = 1e300;
    const double full = strichartz_spacetime_norm(traj, e.p, e.r);
    for (int cut : {40, 80, 120}) {
      Trajectory window;
      window.grid = traj.grid;
      window.times.assign(traj.times.begin(), traj.times.begin() + cut + 1);
      window.states.assign(traj.states.begin(), traj.states.begin() + cut + 1);
      const double partial = strichartz_spacetime_norm(window, e.p, e.r);
      const double tail = full - partial;
      CHECK(tail >= -1e-12);
      CHECK(tail < prev_tail);
      prev_tail = tail;
    }
  }
}

TEST_CASE("virial weights") {
  const Grid g = desk_grid();

  SUBCASE("pure quadratic samples") {
    const WeightSpec w = WeightSpec::pure_quadratic(g);
    const int j = g->n / 2 + 100;
    const double x = g->xs[j];
    CHECK(w.lambda[j] == doctest::Approx(x * x));
    CHECK(w.dlambda[j] == doctest::Approx(2 * x));
    CHECK(w.d2lambda[j] == 2.0);
    CHECK(w.d4lambda[j] == 0.0);
    CHECK(w.dlambda[g->n / 2] == 0.0);
  }

  SUBCASE("cutoff weight matches x^2 inside and vanishes outside") {
    const double R = 8.0;
    const WeightSpec w = WeightSpec::quadratic_cutoff(g, R);
    CHECK(w.dlambda[g->n / 2] == 0.0);
    for (int j = 0; j < g->n; ++j) {
      const double ax = std::abs(g->xs[j]);
      if (ax < R) {
        CHECK(w.lambda[j] == doctest::Approx(g->xs[j] * g->xs[j]));
        CHECK(w.d2lambda[j] == doctest::Approx(2.0));
      }
      if (ax > 2 * R) {
        CHECK(w.lambda[j] == 0.0);
        CHECK(w.d2lambda[j] == 0.0);
        CHECK(w.d4lambda[j] == 0.0);
      }
    }
    // the sampled first derivative is consistent with a finite difference
    // of the sampled weight through the transition band
    for (int j = g->n / 2 + 500; j < g->n / 2 + 2000; j += 37) {
      const double fd = (w.lambda[j + 1] - w.lambda[j - 1]) / (2 * g->dx);
      CHECK(std::abs(fd - w.dlambda[j]) < 2e-3 * std::max(1.0, std::abs(w.dlambda[j])));
    }
  }
}

TEST_CASE("virial identity, linear free Gaussian") {
  const Grid g = desk_grid();
  const WaveField f = gaussian_field(g, 1.0, 1.0, 0.0);
  const WeightSpec w = WeightSpec::pure_quadratic(g);

  std::vector<double> times;
  for (int k = 0; k <= 20; ++k) times.push_back(0.1 * k);
  const Trajectory traj = linear_trajectory(f, 0.0, times);
  const VirialSeries vs = virial_series(traj, w, 0.0);

  SUBCASE("moment curve matches the closed form") {
    for (size_t k = 0; k < vs.times.size(); ++k) {
      const double t = vs.times[k];
      const double expected = 0.5 * oracles::sqrt_pi * (1.0 + t * t);
      CHECK(std::abs(vs.M[k] - expected) < 1e-8);
      CHECK(std::abs(vs.M_dot[k] - oracles::sqrt_pi * t) < 1e-8);
    }
  }

  SUBCASE("second derivative equals sqrt(pi) within 1%") {
    for (size_t k = 1; k + 1 < vs.times.size(); ++k) {
      const double d2m = (vs.M[k + 1] - 2 * vs.M[k] + vs.M[k - 1]) / 0.01;
      CHECK(std::abs(d2m - oracles::sqrt_pi) / oracles::sqrt_pi < 0.01);
      CHECK(std::abs(vs.rhs[k] - oracles::sqrt_pi) < 1e-8);
      CHECK(vs.residual[k] < 1e-7);
      CHECK(vs.consistency[k] < 1e-7);
    }
  }

  SUBCASE("zero field and stationary modulus") {
    CHECK(virial_rhs(make_field(g), w, {0.0, 5.0}, 0.0) == 0.0);
    // a real field has M_dot = 0 exactly
    Trajectory frozen;
    frozen.grid = g;
    frozen.params = {0.0, 5.0};
    for (double t : {0.0, 0.1, 0.2}) {
      frozen.times.push_back(t);
      frozen.states.push_back(f);
    }
    const VirialSeries fs = virial_series(frozen, w, 0.0);
    for (double md : fs.M_dot) CHECK(std::abs(md) < 1e-12);
    for (size_t k = 0; k + 1 < fs.M.size(); ++k) {
      CHECK(fs.M[k] == doctest::Approx(fs.M[k + 1]));
    }
  }

  SUBCASE("needs at least three snapshots") {
    Trajectory tiny;
    tiny.grid = g;
    tiny.times = {0.0, 0.1};
    tiny.states = {f, f};
    CHECK_THROWS_AS(virial_series(tiny, w, 0.0), std::invalid_argument);
  }
}

TEST_CASE("virial rhs with the cutoff weight approaches the pure one") {
  const Grid g = desk_grid();
  const WaveField f = gaussian_field(g, 1.0, 1.0, 0.0);
  const NLSParams p{1.0, 5.0};
  const double pure = virial_rhs(f, WeightSpec::pure_quadratic(g), p, 1.0);
  double prev = 1e300;
  for (double R : {4.0, 6.0, 8.0}) {
    const double cut = virial_rhs(f, WeightSpec::quadratic_cutoff(g, R), p, 1.0);
    const double diff = std::abs(cut - pure);
    CHECK(diff < prev);
    prev = diff;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("virial residual refines on a nonlinear run") {
  const Grid g = desk_grid();
  const NLSParams p{1.0, 5.0};
  const WaveField f = gaussian_field(g, 0.5, 1.0, -6.0);
  const WeightSpec w = WeightSpec::pure_quadratic(g);

  auto max_residual = [&](double dt, int stride) {
    EvolveOptions opt;
    opt.t_final = 1.0;
    opt.dt = dt;
    opt.stride = stride;
    const Trajectory traj = evolve(f, p, opt);
    const VirialSeries vs = virial_series(traj, w, 1.0);
    double worst = 0.0;
    for (size_t k = 1; k + 1 < vs.residual.size(); ++k) {
      worst = std::max(worst, vs.residual[k]);
    }
    return worst;
  };

  const double coarse = max_residual(4e-3, 5);    // snapshot spacing 0.02
  const double fine = max_residual(2e-3, 5);      // snapshot spacing 0.01
  const double finest = max_residual(1e-3, 5);    // snapshot spacing 0.005
  const double order1 = std::log2(coarse / fine);
  const double order2 = std::log2(fine / finest);
  std::printf("  [measure] virial residual %.3e -> %.3e -> %.3e (orders %.2f, %.2f)\n",
              coarse, fine, finest, order1, order2);
  CHECK(order1 >= 1.0);
  CHECK(order2 >= 1.0);
}

TEST_CASE("rigidity lower bound") {
  const Grid g = desk_grid();
  const NLSParams p{1.0, 5.0};

  SUBCASE("zero field") {
    const RigidityBound b = rigidity_lower_bound(make_field(g), 5.0, p, 1.0);
    CHECK(b.interior == 0.0);
    CHECK(b.tail == 0.0);
    CHECK(b.bound == 0.0);
  }

  SUBCASE("localized data: bound grows in R to a positive limit") {
    const WaveField f = gaussian_field(g, 1.0, 1.0, 0.0);
    double prev = -1e300;
    double last = 0.0;
    for (double R : {1.0, 2.0, 4.0, 8.0, 16.0}) {
      const RigidityBound b = rigidity_lower_bound(f, R, p, 1.0);
      CHECK(b.bound >= prev - 1e-12);
      prev = b.bound;
      last = b.bound;
    }
    CHECK(last > 0.0);
  }

  SUBCASE("data supported outside the ball") {
    const WaveField f = gaussian_field(g, 1.0, 0.5, 10.0);
    const RigidityBound b = rigidity_lower_bound(f, 3.0, p, 1.0);
    CHECK(b.interior < 1e-12);
    CHECK(b.bound <= 0.0);
  }
}

TEST_CASE("translation agreement diagnostic") {
  const Grid g = desk_grid();
  const WaveField psi = gaussian_field(g, 1.0, 1.0, 0.0);

  const double at5 = translation_agreement(psi, -5.0, 1.0, 1.0);
  const double at20 = translation_agreement(psi, -20.0, 1.0, 1.0);
  CHECK(at20 <= 0.1 * at5);

  // vanishing coupling gives identical operators
  CHECK(translation_agreement(psi, -5.0, 0.0, 1.0) < 1e-13);

  // data near the wall is rejected
  CHECK_THROWS_AS(translation_agreement(psi, -37.5, 1.0, 1.0), std::runtime_error);
}

TEST_CASE("frequency band split") {
  const Grid g = desk_grid();

  SUBCASE("above-Nyquist cutoff returns the field unchanged") {
    const WaveField f = oracles::random_smooth_field(g, 31);
    const BandSplit bs = band_split(f, 2.0 * g->nyquist_freq());
    CHECK(l2_norm(bs.high) < 1e-13 * l2_norm(f));
    const double scale = sup_norm(f);
    for (int j = 0; j < g->n; ++j) {
      CHECK(std::abs(bs.low.values[j] + bs.high.values[j] - f.values[j]) < 1e-12 * scale);
    }
  }

  SUBCASE("exact reconstruction at any scale") {
    const WaveField f = oracles::random_smooth_field(g, 32);
    const BandSplit bs = band_split(f, 3.0);
    const double scale = sup_norm(f);
    for (int j = 0; j < g->n; ++j) {
      CHECK(std::abs(bs.low.values[j] + bs.high.values[j] - f.values[j]) < 1e-12 * scale);
    }
    // near-Pythagoras: cross term lives only in the cutoff overlap band
    const double whole = l2_norm(f) * l2_norm(f);
    const double parts = l2_norm(bs.low) * l2_norm(bs.low) +
                         l2_norm(bs.high) * l2_norm(bs.high);
    CHECK(std::abs(whole - parts) / whole < 0.25);
  }

  SUBCASE("high band sup obeys the quarter-power rate for smooth data") {
    const WaveField f = gaussian_field(g, 1.0, 1.0, 0.0);
    const double h1 = h1_norm(f);
    std::vector<double> Rs = log_spaced(0.6, 6.0, 10);
    std::vector<double> ratio(Rs.size());
    for (size_t k = 0; k < Rs.size(); ++k) {
      ratio[k] = sup_norm(band_split(f, Rs[k]).high) / h1;
      CHECK(ratio[k] > 0.0);
    }
    const double slope = fit_loglog_slope(Rs, ratio);
    std::printf("  [measure] Gaussian high-band slope: %.3f\n", slope);
    CHECK(slope <= -0.25);
  }

  SUBCASE("kinked data decays at rate about -1") {
    WaveField f = make_field(g);
    for (int j = 0; j < g->n; ++j) {
      f.values[j] = std::exp(-std::abs(g->xs[j]));
    }
    const double h1 = h1_norm(f);
    std::vector<double> Rs = log_spaced(2.0, 20.0, 10);
    std::vector<double> ratio(Rs.size());
    for (size_t k = 0; k < Rs.size(); ++k) {
      ratio[k] = sup_norm(band_split(f, Rs[k]).high) / h1;
    }
    const double slope = fit_loglog_slope(Rs, ratio);
    std::printf("  [measure] exp(-|x|) high-band slope: %.3f\n", slope);
    CHECK(slope <= -0.25);
    CHECK(std::abs(slope + 1.0) < 0.3);
  }
}
