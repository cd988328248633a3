#include "deltanls/profiles.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "deltanls/diagnostics.hpp"
#include "deltanls/norms.hpp"
#include "deltanls/transforms.hpp"

namespace deltanls {

namespace {

int family_length(const std::vector<ProfileTerm>& terms) {
  if (terms.empty()) throw std::invalid_argument("profile family: no terms");
  const size_t len = terms.front().t_seq.size();
  for (const ProfileTerm& term : terms) {
    if (term.t_seq.size() != len || term.x_seq.size() != len) {
      throw std::invalid_argument("profile family: parameter sequences must share one length");
    }
  }
  return static_cast<int>(len);
}

// e^{i t H_q} tau_x psi, realized as propagation by -t.
WaveField evolved_profile(const WaveField& psi, double t, double x, double q,
                          const PropagatorMethod& method) {
  return linear_propagate(translate(psi, x), q, -t, method);
}

}  // namespace

WaveField seeded_noise_field(const Grid& grid, double h1_size,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = grid->n;
  FourierField F;
  F.grid = grid;
  F.coefficients.assign(static_cast<size_t>(n), Complex{0.0, 0.0});
  const double band = grid->nyquist_freq() / 8.0;
  for (int k = 0; k < n; ++k) {
    const double xi = grid->freqs[k];
    const double damp = std::exp(-(xi / band) * (xi / band));
    F.coefficients[k] = damp * Complex{gauss(rng), gauss(rng)};
  }
  WaveField f = from_fourier(F);
  // localize so remainders do not park mass at the box walls
  const double w = 0.2 * grid->half_width;
  for (int j = 0; j < n; ++j) {
    const double s = grid->xs[j] / w;
    f.values[j] *= std::exp(-0.5 * s * s);
  }
  const double h1 = h1_norm(f);
  if (h1 == 0.0) return f;
  return (h1_size / h1) * f;
}

SyntheticFamily synth_family(const std::vector<ProfileTerm>& terms,
                             const RemainderSpec& remainder, double q,
                             const PropagatorMethod& method) {
  const int len = family_length(terms);
  const Grid grid = terms.front().psi.grid;

  SyntheticFamily family;
  family.seed = remainder.seed;
  family.ground_truth.terms = terms;
  for (int n = 0; n < len; ++n) {
    WaveField u = make_field(grid);
    for (const ProfileTerm& term : terms) {
      u += evolved_profile(term.psi, term.t_seq[n], term.x_seq[n], q, method);
    }
    WaveField rem = make_field(grid);
    switch (remainder.kind) {
      case RemainderSpec::Kind::None:
        break;
      case RemainderSpec::Kind::Fixed:
        rem = remainder.fixed;
        break;
      case RemainderSpec::Kind::SeededNoise:
        rem = seeded_noise_field(grid, remainder.h1_size,
                                 remainder.seed + static_cast<std::uint64_t>(n));
        break;
    }
    u += rem;
    if (boundary_mass_fraction(u) > 1e-8) {
      throw std::runtime_error("synth_family: assembled field touches the boundary at index " +
                               std::to_string(n));
    }
    family.ground_truth.remainders.push_back(std::move(rem));
    family.u_seq.push_back(std::move(u));
  }
  return family;
}

std::vector<PairDivergence> orthogonality_check(
    const std::vector<ProfileTerm>& terms, double threshold) {
  const int len = family_length(terms);
  if (terms.size() < 2) {
    throw std::invalid_argument("orthogonality_check: need at least two terms");
  }
  std::vector<PairDivergence> out;
  for (size_t j = 0; j + 1 < terms.size(); ++j) {
    for (size_t k = j + 1; k < terms.size(); ++k) {
      PairDivergence pd;
      pd.j = static_cast<int>(j);
      pd.k = static_cast<int>(k);
      pd.separation.resize(len);
      bool nondecreasing = true;
      for (int n = 0; n < len; ++n) {
        pd.separation[n] = std::abs(terms[j].t_seq[n] - terms[k].t_seq[n]) +
                           std::abs(terms[j].x_seq[n] - terms[k].x_seq[n]);
        if (n > 0 && pd.separation[n] < pd.separation[n - 1] - 1e-12) {
          nondecreasing = false;
        }
      }
      pd.divergent = nondecreasing && pd.separation.back() >= threshold;
      out.push_back(std::move(pd));
    }
  }
  return out;
}

PythagoreanDefects pythagorean_defects(const SyntheticFamily& family, double q,
                                       const std::vector<double>& p_list,
                                       double alpha,
                                       const PropagatorMethod& method) {
  const auto& terms = family.ground_truth.terms;
  if (terms.empty() || family.ground_truth.remainders.size() != family.u_seq.size()) {
    throw std::invalid_argument("pythagorean_defects: family lacks ground truth");
  }
  const int len = static_cast<int>(family.u_seq.size());

  PythagoreanDefects out;
  out.identities.push_back("L2");
  out.identities.push_back("H");
  for (double p : p_list) out.identities.push_back("Lp:" + std::to_string(p));
  out.identities.push_back("energy");
  out.defect.assign(out.identities.size(), std::vector<double>(len, 0.0));

  NLSParams params;
  params.q = q;
  params.alpha = alpha;

  for (int n = 0; n < len; ++n) {
    const WaveField& u = family.u_seq[n];
    const WaveField& rem = family.ground_truth.remainders[n];

    std::vector<WaveField> propagated;
    propagated.reserve(terms.size());
    for (const ProfileTerm& term : terms) {
      propagated.push_back(
          evolved_profile(term.psi, term.t_seq[n], term.x_seq[n], q, method));
    }

    size_t row = 0;
    {
      const double lhs = mass(u);
      double rhs = mass(rem);
      for (const ProfileTerm& term : terms) rhs += mass(term.psi);
      out.defect[row++][n] = std::abs(lhs - rhs) / std::max(lhs, 1e-300);
    }
    {
      const double lhs = form_norm_H(u, q);
      double rhs = form_norm_H(rem, q);
      for (const ProfileTerm& term : terms) {
        rhs += form_norm_H(translate(term.psi, term.x_seq[n]), q);
      }
      out.defect[row++][n] = std::abs(lhs - rhs) / std::max(lhs, 1e-300);
    }
    for (double p : p_list) {
      const double lhs = std::pow(lp_norm(u, p), p);
      double rhs = std::pow(lp_norm(rem, p), p);
      for (const WaveField& v : propagated) rhs += std::pow(lp_norm(v, p), p);
      out.defect[row++][n] = std::abs(lhs - rhs) / std::max(lhs, 1e-300);
    }
    {
      const double lhs = energy(u, params);
      double rhs = energy(rem, params);
      for (const WaveField& v : propagated) rhs += energy(v, params);
      out.defect[row++][n] = std::abs(lhs - rhs) / std::max(lhs, 1e-300);
    }
  }
  return out;
}

std::vector<double> cross_interaction_norm(
    const Trajectory& W1, const Trajectory& W2, const StrichartzExponents& e,
    double alpha, const std::vector<std::array<double, 4>>& shifts) {
  if (W1.times.size() < 2 || W2.times.size() < 2) {
    throw std::invalid_argument("cross_interaction_norm: trajectories too short");
  }
  if (!same_grid(*W1.grid, *W2.grid)) {
    throw std::invalid_argument("cross_interaction_norm: grids differ");
  }
  const GridSpec& g = *W1.grid;
  const double delta1 = W1.times[1] - W1.times[0];

  auto node_shift = [&](double x) {
    const double cells = x / g.dx;
    const double nearest = std::round(cells);
    if (std::abs(cells - nearest) > 1e-9) {
      throw std::invalid_argument("cross_interaction_norm: spatial shifts must be grid multiples");
    }
    return static_cast<int>(nearest);
  };

  std::vector<double> out;
  out.reserve(shifts.size());
  for (const auto& sh : shifts) {
    const double tn = sh[0], sn = sh[1];
    const int x_cells = node_shift(sh[2]);
    const int y_cells = node_shift(sh[3]);

    // quadrature stamps: all t with both t - tn in W1's window and
    // t - sn in W2's window, on the common uniform lattice
    std::vector<double> taus;
    std::vector<double> lrp;  // L^{r'} norms of the product at each tau
    for (size_t k = 0; k < W1.times.size(); ++k) {
      const double tau = W1.times[k] + tn;
      const double s2 = tau - sn;
      const double pos = (s2 - W2.times.front()) / delta1;
      const double near = std::round(pos);
      if (near < 0 || near >= static_cast<double>(W2.times.size())) continue;
      if (std::abs(pos - near) > 1e-6) continue;
      const size_t k2 = static_cast<size_t>(near);

      const auto& a = W1.states[k].values;
      const auto& b = W2.states[k2].values;
      double acc = 0.0;
      for (int j = 0; j < g.n; ++j) {
        int j1 = (j - x_cells) % g.n;
        if (j1 < 0) j1 += g.n;
        int j2 = (j - y_cells) % g.n;
        if (j2 < 0) j2 += g.n;
        const double prod = std::pow(std::abs(a[j1]), alpha) * std::abs(b[j2]);
        acc += std::pow(prod, e.r_prime);
      }
      taus.push_back(tau);
      lrp.push_back(std::pow(acc * g.dx, 1.0 / e.r_prime));
    }
    if (taus.size() < 2) {
      throw std::invalid_argument("cross_interaction_norm: shifted windows do not overlap");
    }
    out.push_back(mixed_time_norm(taus, lrp, e.q_dual_prime));
  }
  return out;
}

ElementaryTerms elementary_terms(const std::vector<Complex>& a, double alpha) {
  ElementaryTerms t;
  Complex sum{0.0, 0.0};
  Complex lhs{0.0, 0.0};
  for (const Complex& v : a) {
    sum += v;
    lhs += v * std::pow(std::abs(v), alpha);
  }
  lhs -= sum * std::pow(std::abs(sum), alpha);
  t.lhs = std::abs(lhs);
  for (size_t j = 0; j < a.size(); ++j) {
    for (size_t k = 0; k < a.size(); ++k) {
      if (j == k) continue;
      t.rhs += std::abs(a[j]) * std::pow(std::abs(a[k]), alpha);
    }
  }
  return t;
}

SplittingDefect splitting_defect(const std::vector<WaveField>& fields,
                                 double alpha) {
  if (fields.empty()) throw std::invalid_argument("splitting_defect: need fields");
  const GridSpec& g = *fields.front().grid;
  for (const WaveField& f : fields) {
    if (!same_grid(*f.grid, g)) throw std::invalid_argument("splitting_defect: grids differ");
  }
  const double r_prime = (alpha + 2.0) / (alpha + 1.0);

  double scale = 0.0;
  for (const WaveField& f : fields) scale += sup_norm(f);
  const double rhs_floor = 1e-14 * std::pow(std::max(scale, 1e-300), 1.0 + alpha);

  SplittingDefect out;
  double acc = 0.0;
  std::vector<Complex> tuple(fields.size());
  for (int j = 0; j < g.n; ++j) {
    for (size_t m = 0; m < fields.size(); ++m) tuple[m] = fields[m].values[j];
    const ElementaryTerms t = elementary_terms(tuple, alpha);
    acc += std::pow(t.lhs, r_prime);
    if (t.rhs > rhs_floor) {
      out.pointwise_max_ratio = std::max(out.pointwise_max_ratio, t.lhs / t.rhs);
    }
  }
  out.norm_defect = std::pow(acc * g.dx, 1.0 / r_prime);
  return out;
}

GreedyReport greedy_extract(const SyntheticFamily& family, double q,
                            const GreedyConfig& config,
                            const PropagatorMethod& method) {
  const int len = static_cast<int>(family.u_seq.size());
  if (len < 3) throw std::invalid_argument("greedy_extract: need a family of length >= 3");
  const Grid grid = family.u_seq.front().grid;

  const int half_scan = std::max(0, static_cast<int>(std::round(config.time_window /
                                                                config.time_step)));
  std::vector<double> scan_times;
  for (int i = -half_scan; i <= half_scan; ++i) scan_times.push_back(i * config.time_step);

  const int tail = config.tail_average > 0 ? std::min(config.tail_average, len)
                                           : std::max(1, len / 2);

  GreedyReport report;
  std::vector<WaveField> v = family.u_seq;

  for (int round = 0; round < config.max_profiles; ++round) {
    // the sup-maximizing pullback time and recentering node, per n
    std::vector<double> best_t(len, 0.0);
    std::vector<double> best_x(len, 0.0);
    std::vector<WaveField> best_field(len);
    std::vector<double> best_sup(len, -1.0);  // any field beats the sentinel
    for (int n = 0; n < len; ++n) {
      for (double s : scan_times) {
        WaveField pulled = linear_propagate(v[n], q, s, method);
        const double sn = sup_norm(pulled);
        if (sn > best_sup[n]) {
          best_sup[n] = sn;
          best_t[n] = s;
          best_field[n] = std::move(pulled);
        }
      }
      int argmax = grid->n / 2;  // a dead residual recenters at the origin
      double mx = 0.0;
      for (int j = 0; j < grid->n; ++j) {
        const double m = std::norm(best_field[n].values[j]);
        if (m > mx) {
          mx = m;
          argmax = j;
        }
      }
      best_x[n] = grid->xs[argmax];
    }

    double scanned_sup = 0.0;
    for (int n = len - tail; n < len; ++n) scanned_sup = std::max(scanned_sup, best_sup[n]);
    report.scanned_sup_per_round.push_back(scanned_sup);
    if (scanned_sup < config.stop_threshold) break;

    WaveField psi = make_field(grid);
    for (int n = len - tail; n < len; ++n) {
      psi += translate(best_field[n], -best_x[n]);
    }
    psi = (1.0 / tail) * psi;
    const double rw = config.window_radius > 0.0 ? config.window_radius
                                                 : grid->half_width / 8.0;
    for (int j = 0; j < grid->n; ++j) {
      psi.values[j] *= cutoff_profile(std::abs(grid->xs[j]) / rw);
    }

    ProfileTerm term;
    term.psi = psi;
    term.t_seq.assign(best_t.begin(), best_t.end());
    term.x_seq.assign(best_x.begin(), best_x.end());
    for (int n = 0; n < len; ++n) {
      v[n] -= linear_propagate(translate(psi, best_x[n]), q, -best_t[n], method);
    }
    report.decomposition.terms.push_back(std::move(term));
  }

  report.remainder_sup.resize(len);
  for (int n = 0; n < len; ++n) report.remainder_sup[n] = sup_norm(v[n]);
  report.decomposition.remainders = std::move(v);
  return report;
}

}  // namespace deltanls
