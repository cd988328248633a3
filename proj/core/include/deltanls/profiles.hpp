#pragma once

#include <array>

#include "deltanls/scattering.hpp"

namespace deltanls {

// One profile psi with its parameter sequences. Each sequence is either
// identically zero or constructed divergent; the flags record which.
struct ProfileTerm {
  WaveField psi;
  std::vector<double> t_seq;
  std::vector<double> x_seq;
  bool t_escaping = false;
  bool x_escaping = false;
};

struct Decomposition {
  std::vector<ProfileTerm> terms;
  std::vector<WaveField> remainders;  // one per family index
};

struct RemainderSpec {
  enum class Kind { None, Fixed, SeededNoise };
  Kind kind = Kind::None;
  WaveField fixed;        // used for Kind::Fixed
  double h1_size = 0.0;   // target H^1 norm for Kind::SeededNoise
  std::uint64_t seed = 0;
};

struct SyntheticFamily {
  std::vector<WaveField> u_seq;
  Decomposition ground_truth;
  std::uint64_t seed = 0;
};

// u_n = sum_j e^{i t_j^n H_q} tau_{x_j^n} psi_j + R_n. The abstract e^{itA}
// factor is realized as propagation by -t through the physical e^{-itH_q}
// convention; that sign is fixed here and mirrored in greedy_extract.
SyntheticFamily synth_family(const std::vector<ProfileTerm>& terms,
                             const RemainderSpec& remainder, double q,
                             const PropagatorMethod& method = {});

// Band-limited random field with a prescribed H^1 norm, deterministic in seed.
WaveField seeded_noise_field(const Grid& grid, double h1_size,
                             std::uint64_t seed);

struct PairDivergence {
  int j = 0, k = 0;
  std::vector<double> separation;  // s_n = |t_j^n - t_k^n| + |x_j^n - x_k^n|
  bool divergent = false;          // nondecreasing and above threshold at the end
};
std::vector<PairDivergence> orthogonality_check(
    const std::vector<ProfileTerm>& terms, double threshold = 8.0);

// Relative defects of the Pythagorean splittings, one row per identity:
// "L2", "H", "Lp:<p>" for each p in p_list, "energy". Requires ground truth.
struct PythagoreanDefects {
  std::vector<std::string> identities;
  std::vector<std::vector<double>> defect;  // [identity][n]
};
PythagoreanDefects pythagorean_defects(const SyntheticFamily& family, double q,
                                       const std::vector<double>& p_list,
                                       double alpha,
                                       const PropagatorMethod& method = {});

// || |W1(t - t_n, x - x_n)|^alpha |W2(t - s_n, x - y_n)| ||_{L^{q'} L^{r'}}
// per shift tuple (t_n, s_n, x_n, y_n). Shifted stamps must land on stored
// snapshot times and shifted positions on grid nodes.
std::vector<double> cross_interaction_norm(
    const Trajectory& W1, const Trajectory& W2, const StrichartzExponents& e,
    double alpha, const std::vector<std::array<double, 4>>& shifts);

// Pointwise terms of the splitting inequality for one sample tuple:
//   lhs = | sum a_j |a_j|^a - (sum a_j) |sum a_j|^a |,
//   rhs = sum_{j != k} |a_j| |a_k|^a.
struct ElementaryTerms {
  double lhs = 0.0, rhs = 0.0;
};
ElementaryTerms elementary_terms(const std::vector<Complex>& a, double alpha);

struct SplittingDefect {
  double norm_defect = 0.0;        // L^{r'} norm of the field-level lhs
  double pointwise_max_ratio = 0.0;  // empirical constant sup lhs/rhs
};
SplittingDefect splitting_defect(const std::vector<WaveField>& fields,
                                 double alpha);

struct GreedyConfig {
  double time_window = 2.0;    // scan t in [-window, window]
  double time_step = 0.25;     // scan resolution (window grid includes 0)
  int max_profiles = 3;
  double stop_threshold = 0.05;  // quit when the scanned sup falls below this
  int tail_average = 0;          // #largest n's averaged for psi; 0 = half
  // The averaged estimate is windowed to |x| <= 2*window_radius so that the
  // other profiles' recentered copies (which only escape as n grows) do not
  // leak into psi; 0 picks half_width / 8.
  double window_radius = 0.0;
};

struct GreedyReport {
  Decomposition decomposition;
  std::vector<double> remainder_sup;          // per n, after extraction
  std::vector<double> scanned_sup_per_round;  // stopping diagnostic
};

// Numerical analogue of the extraction step: per n, scan the time window for
// the sup-norm maximizer of the pulled-back field, recenter at the argmax
// node, estimate psi by averaging the recentered tail of the family,
// subtract, repeat.
GreedyReport greedy_extract(const SyntheticFamily& family, double q,
                            const GreedyConfig& config,
                            const PropagatorMethod& method = {});

}  // namespace deltanls
