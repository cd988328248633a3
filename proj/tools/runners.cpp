#include "runners.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "deltanls/diagnostics.hpp"
#include "deltanls/norms.hpp"
#include "deltanls/profiles.hpp"
#include "deltanls/scattering.hpp"
#include "deltanls/serialize.hpp"
#include "deltanls/transforms.hpp"

namespace deltanls::cli {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config error at " + path + ": " + what);
}

template <typename T>
T get_or(const json& j, const std::string& block, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(block + "." + key, e.what());
  }
}

void require_finite(double v, const std::string& path) {
  if (!std::isfinite(v)) config_error(path, "value must be finite");
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

thread_local int* t_warning_counter = nullptr;
void counting_warning_handler(const std::string& message) {
  if (t_warning_counter) ++*t_warning_counter;
  std::fprintf(stderr, "[deltanls] warning: %s\n", message.c_str());
}

struct WarningScope {
  int count = 0;
  WarningHandler previous;
  WarningScope() {
    t_warning_counter = &count;
    previous = set_warning_handler(&counting_warning_handler);
  }
  ~WarningScope() {
    set_warning_handler(previous);
    t_warning_counter = nullptr;
  }
};

PropagatorMethod method_from(const ExperimentConfig::RunBlock& run) {
  if (run.method == "exact-kernel") return {};
  if (run.method == "crank-nicolson") {
    return {PropagatorKind::CrankNicolson, run.sub_steps};
  }
  config_error("run.method", "expected exact-kernel or crank-nicolson, got " + run.method);
}

EvolveOptions evolve_options(const ExperimentConfig& cfg) {
  EvolveOptions opt;
  opt.t_final = cfg.run.t_final;
  opt.dt = cfg.run.dt;
  opt.stride = cfg.run.stride;
  opt.method = method_from(cfg.run);
  opt.boundary_threshold = cfg.run.boundary_threshold;
  opt.mass_tolerance = cfg.run.mass_tolerance;
  return opt;
}

std::string out_path(const RunOptions& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out_dir);
  return (std::filesystem::path(opt.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

void add_check(RunRecord& rec, const std::string& name, double measured,
               double threshold, bool pass) {
  rec.checks[name] = {measured, threshold, pass};
  rec.pass = rec.pass && pass;
}

json scalar_row(const ScalarRecord& r) {
  return json{{"t", r.t},     {"mass", r.mass}, {"energy", r.energy},
              {"sup", r.sup}, {"h1", r.h1},     {"u0sq", r.u0sq}};
}

std::vector<double> default_decay_grid() {
  std::vector<double> out(12);
  for (int k = 0; k < 12; ++k) out[k] = 5.0 * std::pow(10.0, k / 11.0);
  return out;
}

std::vector<int> default_xval_ladder() {
  return {8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
}

// -------------------- individual experiment pipelines --------------------

void run_propagate(const ExperimentConfig& cfg, const RunOptions& opt,
                   RunRecord& rec) {
  const Grid grid = make_grid(cfg.grid.n, cfg.grid.half_width);
  const WaveField f = build_initial(cfg, grid);
  const PropagatorMethod method = method_from(cfg.run);
  const WaveField u = linear_propagate(f, cfg.physics.q, cfg.run.t_final, method);

  const double drift = std::abs(l2_norm(u) - l2_norm(f)) / l2_norm(f);
  add_check(rec, "l2_drift", drift, 1e-8, drift <= 1e-8);
  const double bmass = boundary_mass_fraction(u);
  add_check(rec, "boundary_mass", bmass, cfg.run.boundary_threshold,
            bmass <= cfg.run.boundary_threshold);

  const std::string field_path = out_path(opt, "field.json");
  save_field(field_path, u);
  rec.outputs["field"] = field_path;

  json summary;
  summary["t_final"] = cfg.run.t_final;
  summary["l2_before"] = l2_norm(f);
  summary["l2_after"] = l2_norm(u);
  summary["h1_after"] = h1_norm(u);
  summary["sup_after"] = sup_norm(u);
  const std::string spath = out_path(opt, "summary.json");
  write_text(spath, summary.dump(2) + "\n");
  rec.outputs["summary"] = spath;
}

void run_evolve(const ExperimentConfig& cfg, const RunOptions& opt,
                RunRecord& rec) {
  const Grid grid = make_grid(cfg.grid.n, cfg.grid.half_width);
  const WaveField f = build_initial(cfg, grid);
  const NLSParams params{cfg.physics.q, cfg.physics.alpha};
  const Trajectory traj = evolve(f, params, evolve_options(cfg));

  std::ostringstream jsonl;
  for (const ScalarRecord& r : traj.scalars) jsonl << scalar_row(r).dump() << "\n";
  const std::string jpath = out_path(opt, "steps.jsonl");
  write_text(jpath, jsonl.str());
  rec.outputs["jsonl"] = jpath;

  const std::string fpath = out_path(opt, "final_field.json");
  save_field(fpath, traj.states.back());
  rec.outputs["final_field"] = fpath;

  add_check(rec, "mass_drift", traj.mass_drift, 1e-10, traj.mass_drift <= 1e-10);

  const double e0 = traj.scalars.front().energy;
  double energy_drift = 0.0;
  for (const ScalarRecord& r : traj.scalars) {
    energy_drift = std::max(energy_drift, std::abs(r.energy - e0) / std::abs(e0));
  }
  json summary;
  summary["t_final"] = traj.times.back();
  summary["snapshots"] = traj.times.size();
  summary["mass_drift"] = traj.mass_drift;
  summary["energy_drift"] = energy_drift;
  const std::string spath = out_path(opt, "summary.json");
  write_text(spath, summary.dump(2) + "\n");
  rec.outputs["summary"] = spath;
}

void run_decay(const ExperimentConfig& cfg, const RunOptions& opt,
               RunRecord& rec) {
  const Grid grid = make_grid(cfg.grid.n, cfg.grid.half_width);
  const WaveField f = build_initial(cfg, grid);
  const std::vector<double> t_grid =
      cfg.decay.t_grid.empty() ? default_decay_grid() : cfg.decay.t_grid;
  const DecayFit fit = dispersion_decay_fit(f, cfg.physics.q, t_grid,
                                            method_from(cfg.run),
                                            cfg.run.boundary_threshold);

  std::ostringstream csv;
  csv << "t,sup\n";
  for (size_t k = 0; k < fit.times.size(); ++k) {
    csv << fit.times[k] << "," << fit.sup_norms[k] << "\n";
  }
  const std::string cpath = out_path(opt, "decay.csv");
  write_text(cpath, csv.str());
  rec.outputs["csv"] = cpath;

  const double err = std::abs(fit.fitted_slope + 0.5);
  add_check(rec, "slope_within_tolerance", err, cfg.decay.slope_tolerance,
            err <= cfg.decay.slope_tolerance);

  json summary;
  summary["slope"] = fit.fitted_slope;
  summary["tolerance"] = cfg.decay.slope_tolerance;
  summary["fit_residual"] = fit.fit_residual;
  summary["pass"] = err <= cfg.decay.slope_tolerance;
  const std::string spath = out_path(opt, "summary.json");
  write_text(spath, summary.dump(2) + "\n");
  rec.outputs["summary"] = spath;
}

void run_virial(const ExperimentConfig& cfg, const RunOptions& opt,
                RunRecord& rec) {
  const Grid grid = make_grid(cfg.grid.n, cfg.grid.half_width);
  const WaveField f = build_initial(cfg, grid);
  const NLSParams params{cfg.physics.q, cfg.physics.alpha};

  Trajectory traj;
  double coupling = cfg.virial.nonlinear_coupling;
  if (cfg.virial.linear) {
    std::vector<double> times;
    const int count = std::max(3, cfg.run.stride);
    for (int k = 0; k < count; ++k) {
      times.push_back(cfg.run.t_final * k / (count - 1));
    }
    traj = linear_trajectory(f, cfg.physics.q, times, method_from(cfg.run),
                             cfg.physics.alpha);
    coupling = 0.0;
  } else {
    traj = evolve(f, params, evolve_options(cfg));
  }

  const WeightSpec w = cfg.virial.weight == "pure-quadratic"
                           ? WeightSpec::pure_quadratic(grid)
                           : WeightSpec::quadratic_cutoff(grid, cfg.virial.R);
  const VirialSeries vs = virial_series(traj, w, coupling);

  std::ostringstream csv;
  csv << "t,M,M_dot,rhs,residual,consistency\n";
  for (size_t k = 0; k < vs.times.size(); ++k) {
    csv << vs.times[k] << "," << vs.M[k] << "," << vs.M_dot[k] << "," << vs.rhs[k]
        << "," << vs.residual[k] << "," << vs.consistency[k] << "\n";
  }
  const std::string cpath = out_path(opt, "virial.csv");
  write_text(cpath, csv.str());
  rec.outputs["csv"] = cpath;

  double max_residual = 0.0, max_consistency = 0.0, rhs_scale = 0.0;
  for (size_t k = 1; k + 1 < vs.times.size(); ++k) {
    max_residual = std::max(max_residual, vs.residual[k]);
    max_consistency = std::max(max_consistency, vs.consistency[k]);
    rhs_scale = std::max(rhs_scale, std::abs(vs.rhs[k]));
  }
  const double tol = cfg.virial.consistency_tolerance * std::max(1.0, rhs_scale);
  add_check(rec, "virial_consistency", max_consistency, tol, max_consistency <= tol);

  json summary;
  summary["max_residual"] = max_residual;
  summary["max_consistency"] = max_consistency;
  summary["rhs_scale"] = rhs_scale;
  const std::string spath = out_path(opt, "summary.json");
  write_text(spath, summary.dump(2) + "\n");
  rec.outputs["summary"] = spath;
}

void run_scatter(const ExperimentConfig& cfg, const RunOptions& opt,
                 RunRecord& rec) {
  const Grid grid = make_grid(cfg.grid.n, cfg.grid.half_width);
  const WaveField f = build_initial(cfg, grid);
  const NLSParams params{cfg.physics.q, cfg.physics.alpha};
  if (!params.scattering_regime()) {
    warn("scatter: alpha <= 4 is outside the certified scattering regime");
  }
  const Trajectory traj = evolve(f, params, evolve_options(cfg));
  const ScatteringReport rep = extract_scattering_state(
      traj, cfg.physics.q, cfg.scatter.tolerance, cfg.scatter.residual_samples);

  const std::string phipath = out_path(opt, "phi_plus.json");
  save_field(phipath, rep.phi_plus);
  rec.outputs["phi_plus"] = phipath;

  json report;
  report["phi_plus_ref"] = phipath;
  report["horizon"] = rep.horizon;
  report["pass"] = rep.converged;
  json cauchy = json::array();
  for (const CauchyDefect& d : rep.cauchy_pairs) {
    cauchy.push_back({{"t1", d.t1}, {"t2", d.t2}, {"defect", d.defect},
                      {"majorant", d.majorant}});
  }
  report["cauchy"] = std::move(cauchy);
  json residuals = json::array();
  for (const auto& [t, r] : rep.residuals) residuals.push_back({{"t", t}, {"h1", r}});
  report["residuals"] = std::move(residuals);
  json tails = json::array();
  for (const auto& [T, v] : rep.tail_alpha) tails.push_back({{"T", T}, {"value", v}});
  report["tail_alpha"] = std::move(tails);
  const std::string rpath = out_path(opt, "scatter_report.json");
  write_text(rpath, report.dump(2) + "\n");
  rec.outputs["report"] = rpath;

  add_check(rec, "pullback_converged", rep.cauchy_pairs.back().defect,
            cfg.scatter.tolerance, rep.converged);
}

void run_profiles(const ExperimentConfig& cfg, const RunOptions& opt,
                  RunRecord& rec) {
  if (cfg.profiles.terms.empty()) {
    config_error("profiles.terms", "at least one profile term is required");
  }
  const Grid grid = make_grid(cfg.grid.n, cfg.grid.half_width);

  std::vector<ProfileTerm> terms;
  for (const auto& tb : cfg.profiles.terms) {
    ProfileTerm term;
    term.psi = gaussian_field(grid, tb.amplitude, tb.width, 0.0, tb.momentum);
    term.t_seq = tb.t_seq;
    term.x_seq = tb.x_seq;
    terms.push_back(std::move(term));
  }
  RemainderSpec rem;
  if (cfg.profiles.remainder == "noise") {
    rem.kind = RemainderSpec::Kind::SeededNoise;
    rem.h1_size = cfg.profiles.remainder_h1;
    rem.seed = cfg.seed;
  } else if (cfg.profiles.remainder != "none") {
    config_error("profiles.remainder", "expected none or noise");
  }

  const SyntheticFamily family = synth_family(terms, rem, cfg.physics.q);
  const PythagoreanDefects defects =
      pythagorean_defects(family, cfg.physics.q, cfg.profiles.p_list,
                          cfg.physics.alpha);

  std::ostringstream csv;
  csv << "n,identity,defect\n";
  double final_defect = 0.0;
  for (size_t row = 0; row < defects.identities.size(); ++row) {
    for (size_t n = 0; n < defects.defect[row].size(); ++n) {
      csv << n << "," << defects.identities[row] << "," << defects.defect[row][n]
          << "\n";
    }
    final_defect = std::max(final_defect, defects.defect[row].back());
  }
  const std::string cpath = out_path(opt, "defects.csv");
  write_text(cpath, csv.str());
  rec.outputs["csv"] = cpath;

  add_check(rec, "final_defect", final_defect, cfg.profiles.defect_tolerance,
            final_defect <= cfg.profiles.defect_tolerance);

  json summary;
  summary["identities"] = defects.identities;
  summary["final_defect"] = final_defect;

  if (cfg.profiles.run_greedy) {
    GreedyConfig gcfg;
    gcfg.max_profiles = cfg.profiles.max_profiles;
    gcfg.stop_threshold = cfg.profiles.stop_threshold;
    const GreedyReport rep = greedy_extract(family, cfg.physics.q, gcfg);
    json terms_out = json::array();
    for (const ProfileTerm& term : rep.decomposition.terms) {
      terms_out.push_back({{"t_seq", term.t_seq},
                           {"x_seq", term.x_seq},
                           {"psi_l2", l2_norm(term.psi)}});
    }
    summary["extracted_terms"] = std::move(terms_out);
    summary["remainder_sup"] = rep.remainder_sup;
    double rem_sup = 0.0;
    for (double s : rep.remainder_sup) rem_sup = std::max(rem_sup, s);
    add_check(rec, "remainder_sup", rem_sup, cfg.profiles.stop_threshold,
              rem_sup <= cfg.profiles.stop_threshold);
  }

  const std::string spath = out_path(opt, "extraction.json");
  write_text(spath, summary.dump(2) + "\n");
  rec.outputs["summary"] = spath;
}

void run_xval(const ExperimentConfig& cfg, const RunOptions& opt,
              RunRecord& rec) {
  const Grid grid = make_grid(cfg.grid.n, cfg.grid.half_width);
  const WaveField f = build_initial(cfg, grid);
  const std::vector<int> ladder =
      cfg.xval.sub_steps_ladder.empty() ? default_xval_ladder()
                                        : cfg.xval.sub_steps_ladder;
  const WaveField exact = delta_propagate(f, cfg.physics.q, cfg.run.t_final);

  std::vector<double> discrepancy(ladder.size());
  const int threads = std::max(1, opt.threads);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t k = next.fetch_add(1); k < ladder.size(); k = next.fetch_add(1)) {
      const WaveField cn =
          cn_propagate(f, cfg.physics.q, cfg.run.t_final, ladder[k]);
      discrepancy[k] = h1_distance(exact, cn);
    }
  };
  if (threads > 1) {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  } else {
    worker();
  }

  const double floor = discrepancy.back();
  std::ostringstream csv;
  csv << "sub_steps,h1_discrepancy,ratio\n";
  int qualifying = 0;
  bool ratios_ok = true;
  for (size_t k = 0; k < ladder.size(); ++k) {
    const double ratio = k > 0 ? discrepancy[k - 1] / discrepancy[k] : 0.0;
    csv << ladder[k] << "," << discrepancy[k] << "," << ratio << "\n";
    if (k > 0 && discrepancy[k] >= 5.0 * floor) {
      ++qualifying;
      ratios_ok = ratios_ok && ratio >= cfg.xval.ratio_low &&
                  ratio <= cfg.xval.ratio_high;
    }
  }
  const std::string cpath = out_path(opt, "xval.csv");
  write_text(cpath, csv.str());
  rec.outputs["csv"] = cpath;

  add_check(rec, "h1_discrepancy", floor, cfg.xval.discrepancy_tolerance,
            floor <= cfg.xval.discrepancy_tolerance);
  add_check(rec, "second_order_ratios", static_cast<double>(qualifying), 1.0,
            qualifying >= 1 && ratios_ok);

  json summary;
  summary["floor"] = floor;
  summary["qualifying_ratios"] = qualifying;
  const std::string spath = out_path(opt, "summary.json");
  write_text(spath, summary.dump(2) + "\n");
  rec.outputs["summary"] = spath;
}

}  // namespace

WaveField build_initial(const ExperimentConfig& cfg, const Grid& grid) {
  const auto& init = cfg.initial;
  if (init.kind == "gaussian") {
    return gaussian_field(grid, init.amplitude, init.width, init.center,
                          init.phase);
  }
  if (init.kind == "two-bump") {
    const WaveField a = gaussian_field(grid, init.amplitude, init.width,
                                       init.center - init.separation / 2.0,
                                       init.phase);
    const WaveField b = gaussian_field(grid, init.amplitude, init.width,
                                       init.center + init.separation / 2.0,
                                       -init.phase);
    return a + b;
  }
  if (init.kind == "file") {
    WaveField f = load_field(init.path);
    if (!same_grid(*f.grid, *grid)) {
      config_error("initial.path", "field grid does not match the grid block");
    }
    return f;
  }
  config_error("initial.kind", "expected gaussian, two-bump or file, got " + init.kind);
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config error: invalid json: ") + e.what());
  }
  ExperimentConfig cfg;

  if (j.contains("grid")) {
    const json& b = j["grid"];
    cfg.grid.n = get_or(b, "grid", "n", cfg.grid.n);
    cfg.grid.half_width = get_or(b, "grid", "half_width", cfg.grid.half_width);
  }
  if (cfg.grid.n < 16 || (cfg.grid.n & (cfg.grid.n - 1)) != 0) {
    config_error("grid.n", "must be a power of two >= 16");
  }
  if (!(cfg.grid.half_width > 0.0)) config_error("grid.half_width", "must be > 0");

  if (!j.contains("physics")) config_error("physics", "block is required");
  {
    const json& b = j["physics"];
    if (!b.contains("q")) config_error("physics.q", "missing");
    if (!b.contains("alpha")) config_error("physics.alpha", "missing");
    cfg.physics.q = b["q"].get<double>();
    cfg.physics.alpha = b["alpha"].get<double>();
    require_finite(cfg.physics.q, "physics.q");
    require_finite(cfg.physics.alpha, "physics.alpha");
    if (!(cfg.physics.alpha > 0.0)) config_error("physics.alpha", "must be > 0");
  }

  if (j.contains("initial")) {
    const json& b = j["initial"];
    cfg.initial.kind = get_or<std::string>(b, "initial", "kind", cfg.initial.kind);
    cfg.initial.amplitude = get_or(b, "initial", "amplitude", cfg.initial.amplitude);
    cfg.initial.width = get_or(b, "initial", "width", cfg.initial.width);
    cfg.initial.center = get_or(b, "initial", "center", cfg.initial.center);
    cfg.initial.phase = get_or(b, "initial", "phase", cfg.initial.phase);
    cfg.initial.separation = get_or(b, "initial", "separation", cfg.initial.separation);
    cfg.initial.path = get_or<std::string>(b, "initial", "path", cfg.initial.path);
    require_finite(cfg.initial.amplitude, "initial.amplitude");
    if (!(cfg.initial.width > 0.0)) config_error("initial.width", "must be > 0");
  }

  if (j.contains("run")) {
    const json& b = j["run"];
    cfg.run.t_final = get_or(b, "run", "t_final", cfg.run.t_final);
    cfg.run.dt = get_or(b, "run", "dt", cfg.run.dt);
    cfg.run.stride = get_or(b, "run", "stride", cfg.run.stride);
    cfg.run.method = get_or<std::string>(b, "run", "method", cfg.run.method);
    cfg.run.sub_steps = get_or(b, "run", "sub_steps", cfg.run.sub_steps);
    cfg.run.boundary_threshold =
        get_or(b, "run", "boundary_threshold", cfg.run.boundary_threshold);
    cfg.run.mass_tolerance = get_or(b, "run", "mass_tolerance", cfg.run.mass_tolerance);
    if (!(cfg.run.dt > 0.0)) config_error("run.dt", "must be > 0");
    if (cfg.run.t_final < 0.0) config_error("run.t_final", "must be >= 0");
    if (cfg.run.stride < 1) config_error("run.stride", "must be >= 1");
    if (cfg.run.sub_steps < 1) config_error("run.sub_steps", "must be >= 1");
    if (cfg.run.method != "exact-kernel" && cfg.run.method != "crank-nicolson") {
      config_error("run.method", "expected exact-kernel or crank-nicolson");
    }
  }

  if (j.contains("decay")) {
    const json& b = j["decay"];
    cfg.decay.t_grid = get_or(b, "decay", "t_grid", cfg.decay.t_grid);
    cfg.decay.slope_tolerance =
        get_or(b, "decay", "slope_tolerance", cfg.decay.slope_tolerance);
  }

  if (j.contains("virial")) {
    const json& b = j["virial"];
    cfg.virial.weight = get_or<std::string>(b, "virial", "weight", cfg.virial.weight);
    cfg.virial.R = get_or(b, "virial", "R", cfg.virial.R);
    cfg.virial.linear = get_or(b, "virial", "linear", cfg.virial.linear);
    cfg.virial.nonlinear_coupling =
        get_or(b, "virial", "nonlinear_coupling", cfg.virial.nonlinear_coupling);
    cfg.virial.consistency_tolerance =
        get_or(b, "virial", "consistency_tolerance", cfg.virial.consistency_tolerance);
    if (cfg.virial.weight != "pure-quadratic" && cfg.virial.weight != "quadratic-cutoff") {
      config_error("virial.weight", "expected pure-quadratic or quadratic-cutoff");
    }
  }

  if (j.contains("scatter")) {
    const json& b = j["scatter"];
    cfg.scatter.tolerance = get_or(b, "scatter", "tolerance", cfg.scatter.tolerance);
    cfg.scatter.residual_samples =
        get_or(b, "scatter", "residual_samples", cfg.scatter.residual_samples);
  }

  if (j.contains("profiles")) {
    const json& b = j["profiles"];
    if (b.contains("terms")) {
      for (size_t k = 0; k < b["terms"].size(); ++k) {
        const json& tb = b["terms"][k];
        const std::string path = "profiles.terms[" + std::to_string(k) + "]";
        ExperimentConfig::ProfileTermBlock term;
        term.amplitude = get_or(tb, path, "amplitude", term.amplitude);
        term.width = get_or(tb, path, "width", term.width);
        term.momentum = get_or(tb, path, "momentum", term.momentum);
        if (!tb.contains("t_seq")) config_error(path + ".t_seq", "missing");
        if (!tb.contains("x_seq")) config_error(path + ".x_seq", "missing");
        term.t_seq = tb["t_seq"].get<std::vector<double>>();
        term.x_seq = tb["x_seq"].get<std::vector<double>>();
        if (term.t_seq.size() != term.x_seq.size()) {
          config_error(path, "t_seq and x_seq must share one length");
        }
        cfg.profiles.terms.push_back(std::move(term));
      }
    }
    cfg.profiles.remainder =
        get_or<std::string>(b, "profiles", "remainder", cfg.profiles.remainder);
    cfg.profiles.remainder_h1 =
        get_or(b, "profiles", "remainder_h1", cfg.profiles.remainder_h1);
    cfg.profiles.p_list = get_or(b, "profiles", "p_list", cfg.profiles.p_list);
    cfg.profiles.defect_tolerance =
        get_or(b, "profiles", "defect_tolerance", cfg.profiles.defect_tolerance);
    cfg.profiles.run_greedy = get_or(b, "profiles", "run_greedy", cfg.profiles.run_greedy);
    cfg.profiles.stop_threshold =
        get_or(b, "profiles", "stop_threshold", cfg.profiles.stop_threshold);
    cfg.profiles.max_profiles =
        get_or(b, "profiles", "max_profiles", cfg.profiles.max_profiles);
  }

  if (j.contains("xval")) {
    const json& b = j["xval"];
    cfg.xval.sub_steps_ladder =
        get_or(b, "xval", "sub_steps_ladder", cfg.xval.sub_steps_ladder);
    cfg.xval.discrepancy_tolerance =
        get_or(b, "xval", "discrepancy_tolerance", cfg.xval.discrepancy_tolerance);
    cfg.xval.ratio_low = get_or(b, "xval", "ratio_low", cfg.xval.ratio_low);
    cfg.xval.ratio_high = get_or(b, "xval", "ratio_high", cfg.xval.ratio_high);
  }

  cfg.seed = get_or(j, "", "seed", cfg.seed);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::string config_hash(const std::string& text) {
  // FNV-1a over the canonical reserialization
  const std::string canon = json::parse(text).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunRecord::to_json() const {
  json j;
  j["subcommand"] = subcommand;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["started"] = started;
  j["finished"] = finished;
  j["outputs"] = outputs;
  json checks_out;
  for (const auto& [name, c] : checks) {
    checks_out[name] = {{"measured", c.measured}, {"threshold", c.threshold},
                        {"pass", c.pass}};
  }
  j["checks"] = std::move(checks_out);
  j["warnings"] = warnings;
  j["pass"] = pass;
  return j.dump(2) + "\n";
}

RunRecord record_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunRecord rec;
  rec.subcommand = j.at("subcommand").get<std::string>();
  rec.config_hash = j.at("config_hash").get<std::string>();
  rec.seed = j.at("seed").get<std::uint64_t>();
  rec.started = j.value("started", "");
  rec.finished = j.value("finished", "");
  if (j.contains("outputs")) {
    rec.outputs = j["outputs"].get<std::map<std::string, std::string>>();
  }
  if (j.contains("checks")) {
    for (auto it = j["checks"].begin(); it != j["checks"].end(); ++it) {
      CheckResult c;
      c.measured = it.value()["measured"].get<double>();
      c.threshold = it.value()["threshold"].get<double>();
      c.pass = it.value()["pass"].get<bool>();
      rec.checks[it.key()] = c;
    }
  }
  rec.warnings = j.value("warnings", 0);
  rec.pass = j.at("pass").get<bool>();
  return rec;
}

RunRecord run_subcommand(const std::string& name, const std::string& config_path,
                         const RunOptions& options) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config: " + config_path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  ExperimentConfig cfg = parse_config(text);
  if (options.seed_overridden) cfg.seed = options.seed;

  RunRecord rec;
  rec.subcommand = name;
  rec.config_hash = config_hash(text);
  rec.seed = cfg.seed;
  rec.started = timestamp();

  WarningScope warnings;
  if (name == "propagate") {
    run_propagate(cfg, options, rec);
  } else if (name == "evolve") {
    run_evolve(cfg, options, rec);
  } else if (name == "decay") {
    run_decay(cfg, options, rec);
  } else if (name == "virial") {
    run_virial(cfg, options, rec);
  } else if (name == "scatter") {
    run_scatter(cfg, options, rec);
  } else if (name == "profiles") {
    run_profiles(cfg, options, rec);
  } else if (name == "xval") {
    run_xval(cfg, options, rec);
  } else {
    throw std::invalid_argument("unknown subcommand: " + name);
  }

  rec.warnings = warnings.count;
  if (options.strict && rec.warnings > 0) {
    add_check(rec, "no_warnings", rec.warnings, 0.0, false);
  }
  rec.finished = timestamp();

  const std::string rpath = out_path(options, name + ".runrecord.json");
  write_text(rpath, rec.to_json());
  return rec;
}

ReportResult build_report(const std::vector<std::string>& record_paths) {
  ReportResult result;
  std::ostringstream out;
  if (record_paths.empty()) {
    out << "no runs\n";
    result.table = out.str();
    return result;
  }
  out << "subcommand    check                        measured      threshold     verdict\n";
  out << "---------------------------------------------------------------------------\n";
  for (const std::string& path : record_paths) {
    std::ifstream in(path);
    if (!in) {
      out << "missing record: " << path << "\n";
      result.pass = false;
      continue;
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    const RunRecord rec = record_from_json(text);
    for (const auto& [cname, c] : rec.checks) {
      char line[160];
      std::snprintf(line, sizeof(line), "%-13s %-28s %-13.6g %-13.6g %s\n",
                    rec.subcommand.c_str(), cname.c_str(), c.measured, c.threshold,
                    c.pass ? "pass" : "FAIL");
      out << line;
      result.pass = result.pass && c.pass;
    }
  }
  out << (result.pass ? "overall: pass\n" : "overall: FAIL\n");
  result.table = out.str();
  return result;
}

}  // namespace deltanls::cli
