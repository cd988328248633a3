#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deltanls/nls.hpp"

namespace deltanls::cli {

struct ExperimentConfig {
  struct GridBlock {
    int n = 4096;
    double half_width = 40.0;
  } grid;

  struct PhysicsBlock {
    double q = 1.0;
    double alpha = 5.0;
  } physics;

  struct InitialBlock {
    std::string kind = "gaussian";  // gaussian | two-bump | file
    double amplitude = 1.0;
    double width = 1.0;
    double center = 0.0;
    double phase = 0.0;       // linear phase coefficient (momentum boost)
    double separation = 10.0;  // two-bump only
    std::string path;          // file only
  } initial;

  struct RunBlock {
    double t_final = 1.0;
    double dt = 1e-3;
    int stride = 10;
    std::string method = "exact-kernel";  // exact-kernel | crank-nicolson
    int sub_steps = 1;
    double boundary_threshold = 1e-8;
    double mass_tolerance = 1e-6;
  } run;

  struct DecayBlock {
    std::vector<double> t_grid;  // empty -> 12 points log-spaced on [5, 50]
    double slope_tolerance = 0.05;
  } decay;

  struct VirialBlock {
    std::string weight = "pure-quadratic";  // or quadratic-cutoff
    double R = 8.0;
    bool linear = false;            // sample the linear group instead
    double nonlinear_coupling = 1.0;
    double consistency_tolerance = 1e-6;
  } virial;

  struct ScatterBlock {
    double tolerance = 1e-3;
    int residual_samples = 12;
  } scatter;

  struct ProfileTermBlock {
    double amplitude = 1.0;
    double width = 1.0;
    double momentum = 0.0;
    std::vector<double> t_seq;
    std::vector<double> x_seq;
  };
  struct ProfilesBlock {
    std::vector<ProfileTermBlock> terms;
    std::string remainder = "none";  // none | noise
    double remainder_h1 = 0.0;
    std::vector<double> p_list = {4.0, 7.0};
    double defect_tolerance = 0.02;
    bool run_greedy = true;
    double stop_threshold = 0.05;
    int max_profiles = 3;
  } profiles;

  struct XvalBlock {
    std::vector<int> sub_steps_ladder;  // empty -> {8,...,4096}
    double discrepancy_tolerance = 1e-3;
    double ratio_low = 3.5;
    double ratio_high = 4.5;
  } xval;

  std::uint64_t seed = 0;
};

// Parses and validates; error messages name the offending field path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_hash(const std::string& json_text);

struct CheckResult {
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct RunRecord {
  std::string subcommand;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string started;
  std::string finished;
  std::map<std::string, std::string> outputs;  // label -> path
  std::map<std::string, CheckResult> checks;
  int warnings = 0;
  bool pass = true;

  std::string to_json() const;
};
RunRecord record_from_json(const std::string& text);

struct RunOptions {
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_overridden = false;
  int threads = 1;
  bool strict = false;
};

RunRecord run_subcommand(const std::string& name, const std::string& config_path,
                         const RunOptions& options);

// Aggregates run records into a human-readable table; returns the overall
// verdict (false when any check failed or a record is missing).
struct ReportResult {
  std::string table;
  bool pass = true;
};
ReportResult build_report(const std::vector<std::string>& record_paths);

WaveField build_initial(const ExperimentConfig& cfg, const Grid& grid);

}  // namespace deltanls::cli
