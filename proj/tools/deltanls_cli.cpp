#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "runners.hpp"

int main(int argc, char** argv) {
  CLI::App app{"spectral simulator and verification harness for the 1-D "
               "defocusing NLS with a repulsive delta potential"};
  app.require_subcommand(1);

  deltanls::cli::RunOptions options;
  std::string config_path;
  std::uint64_t seed = 0;

  const std::vector<std::string> experiment_names = {
      "propagate", "evolve", "scatter", "virial", "decay", "profiles", "xval"};
  std::vector<CLI::App*> experiments;
  for (const std::string& name : experiment_names) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " pipeline");
    sub->add_option("--config", config_path, "experiment config (json)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", options.out_dir, "output directory");
    sub->add_option("--seed", seed, "seed override for randomized remainders");
    sub->add_option("--threads", options.threads, "worker threads for sweeps");
    sub->add_flag("--strict", options.strict, "promote warnings to failures");
    experiments.push_back(sub);
  }

  CLI::App* report = app.add_subcommand("report", "aggregate run records");
  std::vector<std::string> record_paths;
  std::string report_out;
  report->add_option("records", record_paths, "run record json files");
  report->add_option("--out", report_out, "also write the summary table here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (report->parsed()) {
      const deltanls::cli::ReportResult result =
          deltanls::cli::build_report(record_paths);
      std::fputs(result.table.c_str(), stdout);
      if (!report_out.empty()) {
        std::FILE* f = std::fopen(report_out.c_str(), "w");
        if (!f) throw std::runtime_error("cannot open " + report_out);
        std::fputs(result.table.c_str(), f);
        std::fclose(f);
      }
      return result.pass ? 0 : 1;
    }
    for (size_t k = 0; k < experiments.size(); ++k) {
      if (!experiments[k]->parsed()) continue;
      for (const CLI::Option* opt : experiments[k]->get_options()) {
        if (opt->get_name() == "--seed" && opt->count() > 0) {
          options.seed = seed;
          options.seed_overridden = true;
        }
      }
      const deltanls::cli::RunRecord rec =
          deltanls::cli::run_subcommand(experiment_names[k], config_path, options);
      for (const auto& [name, check] : rec.checks) {
        std::printf("%-28s measured=%-12.6g threshold=%-12.6g %s\n", name.c_str(),
                    check.measured, check.threshold, check.pass ? "pass" : "FAIL");
      }
      std::printf("%s: %s\n", experiment_names[k].c_str(),
                  rec.pass ? "pass" : "FAIL");
      return rec.pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
