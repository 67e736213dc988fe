#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "randmoll/distribution.hpp"
#include "randmoll/grid.hpp"
#include "randmoll/profile.hpp"
#include "randmoll/report.hpp"

namespace randmoll {

/// Everything an experiment run needs; all referenced names must resolve in
/// the profile/family/function catalogs. The seed feeds every Monte Carlo
/// path, so identical configs reproduce identical payloads.
struct ExperimentConfig {
    std::string experiment = "convergence";
    std::string name;  // output directory name; derived from the fields when empty

    std::string profile = "indicator";
    std::map<std::string, double> profile_params;
    bool profile_normalize = true;

    std::string family = "uniform-variance";
    std::map<std::string, double> family_params;

    std::string function = "cosine-packet";
    std::map<std::string, double> function_params;

    int dimension = 1;
    double box_lo = -4, box_hi = 4;
    int resolution = 1024;
    int horizon = 64;
    std::uint64_t seed = 1;
    std::string path = "fft";  // direct | fft | monte-carlo
    bool svg = false;
    bool allow_bounded_control = false;  // lets divergence run a bounded-density control
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& file_path);
std::string canonical_text(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

struct ExperimentTable {
    std::string title;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
    std::string name;
    std::string claim;    // the mathematical statement the run exercises
    std::string verdict;  // converges | non-converging | hypothesis-unmet | ...
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<ConditionReport> conditions;
    std::vector<ExperimentTable> tables;
    double runtime_ms = 0;  // never serialized into CSV payloads

    bool failed() const;
};

/// Dispatch on cfg.experiment. Known experiments: convergence,
/// ae-convergence, divergence, vague, density-hypotheses, gradient-bound,
/// moment, zo, domination, weak-type, dyadic, mass.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

ExperimentReport convergence_experiment(const ExperimentConfig& cfg);
ExperimentReport ae_convergence_experiment(const ExperimentConfig& cfg);
ExperimentReport divergence_experiment(const ExperimentConfig& cfg);

/// The stock batch: one run per hypothesis check the maximal-operator theory
/// needs, plus the convergence and divergence studies.
std::vector<ExperimentConfig> default_suite();

void write_report(const ExperimentReport& report, const std::string& dir, bool svg);
/// Runs every config, writes reports under out_dir/<name>/, prints one
/// verdict line each. Exit code: 0 all pass, 1 any failure, 2 config error.
int run_suite(const std::vector<ExperimentConfig>& configs, const std::string& out_dir);

// catalog resolution shared with the CLI
Profile resolve_profile(const ExperimentConfig& cfg);
FamilySpec resolve_family(const ExperimentConfig& cfg);
CatalogFunction resolve_function(const ExperimentConfig& cfg);

}  // namespace randmoll
