#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "subdif/solver.hpp"

namespace subdif {

enum class RunMode { Solve, VerifySuite, Convergence, ContractionPair, KernelLab };

/// Batch experiment description, parsed from a JSON file. Presets keep the
/// configs small; numeric fields are validated by the owning modules.
struct ExperimentConfig {
    RunMode mode = RunMode::Solve;
    std::uint64_t seed = 0;

    // problem block
    double length = 1.0;
    int cells = 64;
    double horizon = 1.0;
    int steps = 256;
    KernelPair kernel;
    std::string coeff_preset = "constant";  // constant | piecewise
    double coeff_value = 1.0;
    double coeff_left = 0.1, coeff_right = 1.0, coeff_split = 0.5;
    double coeff_time_amplitude = 0.0;
    std::string phi_preset = "linear";  // linear | pme
    double phi_exponent = 3.0;
    std::string initial_preset = "sine";  // sine | bump | constant | piecewise
    double initial_amplitude = 1.0;
    double initial_lo = 0.25, initial_hi = 0.75;
    std::string forcing_preset = "zero";  // zero | constant | sine | bump
    double forcing_amplitude = 0.0;
    std::string forcing_time = "constant";  // constant | sine

    // convergence block
    int doublings = 3;

    // kernel_lab block
    std::vector<double> gammas = {0.1, 1.0, 10.0};

    SolverConfig solver;

    std::string output_dir;                             // may be overridden
    std::vector<std::string> formats = {"csv", "json"};

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);

    ProblemSpec build_problem() const;
    bool forcing_is_zero() const { return forcing_preset == "zero" || forcing_amplitude == 0.0; }
};

struct RunResult {
    int exit_code = 0;
    std::map<std::string, double> metrics;  // headline values for sweep aggregation
};

/// Executes one experiment, writing solution.csv / report.json / summary.txt
/// into out_dir as applicable. Deterministic given the seed.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, bool quiet);

/// CLI entry: parse config at path, apply overrides, run. Returns the exit
/// code (verify_suite: number of failed checks).
int run(const std::string& config_path, const std::string& out_override = {},
        std::int64_t seed_override = -1, bool quiet = false);

/// Independent experiments for each value of the dotted config field
/// `parameter` (e.g. "problem.kernel.alpha"), run concurrently, one output
/// subdirectory per value plus an aggregate CSV of headline metrics.
int sweep(const std::string& config_path, const std::string& parameter,
          const std::vector<double>& values, const std::string& out_override = {},
          std::int64_t seed_override = -1, bool quiet = false);

/// Default output directory: $SUBDIF_OUT_DIR or "out".
std::string default_output_dir();

}  // namespace subdif
