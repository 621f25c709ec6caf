#pragma once

#include "mxgs/continuation.hpp"
#include "mxgs/ground_state.hpp"
#include "mxgs/spectrum.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mxgs {

enum class Experiment { solve, sweep, spectrum, kernel, kato, decay, continuation };

std::string to_string(Experiment e);
/// Throws InvalidArgument for an unknown name.
Experiment experiment_from_string(const std::string& name);

struct RunConfig {
    Experiment experiment = Experiment::solve;
    int n = 1;
    double s = 0.5;
    std::vector<double> s_values;  // sweep nodes
    double p = 2.0;
    int N = 4096;
    double L = 40.0;

    SolverConfig solver;
    ContinuationConfig continuation;

    std::string output_dir = "out";
    std::uint64_t seed = 20240607;
    int threads = 1;

    // Experiments that need a ground state load it from here when set.
    std::string state_path;

    // spectrum
    int m = 6;
    Sector sector = Sector::full;
    bool compute_radial_gap = true;
    bool dump_eigenvectors = false;

    // kernel
    std::string kernel_kind = "heat";  // "heat", "resolvent" or "both"
    std::vector<double> radii{0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0};
    std::vector<double> times{0.01, 0.1, 1.0, 10.0};
    double kernel_lambda = 1.0;

    // kato
    std::vector<double> betas{1.0, 10.0, 100.0};

    // decay
    double tail_step = 0.5;
    double fit_r_min = 8.0;
    double fit_r_max = 0.0;  // 0: L/2

    // continuation
    double s_target = 0.45;
    bool scratch_check = true;
};

/// Parses a JSON config. Unknown keys and out-of-range values throw InvalidArgument.
/// Keys absent from the document keep their defaults.
RunConfig parse_config(const std::string& json_text, const RunConfig& defaults = {});

/// Canonical JSON of the numerical configuration (output directory excluded).
std::string canonical_config(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

/// Checks every precondition that can be checked before computing. Throws InvalidArgument.
void validate_config(const RunConfig& cfg);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitComputeError = 3;

struct RunOutcome {
    int status = kExitOk;
    std::vector<std::string> files;  // written, relative to the output directory
    std::string error;
};

/// Runs one experiment and writes results.json, CSV tables, field dumps and
/// manifest.json into cfg.output_dir. Failures write error.json.
RunOutcome run(const RunConfig& cfg);

// Table emitters (shared by run and usable on their own).
void emit_lambda_curve(const std::filesystem::path& path, const ContinuationTrace& trace, const std::string& hash = {});
void emit_eigenvalues(const std::filesystem::path& path, const SpectrumReport& report, const std::string& hash = {});
void emit_continuation_steps(const std::filesystem::path& path, const std::vector<ContinuationStep>& steps,
                             double sigma, const std::string& hash = {});

}  // namespace mxgs
