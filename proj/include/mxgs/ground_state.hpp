#pragma once

#include "mxgs/functionals.hpp"
#include "mxgs/grid.hpp"
#include "mxgs/symbol.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace mxgs {

struct SolverConfig {
    int max_iterations = 4000;
    double nehari_tol = 1e-8;    // relative Nehari residual
    double step_tol = 1e-10;     // successive-iterate change, relative to ||u||_inf
    bool symmetrize = true;      // average over the grid symmetry group every iteration
    bool force_fallback = false; // skip Petviashvili and run the normalized gradient flow
    double fallback_tau = 0.5;
    int fallback_max_iterations = 20000;
    bool keep_log = true;
};

struct IterationRecord {
    int iteration;
    double nehari_rel;
    double step;
    double stabilizer;  // Petviashvili M, or the level lambda(v) for the gradient flow
};

struct GroundStateResult {
    RealField field;
    SymbolParams params;
    double lambda_s = 0.0;
    EnergyBreakdown breakdown;
    double residual_linf = 0.0;  // || A u - |u|^p u ||_inf
    double nehari_rel = 0.0;     // |nehari_defect| / ||u||_s^2
    int iterations = 0;
    bool converged = false;
    std::string method;          // "petviashvili", "gradient_flow", "continuation", "loaded"
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double monotonicity_defect = 0.0;
    std::vector<IterationRecord> log;

    double s() const { return params.s; }
    double p() const { return params.p; }
};

/// Gaussian exp(-|x|^2) scaled to unit L^{p+2} norm.
RealField default_initial_guess(const GridSpec& grid, double p);

/// Ground state of (shift - Laplacian + (-Laplacian)^s) u = |u|^p u on `grid`.
/// Petviashvili iteration, with a normalized gradient flow on J as fallback.
/// Non-convergence returns the best iterate with converged = false; a zero
/// initial guess or collapse to zero throws CollapseError.
GroundStateResult solve_ground_state(const SymbolParams& params, const GridSpec& grid,
                                     const std::optional<RealField>& init = std::nullopt,
                                     const SolverConfig& config = {});

/// Fills the derived quantities of a result from its field and params.
void finalize_result(GroundStateResult& r);

struct SymmetrizeReport {
    RealField field;
    std::array<int, 3> max_index{0, 0, 0};  // storage index of the maximum before the shift
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double monotonicity_defect = 0.0;       // largest increase along a ray, relative to max
};

/// Average over axis reflections (and axis permutations for n >= 2).
RealField symmetrize(const RealField& f);

/// Shifts the maximum (ties: smallest storage index) to the origin, then symmetrizes.
SymmetrizeReport recenter_symmetrize(const RealField& f);

/// Largest increase of f moving away from the origin along the coordinate
/// axes and diagonals, relative to max |f|.
double monotonicity_defect(const RealField& f);

/// H^1 distance between two states after recentering both.
double h1_distance(const RealField& a, const RealField& b, bool recenter = true);

}  // namespace mxgs
