#pragma once

#include "mxgs/ground_state.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mxgs {

struct ContinuationConfig {
    double picard_tol = 1e-12;   // ||w_{k+1} - w_k||_s relative to ||u_sigma||_s
    int max_picard = 100;
    double inner_tol = 1e-10;    // MINRES relative residual
    int inner_max_iterations = 3000;
    double min_step = 1.0 / 1024.0;  // smallest |s - sigma| the adaptive loop will try
    double residual_tol = 1e-8;  // Euler-Lagrange residual relative to ||u||_inf
    int scratch_every = 1;       // independent solve every k-th sweep node (0: never)
    bool endpoint_distances = true;
    int threads = 1;
    SolverConfig solver;
};

struct ContinuationStep {
    GroundStateResult result;
    double norm_w = 0.0;               // ||w||_s
    double contraction_estimate = 0.0; // largest ratio of successive Picard differences
    int picard_iterations = 0;
    int inner_iterations = 0;          // total MINRES iterations
    bool accepted = false;
    std::string rejection;             // reason when not accepted
};

/// Transports the state at sigma = anchor.s() to s_target by solving the fixed
/// point equation w = J^{-1}(N(w) - R0), where J is the derivative of the
/// s_target equation at u_sigma, R0 its residual at u_sigma and N the
/// superlinear remainder, by Picard iteration. Inner solves run MINRES in the
/// symmetric sector with the free operator as preconditioner.
ContinuationStep continuation_step(const GroundStateResult& anchor, double s_target, const ContinuationConfig& config = {});

/// Repeats continuation_step with step halving until s_target is reached.
/// Returns every accepted intermediate step (the last one lands on s_target).
/// Throws ComputeError when the step falls below config.min_step.
std::vector<ContinuationStep> advance(const GroundStateResult& anchor, double s_target, const ContinuationConfig& config = {});

struct ContinuationRecord {
    double s = 0.0;
    double lambda_s = 0.0;
    double norm_w = 0.0;
    double contraction_estimate = 0.0;
    int substeps = 0;
    GroundStateResult result;
    std::optional<double> scratch_h1;    // ||u_continued - u_scratch||_{H^1}
    std::optional<double> scratch_lambda;
    std::optional<double> endpoint_h1;   // ||u_s - u_endpoint||_{H^1}
};

struct ContinuationTrace {
    std::vector<ContinuationRecord> records;
    int direction = 0;  // -1 toward s = 0, +1 toward s = 1, 0 for a single node
    GroundStateResult anchor;
    std::optional<GroundStateResult> endpoint;
    bool failed = false;
    std::string failure;
};

/// Continuation through an ordered list of s values, with independent
/// from-scratch solves every k-th node and distances to the endpoint state.
/// A failing node ends the sweep; the partial trace is returned with failed set.
ContinuationTrace sweep_s(const std::vector<double>& s_values, const SymbolParams& params, const GridSpec& grid,
                          const ContinuationConfig& config = {});

}  // namespace mxgs
