#pragma once

#include "mxgs/ground_state.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mxgs {

enum class Sector { full, even, odd, radial };

std::string to_string(Sector s);
Sector sector_from_string(const std::string& name);

/// Linearized operator (shift - Laplacian + (-Laplacian)^s) v - (p+1)|u|^p v about a state.
class LinearizedOperator {
public:
    explicit LinearizedOperator(const GroundStateResult& state);

    const GridSpec& grid() const { return grid_; }
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    /// Free part only, (shift - Laplacian + (-Laplacian)^s) v.
    Eigen::VectorXd apply_free(const Eigen::VectorXd& v) const;
    /// Inverse of the free part (the preconditioner).
    Eigen::VectorXd apply_free_inverse(const Eigen::VectorXd& v) const;
    const Eigen::VectorXd& potential() const { return potential_; }

private:
    GridSpec grid_;
    Multiplier free_;
    Multiplier free_inv_;
    Eigen::VectorXd potential_;  // (p+1)|u|^p
};

RealField apply_L(const GroundStateResult& state, const RealField& v);

/// (v(x) + v(-x))/2 or (v(x) - v(-x))/2. Only for n = 1.
RealField sector_project(const RealField& v, Sector sector);

struct SpectrumOptions {
    int m = 4;
    Sector sector = Sector::full;
    double tol_eig = 1e-9;
    double tol_ker = 1e-4;
    double tol_neg = 1e-6;
    int max_iterations = 2000;
    std::uint64_t seed = 20240607;
    bool deflate_translations = false;  // keep the search L2-orthogonal to the d_i u
};

struct SpectrumReport {
    std::vector<double> eigenvalues;  // ascending
    std::vector<RealField> eigenvectors;
    std::vector<double> residuals;    // ||L v - mu v||_2 / ||v||_2
    int morse_index = 0;
    std::vector<int> kernel_candidates;
    std::vector<double> translation_overlaps;  // per kernel candidate, in [0, 1]
    std::vector<std::string> sector_labels;    // n = 1: "even", "odd" or "mixed"
    std::optional<double> radial_gap;
    Sector sector = Sector::full;
    std::uint64_t seed = 0;
    int iterations = 0;
    bool converged = false;
    double tol_ker = 1e-4;
    double tol_neg = 1e-6;
};

/// Lowest eigenpairs of the linearized operator in a symmetry sector (LOBPCG,
/// free-operator preconditioner, deterministic seed).
SpectrumReport eigen_lowest(const GroundStateResult& state, int m, Sector sector = Sector::full,
                            const SpectrumOptions& options = {});
SpectrumReport eigen_lowest(const GroundStateResult& state, const SpectrumOptions& options);

struct KernelSummary {
    int morse_index = 0;
    int kernel_dim = 0;
    std::vector<double> translation_overlaps;  // per kernel candidate: ||P v||^2 / ||v||^2
    std::vector<double> derivative_capture;    // per axis: fraction of d_i u inside the kernel span
    double unexplained = 0.0;                  // largest 1 - overlap over kernel candidates
    std::vector<int> ambiguous;                // eigenvalue indices within a factor 10 of a threshold
};

/// Morse index, kernel dimension and comparison of the kernel with the translation modes.
KernelSummary morse_and_kernel_report(const SpectrumReport& report, const GroundStateResult& state);

/// Spectral derivatives d_i u, one per axis.
std::vector<RealField> translation_modes(const GroundStateResult& state);

struct RadialGap {
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// inf <L phi, phi> / <phi, phi>_s over symmetric phi with <phi, u>_s = 0.
RadialGap radial_gap(const GroundStateResult& state, const SpectrumOptions& options = {});

/// <L phi, phi>_{L2} and ||phi||_s^2 for one field.
std::pair<double, double> generalized_rayleigh(const GroundStateResult& state, const RealField& phi);

/// Removes the <.,.>_s component along u.
RealField project_s_orthogonal(const GroundStateResult& state, const RealField& phi);

}  // namespace mxgs
