#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>

namespace mxgs {

/// Column-wise linear map on a block of vectors.
using BlockOp = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;
using VectorOp = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LobpcgOptions {
    int wanted = 4;           // eigenpairs to converge
    int guard = 2;            // extra block columns
    int max_iterations = 1000;
    double tol = 1e-9;        // ||A x - mu B x|| <= tol * ||x|| (Euclidean, B-normalized x)
    std::uint64_t seed = 20240607;
    Eigen::MatrixXd constraints;  // columns to stay B-orthogonal to (may be empty)
};

struct LobpcgResult {
    Eigen::VectorXd values;     // ascending, size wanted
    Eigen::MatrixXd vectors;    // B-orthonormal columns
    Eigen::VectorXd residuals;  // ||A x - mu B x|| / ||x||
    int iterations = 0;
    bool converged = false;
};

/// Lowest eigenpairs of the symmetric pencil (A, B) by LOBPCG with
/// preconditioner T. `B` may be empty (identity). `project` is applied to every
/// search direction (e.g. a symmetry-sector projection) and may be empty.
/// Deterministic for a fixed seed.
LobpcgResult lobpcg(const BlockOp& A, const BlockOp& B, const BlockOp& T, Eigen::Index rows,
                    const LobpcgOptions& options, const BlockOp& project = {});

struct MinresResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double relative_residual = 0.0;  // preconditioned residual estimate / initial
    bool converged = false;
};

/// Preconditioned MINRES for symmetric (possibly indefinite) A with symmetric
/// positive definite preconditioner M^{-1}. `project` (optional) is applied to
/// each preconditioned Lanczos vector to keep the iteration in an invariant subspace.
MinresResult minres(const VectorOp& A, const VectorOp& prec, const Eigen::VectorXd& b, double tol = 1e-10,
                    int max_iterations = 2000, const VectorOp& project = {});

/// Applies a column map built from a vector map.
BlockOp columnwise(const VectorOp& op);

}  // namespace mxgs
