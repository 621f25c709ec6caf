#include "mxgs/linear_solvers.hpp"

#include "mxgs/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mxgs {

BlockOp columnwise(const VectorOp& op) {
    return [op](const Eigen::MatrixXd& X) {
        Eigen::MatrixXd Y(X.rows(), X.cols());
        for (Eigen::Index j = 0; j < X.cols(); ++j) Y.col(j) = op(X.col(j));
        return Y;
    };
}

namespace {

Eigen::MatrixXd apply_or_identity(const BlockOp& op, const Eigen::MatrixXd& X) { return op ? op(X) : X; }

// B-orthonormalizes the columns of S (SVQB with a drop tolerance). Returns the
// transformed basis and its images under B.
void svqb(Eigen::MatrixXd& S, Eigen::MatrixXd& BS, const BlockOp& B) {
    for (int pass = 0; pass < 2; ++pass) {
        BS = apply_or_identity(B, S);
        Eigen::MatrixXd G = S.transpose() * BS;
        G = 0.5 * (G + G.transpose());
        Eigen::VectorXd d = G.diagonal().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
        Eigen::MatrixXd Gs = d.asDiagonal() * G * d.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Gs);
        const Eigen::VectorXd& th = es.eigenvalues();
        const double cut = 1e-12 * th.maxCoeff();
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < th.size(); ++i)
            if (th[i] > cut) keep.push_back(i);
        Eigen::MatrixXd C(S.cols(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t k = 0; k < keep.size(); ++k)
            C.col(static_cast<Eigen::Index>(k)) = d.asDiagonal() * es.eigenvectors().col(keep[k]) / std::sqrt(th[keep[k]]);
        S = S * C;
        BS = BS * C;
    }
}

void remove_constraints(Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const Eigen::MatrixXd& BY) {
    if (Y.cols() == 0) return;
    X -= Y * (BY.transpose() * X);
}

}  // namespace

LobpcgResult lobpcg(const BlockOp& A, const BlockOp& B, const BlockOp& T, Eigen::Index rows,
                    const LobpcgOptions& opt, const BlockOp& project) {
    const Eigen::Index m = opt.wanted;
    const Eigen::Index k = m + opt.guard;
    if (m < 1 || k > rows / 2) throw InvalidArgument("lobpcg block size out of range");

    // Constraint basis, B-orthonormalized.
    Eigen::MatrixXd Y = opt.constraints;
    Eigen::MatrixXd BY;
    if (Y.cols() > 0) svqb(Y, BY, B);

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd X(rows, k);
    for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) X(i, j) = normal(rng);
    if (project) X = project(X);
    remove_constraints(X, Y, BY);

    auto precondition = [&](const Eigen::MatrixXd& R) {
        Eigen::MatrixXd W = apply_or_identity(T, R);
        if (project) W = project(W);
        remove_constraints(W, Y, BY);
        return W;
    };

    Eigen::MatrixXd BX;
    svqb(X, BX, B);
    if (X.cols() < k) throw ComputeError("lobpcg initial block is rank deficient");
    Eigen::MatrixXd AX = A(X);
    {
        Eigen::MatrixXd H = X.transpose() * AX;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
        X = X * es.eigenvectors();
        AX = AX * es.eigenvectors();
        BX = BX * es.eigenvectors();
    }
    Eigen::VectorXd mu(k);
    Eigen::MatrixXd P;

    LobpcgResult out;
    for (int it = 0; it < opt.max_iterations; ++it) {
        for (Eigen::Index j = 0; j < k; ++j) mu[j] = X.col(j).dot(AX.col(j));
        Eigen::MatrixXd R = AX - BX * mu.asDiagonal();
        // Residual of the constrained problem: drop the Lagrange-multiplier direction B Y.
        if (Y.cols() > 0) R -= BY * (Y.transpose() * R);
        Eigen::VectorXd res(k);
        for (Eigen::Index j = 0; j < k; ++j) res[j] = R.col(j).norm() / X.col(j).norm();
        out.iterations = it;
        if ((res.head(m).array() <= opt.tol).all()) {
            out.converged = true;
            break;
        }
        Eigen::MatrixXd W = precondition(R);
        Eigen::MatrixXd S(rows, X.cols() + W.cols() + P.cols());
        S.leftCols(X.cols()) = X;
        S.middleCols(X.cols(), W.cols()) = W;
        if (P.cols() > 0) S.rightCols(P.cols()) = P;
        Eigen::MatrixXd BS;
        // Rounding reintroduces constrained components; strip them before and after orthonormalizing.
        remove_constraints(S, Y, BY);
        svqb(S, BS, B);
        if (Y.cols() > 0) {
            remove_constraints(S, Y, BY);
            svqb(S, BS, B);
        }
        Eigen::MatrixXd AS = A(S);
        Eigen::MatrixXd H = S.transpose() * AS;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
        const Eigen::MatrixXd C = es.eigenvectors().leftCols(k);
        Eigen::MatrixXd Xn = S * C;
        Eigen::MatrixXd BXn = BS * C;
        Eigen::MatrixXd AXn = AS * C;
        // New search direction: part of the update B-orthogonal to the old block.
        P = Xn - X * (BX.transpose() * Xn);
        X = std::move(Xn);
        BX = std::move(BXn);
        AX = std::move(AXn);
    }
    for (Eigen::Index j = 0; j < k; ++j) mu[j] = X.col(j).dot(AX.col(j));
    Eigen::MatrixXd R = AX - BX * mu.asDiagonal();
    if (Y.cols() > 0) R -= BY * (Y.transpose() * R);
    out.values = mu.head(m);
    out.vectors = X.leftCols(m);
    out.residuals.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) out.residuals[j] = R.col(j).norm() / X.col(j).norm();
    out.converged = (out.residuals.array() <= opt.tol).all();
    return out;
}

MinresResult minres(const VectorOp& A, const VectorOp& prec, const Eigen::VectorXd& b, double tol,
                    int max_iterations, const VectorOp& project) {
    auto M = [&](const Eigen::VectorXd& r) {
        Eigen::VectorXd y = prec ? prec(r) : r;
        return project ? project(y) : y;
    };
    const Eigen::Index n = b.size();
    MinresResult out;
    out.x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r1 = b;
    Eigen::VectorXd y = M(r1);
    const double beta1 = std::sqrt(std::max(r1.dot(y), 0.0));
    if (beta1 == 0.0) {
        out.converged = true;
        return out;
    }
    Eigen::VectorXd r2 = r1;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n), w1(n), w2 = Eigen::VectorXd::Zero(n);
    double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1, cs = -1.0, sn = 0.0;
    for (int it = 1; it <= max_iterations; ++it) {
        const Eigen::VectorXd v = y / beta;
        y = A(v);
        if (it >= 2) y -= (beta / oldb) * r1;
        const double alfa = v.dot(y);
        y -= (alfa / beta) * r2;
        r1 = r2;
        r2 = y;
        y = M(r2);
        oldb = beta;
        beta = std::sqrt(std::max(r2.dot(y), 0.0));
        const double oldeps = epsln;
        const double delta = cs * dbar + sn * alfa;
        const double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        const double gamma = std::max(std::hypot(gbar, beta), std::numeric_limits<double>::epsilon());
        cs = gbar / gamma;
        sn = beta / gamma;
        const double phi = cs * phibar;
        phibar *= sn;
        w1 = w2;
        w2 = w;
        w = (v - oldeps * w1 - delta * w2) / gamma;
        out.x += phi * w;
        out.iterations = it;
        out.relative_residual = phibar / beta1;
        if (out.relative_residual < tol || beta == 0.0) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace mxgs
