#include "mxgs/spectrum.hpp"

#include "mxgs/error.hpp"
#include "mxgs/inner.hpp"
#include "mxgs/linear_solvers.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace mxgs {

std::string to_string(Sector s) {
    switch (s) {
        case Sector::full: return "full";
        case Sector::even: return "even";
        case Sector::odd: return "odd";
        case Sector::radial: return "radial";
    }
    return "full";
}

Sector sector_from_string(const std::string& name) {
    if (name == "full") return Sector::full;
    if (name == "even") return Sector::even;
    if (name == "odd") return Sector::odd;
    if (name == "radial") return Sector::radial;
    throw InvalidArgument("unknown sector '" + name + "'");
}

namespace {

Eigen::VectorXd potential_of(const GroundStateResult& state) {
    const double p = state.params.p;
    return state.field.values.unaryExpr([p](double u) { return (p + 1.0) * std::pow(std::abs(u), p); });
}

}  // namespace

LinearizedOperator::LinearizedOperator(const GroundStateResult& state)
    : grid_(state.field.grid),
      free_(operator_multiplier(state.field.grid, state.params)),
      free_inv_(free_.reciprocal()),
      potential_(potential_of(state)) {}

Eigen::VectorXd LinearizedOperator::apply(const Eigen::VectorXd& v) const {
    return free_.apply(v) - potential_.cwiseProduct(v);
}

Eigen::VectorXd LinearizedOperator::apply_free(const Eigen::VectorXd& v) const { return free_.apply(v); }

Eigen::VectorXd LinearizedOperator::apply_free_inverse(const Eigen::VectorXd& v) const { return free_inv_.apply(v); }

RealField apply_L(const GroundStateResult& state, const RealField& v) {
    require_same_grid(state.field, v);
    return RealField(v.grid, LinearizedOperator(state).apply(v.values));
}

RealField sector_project(const RealField& v, Sector sector) {
    if (v.grid.n != 1) throw InvalidArgument("sector projection is defined for n = 1 only");
    if (sector != Sector::even && sector != Sector::odd) throw InvalidArgument("sector must be even or odd");
    const double sign = sector == Sector::even ? 1.0 : -1.0;
    RealField out(v.grid);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto a = static_cast<Eigen::Index>(i);
        const auto b = static_cast<Eigen::Index>(v.grid.mirror(i));
        out.values[a] = 0.5 * (v.values[a] + sign * v.values[b]);
    }
    return out;
}

namespace {

BlockOp sector_projector(const GridSpec& grid, Sector sector) {
    if (sector == Sector::full) return {};
    if ((sector == Sector::even || sector == Sector::odd) && grid.n != 1)
        throw InvalidArgument("even/odd sectors are defined for n = 1 only; use radial");
    return [grid, sector](const Eigen::MatrixXd& X) {
        Eigen::MatrixXd Y(X.rows(), X.cols());
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            RealField f(grid, X.col(j));
            if (sector == Sector::radial) {
                Y.col(j) = symmetrize(f).values;
            } else {
                Y.col(j) = sector_project(f, sector).values;
            }
        }
        return Y;
    };
}

std::string sector_label(const RealField& v) {
    const double even = sector_project(v, Sector::even).values.squaredNorm();
    const double total = v.values.squaredNorm();
    if (total == 0.0) return "mixed";
    const double frac = even / total;
    if (frac > 0.99) return "even";
    if (frac < 0.01) return "odd";
    return "mixed";
}

}  // namespace

std::vector<RealField> translation_modes(const GroundStateResult& state) {
    std::vector<RealField> out;
    for (int d = 0; d < state.field.grid.n; ++d) out.push_back(spectral_derivative(state.field, d));
    return out;
}

SpectrumReport eigen_lowest(const GroundStateResult& state, int m, Sector sector, const SpectrumOptions& options) {
    SpectrumOptions o = options;
    o.m = m;
    o.sector = sector;
    return eigen_lowest(state, o);
}

SpectrumReport eigen_lowest(const GroundStateResult& state, const SpectrumOptions& o) {
    if (o.m < 1 || o.m > 12) throw InvalidArgument("number of eigenpairs must be in 1..12");
    const GridSpec& grid = state.field.grid;
    const LinearizedOperator L(state);

    LobpcgOptions lo;
    lo.wanted = o.m;
    lo.guard = 3;
    lo.max_iterations = o.max_iterations;
    lo.tol = o.tol_eig;
    lo.seed = o.seed;
    if (o.deflate_translations) {
        const auto modes = translation_modes(state);
        lo.constraints.resize(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(modes.size()));
        for (std::size_t d = 0; d < modes.size(); ++d) lo.constraints.col(static_cast<Eigen::Index>(d)) = modes[d].values;
    }
    const auto res = lobpcg(columnwise([&](const Eigen::VectorXd& v) { return L.apply(v); }), {},
                            columnwise([&](const Eigen::VectorXd& v) { return L.apply_free_inverse(v); }),
                            static_cast<Eigen::Index>(grid.size()), lo, sector_projector(grid, o.sector));

    SpectrumReport rep;
    rep.sector = o.sector;
    rep.seed = o.seed;
    rep.iterations = res.iterations;
    rep.converged = res.converged;
    rep.tol_ker = o.tol_ker;
    rep.tol_neg = o.tol_neg;
    const auto modes = translation_modes(state);
    for (Eigen::Index j = 0; j < res.values.size(); ++j) {
        const double mu = res.values[j];
        rep.eigenvalues.push_back(mu);
        rep.residuals.push_back(res.residuals[j]);
        RealField v(grid, res.vectors.col(j));
        if (mu < -o.tol_neg) ++rep.morse_index;
        if (std::abs(mu) <= o.tol_ker) rep.kernel_candidates.push_back(static_cast<int>(j));
        if (grid.n == 1) rep.sector_labels.push_back(sector_label(v));
        rep.eigenvectors.push_back(std::move(v));
    }
    // Squared overlap of each kernel candidate with span{d_i u} (L2 projection).
    Eigen::MatrixXd D(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(modes.size()));
    for (std::size_t d = 0; d < modes.size(); ++d) D.col(static_cast<Eigen::Index>(d)) = modes[d].values;
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(D);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(D.rows(), D.cols());
    for (int idx : rep.kernel_candidates) {
        const auto& v = rep.eigenvectors[static_cast<std::size_t>(idx)].values;
        rep.translation_overlaps.push_back(std::min(1.0, (Q.transpose() * v).squaredNorm() / v.squaredNorm()));
    }
    return rep;
}

KernelSummary morse_and_kernel_report(const SpectrumReport& report, const GroundStateResult& state) {
    KernelSummary k;
    k.morse_index = report.morse_index;
    k.kernel_dim = static_cast<int>(report.kernel_candidates.size());
    k.translation_overlaps = report.translation_overlaps;
    for (double ov : report.translation_overlaps) k.unexplained = std::max(k.unexplained, 1.0 - ov);
    for (std::size_t j = 0; j < report.eigenvalues.size(); ++j) {
        const double mu = std::abs(report.eigenvalues[j]);
        for (double t : {report.tol_neg, report.tol_ker})
            if (mu > 0.1 * t && mu < 10.0 * t) {
                k.ambiguous.push_back(static_cast<int>(j));
                break;
            }
    }
    // How much of each d_i u lies in the span of the kernel candidates.
    const auto modes = translation_modes(state);
    Eigen::MatrixXd K(static_cast<Eigen::Index>(state.field.size()), static_cast<Eigen::Index>(report.kernel_candidates.size()));
    for (std::size_t c = 0; c < report.kernel_candidates.size(); ++c)
        K.col(static_cast<Eigen::Index>(c)) = report.eigenvectors[static_cast<std::size_t>(report.kernel_candidates[c])].values;
    Eigen::MatrixXd Q;
    if (K.cols() > 0) {
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(K);
        Q = qr.householderQ() * Eigen::MatrixXd::Identity(K.rows(), K.cols());
    }
    for (const auto& dm : modes) {
        const double nrm = dm.values.squaredNorm();
        k.derivative_capture.push_back(K.cols() > 0 && nrm > 0.0 ? (Q.transpose() * dm.values).squaredNorm() / nrm : 0.0);
    }
    return k;
}

RadialGap radial_gap(const GroundStateResult& state, const SpectrumOptions& options) {
    const GridSpec& grid = state.field.grid;
    const LinearizedOperator L(state);
    LobpcgOptions lo;
    lo.wanted = 1;
    lo.guard = 3;
    lo.max_iterations = options.max_iterations;
    lo.tol = options.tol_eig;
    lo.seed = options.seed;
    lo.constraints = state.field.values;
    const auto res = lobpcg(columnwise([&](const Eigen::VectorXd& v) { return L.apply(v); }),
                            columnwise([&](const Eigen::VectorXd& v) { return L.apply_free(v); }),
                            columnwise([&](const Eigen::VectorXd& v) { return L.apply_free_inverse(v); }),
                            static_cast<Eigen::Index>(grid.size()), lo,
                            sector_projector(grid, grid.n == 1 ? Sector::even : Sector::radial));
    RadialGap g;
    g.value = res.values[0];
    g.residual = res.residuals[0];
    g.iterations = res.iterations;
    g.converged = res.converged;
    return g;
}

std::pair<double, double> generalized_rayleigh(const GroundStateResult& state, const RealField& phi) {
    require_same_grid(state.field, phi);
    const LinearizedOperator L(state);
    const double dV = phi.grid.cell_volume();
    return {dV * phi.values.dot(L.apply(phi.values)), dV * phi.values.dot(L.apply_free(phi.values))};
}

RealField project_s_orthogonal(const GroundStateResult& state, const RealField& phi) {
    require_same_grid(state.field, phi);
    const auto A = operator_multiplier(phi.grid, state.params);
    const Eigen::VectorXd Au = A.apply(state.field.values);
    const double c = phi.values.dot(Au) / state.field.values.dot(Au);
    return RealField(phi.grid, phi.values - c * state.field.values);
}

}  // namespace mxgs
