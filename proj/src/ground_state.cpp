#include "mxgs/ground_state.hpp"

#include "mxgs/error.hpp"
#include "mxgs/fourier.hpp"
#include "mxgs/inner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mxgs {

namespace {

Eigen::VectorXd power_nonlinearity(const Eigen::VectorXd& u, double p) {
    if (p == 2.0) return u.array().cube().matrix();
    return u.unaryExpr([p](double x) { return std::pow(std::abs(x), p) * x; });
}

struct Iterate {
    Eigen::VectorXd u;
    double nehari_rel = std::numeric_limits<double>::infinity();
    double step = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();
};

double relative_residual(const Multiplier& A, const Eigen::VectorXd& u, double p) {
    const double umax = u.cwiseAbs().maxCoeff();
    return (A.apply(u) - power_nonlinearity(u, p)).cwiseAbs().maxCoeff() / umax;
}

}  // namespace

RealField default_initial_guess(const GridSpec& grid, double p) {
    auto f = sample(grid, [](const std::array<double, 3>& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); });
    f.values /= lp_norm(f, p + 2.0);
    return f;
}

RealField symmetrize(const RealField& f) {
    const GridSpec& g = f.grid;
    if (g.n == 1) {
        RealField out(g);
        for (std::size_t i = 0; i < g.size(); ++i)
            out.values[static_cast<Eigen::Index>(i)] =
                0.5 * (f.values[static_cast<Eigen::Index>(i)] + f.values[static_cast<Eigen::Index>(g.mirror(i))]);
        return out;
    }
    const int N = g.N();
    std::array<int, 3> perm{0, 1, 2};
    std::vector<std::array<int, 3>> perms;
    do perms.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.begin() + g.n));
    const int flips = 1 << g.n;
    const double weight = 1.0 / static_cast<double>(perms.size() * static_cast<std::size_t>(flips));
    RealField out(g);
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const auto ijk = g.unflatten(idx);
        double acc = 0.0;
        for (const auto& pm : perms) {
            for (int mask = 0; mask < flips; ++mask) {
                std::array<int, 3> img{0, 0, 0};
                for (int d = 0; d < g.n; ++d) {
                    const int j = ijk[pm[d]];
                    img[d] = (mask >> d) & 1 ? (N - j) % N : j;
                }
                acc += f.values[static_cast<Eigen::Index>(g.flatten(img))];
            }
        }
        out.values[static_cast<Eigen::Index>(idx)] = acc * weight;
    }
    return out;
}

double monotonicity_defect(const RealField& f) {
    const GridSpec& g = f.grid;
    const double fmax = f.max_abs();
    if (fmax == 0.0) return 0.0;
    const int N = g.N();
    double worst = 0.0;
    // Rays along every direction with components in {-1, 0, 1}.
    int total = 1;
    for (int d = 0; d < g.n; ++d) total *= 3;
    for (int code = 0; code < total; ++code) {
        std::array<int, 3> dir{0, 0, 0};
        int c = code;
        bool nonzero = false;
        for (int d = 0; d < g.n; ++d) {
            dir[d] = c % 3 - 1;
            c /= 3;
            nonzero = nonzero || dir[d] != 0;
        }
        if (!nonzero) continue;
        double prev = f.values[0];
        for (int k = 1; k < N / 2; ++k) {
            std::array<int, 3> ijk{0, 0, 0};
            for (int d = 0; d < g.n; ++d) ijk[d] = ((dir[d] * k) % N + N) % N;
            const double cur = f.values[static_cast<Eigen::Index>(g.flatten(ijk))];
            worst = std::max(worst, cur - prev);
            prev = cur;
        }
    }
    return worst / fmax;
}

SymmetrizeReport recenter_symmetrize(const RealField& f) {
    SymmetrizeReport rep;
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < f.values.size(); ++i)
        if (f.values[i] > f.values[best]) best = i;
    rep.max_index = f.grid.unflatten(static_cast<std::size_t>(best));
    for (int d = 0; d < f.grid.n; ++d) rep.center[d] = f.grid.coordinate(rep.max_index[d]);
    rep.field = symmetrize(circular_shift(f, rep.max_index));
    rep.monotonicity_defect = monotonicity_defect(rep.field);
    return rep;
}

double h1_distance(const RealField& a, const RealField& b, bool recenter) {
    require_same_grid(a, b);
    RealField diff(a.grid);
    if (recenter) {
        diff.values = recenter_symmetrize(a).field.values - recenter_symmetrize(b).field.values;
    } else {
        diff.values = a.values - b.values;
    }
    return std::sqrt(weighted_norm_sq(diff, weight::H1{}));
}

void finalize_result(GroundStateResult& r) {
    const auto& u = r.field;
    r.breakdown = eval_F(u, r.params);
    const double ns = r.breakdown.norm_s_sq(r.params.shift);
    r.nehari_rel = ns > 0.0 ? std::abs(r.breakdown.nehari_defect) / ns : 0.0;
    r.lambda_s = std::pow(r.breakdown.potential, r.params.p / (r.params.p + 2.0));
    const auto A = operator_multiplier(u.grid, r.params);
    r.residual_linf = (A.apply(u.values) - power_nonlinearity(u.values, r.params.p)).cwiseAbs().maxCoeff();
    r.monotonicity_defect = monotonicity_defect(u);
}

GroundStateResult solve_ground_state(const SymbolParams& params, const GridSpec& grid,
                                     const std::optional<RealField>& init, const SolverConfig& config) {
    validate(params);
    if (params.n != grid.n) throw InvalidArgument("symbol dimension does not match grid dimension");
    if (!(params.shift > 0.0)) throw InvalidArgument("ground-state solver requires shift > 0");
    // Heuristic resolution check: at least 8 modes across a unit core.
    if (grid.N() * M_PI / grid.L() < 8.0) throw InvalidArgument("grid too coarse to resolve the soliton core");

    RealField start = init ? *init : default_initial_guess(grid, params.p);
    if (start.grid != grid) throw InvalidArgument("initial guess lives on a different grid");
    if (!start.all_finite()) throw InvalidArgument("initial guess is not finite");
    if (start.max_abs() == 0.0) throw CollapseError("initial guess is identically zero");

    const double p = params.p;
    const double gamma = (p + 1.0) / p;
    const auto A = operator_multiplier(grid, params);
    const auto Ainv = A.reciprocal();
    const double dV = grid.cell_volume();

    GroundStateResult result;
    result.params = params;
    Iterate cur;
    cur.u = start.values;
    if (config.symmetrize) cur.u = recenter_symmetrize(start).field.values;

    auto sym = [&](Eigen::VectorXd v) {
        if (!config.symmetrize) return v;
        return symmetrize(RealField(grid, std::move(v))).values;
    };
    auto nehari_rel = [&](const Eigen::VectorXd& v, double* level) {
        const double ns = dV * v.dot(A.apply(v));
        double pot = 0.0;
        if (p == 2.0) {
            pot = dV * v.array().square().square().sum();
        } else {
            for (Eigen::Index i = 0; i < v.size(); ++i) pot += std::pow(std::abs(v[i]), p + 2.0);
            pot *= dV;
        }
        if (level) *level = pot;
        return std::abs(ns - pot) / ns;
    };

    Iterate best = cur;
    int it = 0;
    bool done = false;

    if (!config.force_fallback) {
        result.method = "petviashvili";
        for (; it < config.max_iterations; ++it) {
            const Eigen::VectorXd nl = power_nonlinearity(cur.u, p);
            const double num = dV * cur.u.dot(A.apply(cur.u));
            const double den = dV * cur.u.dot(nl);
            if (!(den > 0.0) || !std::isfinite(num / den)) throw CollapseError("Petviashvili iteration collapsed to zero");
            const double M = num / den;
            Eigen::VectorXd next = sym(std::pow(M, gamma) * Ainv.apply(nl));
            const double nmax = next.cwiseAbs().maxCoeff();
            if (!(nmax > 1e-150) || !std::isfinite(nmax)) throw CollapseError("Petviashvili iteration collapsed to zero");
            Iterate nx;
            nx.step = (next - cur.u).cwiseAbs().maxCoeff() / nmax;
            nx.nehari_rel = nehari_rel(next, nullptr);
            nx.u = std::move(next);
            if (config.keep_log) result.log.push_back({it + 1, nx.nehari_rel, nx.step, M});
            cur = std::move(nx);
            if (cur.nehari_rel < best.nehari_rel) best = cur;
            if (cur.nehari_rel < config.nehari_tol && cur.step < config.step_tol) {
                cur.residual = relative_residual(A, cur.u, p);
                if (cur.residual <= 1e-8) {
                    done = true;
                    ++it;
                    break;
                }
            }
        }
    }

    if (!done) {
        // Normalized gradient flow on J: v <- (1 - tau) v + tau lambda(v) A^{-1} |v|^p v, ||v||_{p+2} = 1.
        result.method = "gradient_flow";
        const double tau = config.fallback_tau;
        const Eigen::VectorXd& seed = config.force_fallback ? cur.u : best.u;
        auto normalize = [&](Eigen::VectorXd v) {
            const double nrm = lp_norm(RealField(grid, v), p + 2.0);
            if (!(nrm > 1e-150) || !std::isfinite(nrm)) throw CollapseError("gradient flow collapsed to zero");
            return Eigen::VectorXd(v / nrm);
        };
        Eigen::VectorXd v = normalize(seed);
        for (int k = 0; k < config.fallback_max_iterations; ++k, ++it) {
            const double lam = dV * v.dot(A.apply(v));
            Eigen::VectorXd next = normalize(sym((1.0 - tau) * v + tau * lam * Ainv.apply(power_nonlinearity(v, p))));
            const double step = (next - v).cwiseAbs().maxCoeff() / next.cwiseAbs().maxCoeff();
            v = std::move(next);
            const double lam_new = dV * v.dot(A.apply(v));
            Iterate nx;
            nx.u = std::pow(lam_new, 1.0 / p) * v;
            nx.step = step;
            nx.nehari_rel = nehari_rel(nx.u, nullptr);
            if (config.keep_log) result.log.push_back({it + 1, nx.nehari_rel, step, lam_new});
            cur = std::move(nx);
            if (cur.step < config.step_tol) {
                cur.residual = relative_residual(A, cur.u, p);
                if (cur.nehari_rel < config.nehari_tol && cur.residual <= 1e-8) {
                    done = true;
                    ++it;
                    break;
                }
            }
        }
        if (!done && best.nehari_rel < cur.nehari_rel && !config.force_fallback) cur = best;
    }

    const auto centered = config.symmetrize ? recenter_symmetrize(RealField(grid, cur.u))
                                            : SymmetrizeReport{RealField(grid, cur.u), {}, {}, 0.0};
    result.field = centered.field;
    result.center = centered.center;
    result.iterations = it;
    result.converged = done;
    finalize_result(result);
    return result;
}

}  // namespace mxgs
