#include "mxgs/functionals.hpp"

#include "mxgs/error.hpp"
#include "mxgs/fourier.hpp"
#include "mxgs/ground_state.hpp"
#include "mxgs/inner.hpp"

#include <cmath>
#include <numbers>

namespace mxgs {

EnergyBreakdown eval_F(const RealField& u, const SymbolParams& params) {
    validate(params);
    const GridSpec& g = u.grid;
    const FourierTransform ft(g);
    const auto coef = ft.forward({u.values.data(), u.size()});
    const int N = g.N();
    const auto half = static_cast<std::size_t>(N / 2 + 1);
    double local = 0.0, nonlocal = 0.0, mass = 0.0;
    for (std::size_t k = 0; k < coef.size(); ++k) {
        const auto last = k % half;
        const double mult = (last == 0 || last == half - 1) ? 1.0 : 2.0;
        const auto xi = ft.spectrum_frequency(k);
        const double r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        const double a2 = mult * std::norm(coef[k]);
        mass += a2;
        local += r2 * a2;
        nonlocal += fractional_symbol(std::sqrt(r2), params.s) * a2;
    }
    const double scale = g.cell_volume() / static_cast<double>(g.size());
    EnergyBreakdown e;
    e.kinetic_local = local * scale;
    e.kinetic_nonlocal = nonlocal * scale;
    e.mass = mass * scale;
    e.potential = lp_integral(u, params.p + 2.0);
    const double ns = e.norm_s_sq(params.shift);
    e.j_value = e.potential > 0.0 ? ns / std::pow(e.potential, 2.0 / (params.p + 2.0)) : 0.0;
    e.f_value = 0.5 * ns - e.potential / (params.p + 2.0);
    e.nehari_defect = ns - e.potential;
    return e;
}

EnergyBreakdown eval_F(const RealField& u, double s, double p) { return eval_F(u, SymbolParams{u.grid.n, s, p, 1.0}); }

double eval_J(const RealField& v, const SymbolParams& params) {
    const auto e = eval_F(v, params);
    if (!(e.potential > 0.0)) throw InvalidArgument("J is undefined for the zero field");
    return e.j_value;
}

double eval_J(const RealField& v, double s, double p) { return eval_J(v, SymbolParams{v.grid.n, s, p, 1.0}); }

double nehari_residual(const RealField& u, const SymbolParams& params) { return eval_F(u, params).nehari_defect; }

double nehari_residual(const RealField& u, double s, double p) {
    return nehari_residual(u, SymbolParams{u.grid.n, s, p, 1.0});
}

LambdaReport lambda_from_state(const RealField& u, const SymbolParams& params) {
    const auto e = eval_F(u, params);
    if (!(e.potential > 0.0)) throw InvalidArgument("lambda is undefined for the zero field");
    LambdaReport r;
    const double p = params.p;
    r.lambda = std::pow(e.potential, p / (p + 2.0));
    r.norm_s_sq = e.norm_s_sq(params.shift);
    r.consistency = std::abs(r.norm_s_sq - std::pow(r.lambda, 1.0 + 2.0 / p)) / r.norm_s_sq;
    r.consistent = r.consistency <= 1e-4;
    return r;
}

LambdaReport lambda_from_state(const RealField& u, double s, double p) {
    return lambda_from_state(u, SymbolParams{u.grid.n, s, p, 1.0});
}

RealField rescale_minimizer(const RealField& v, double lambda, double p) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("rescale_minimizer requires lambda > 0");
    if (!(p > 0.0)) throw InvalidArgument("rescale_minimizer requires p > 0");
    return RealField(v.grid, v.values * std::pow(lambda, 1.0 / p));
}

double standard_lambda_1d(double p) {
    if (!(p > 0.0)) throw InvalidArgument("p must be positive");
    // int sech^a(bx) dx = sqrt(pi) Gamma(a/2) / (b Gamma((a+1)/2)).
    const double a = 2.0 * (p + 2.0) / p;
    const double b = p / 2.0;
    const double amp = std::pow((p + 2.0) / 2.0, 1.0 / p);
    const double integral = std::pow(amp, p + 2.0) * std::sqrt(std::numbers::pi) * std::tgamma(a / 2.0) /
                            (b * std::tgamma((a + 1.0) / 2.0));
    return std::pow(integral, p / (p + 2.0));
}

double endpoint_prefactor(int n, double p, Endpoint e) {
    const double q = n / (p + 2.0);
    return e == Endpoint::s0 ? std::pow(2.0, 1.0 - n / 2.0 + q) : std::pow(2.0, n / 2.0 - q);
}

double endpoint_lambda(int n, double p, Endpoint e, const EndpointConfig& cfg) {
    validate(SymbolParams{n, e == Endpoint::s0 ? 0.0 : 1.0, p, 1.0});
    if (n == 1) return endpoint_prefactor(n, p, e) * standard_lambda_1d(p);

    const int N = cfg.N > 0 ? cfg.N : (n == 2 ? 128 : 48);
    // the s = 0 profile is narrower by sqrt(2)
    const double L = cfg.L > 0.0 ? cfg.L : (n == 2 ? 16.0 : 12.0) / (e == Endpoint::s0 ? std::numbers::sqrt2 : 1.0);
    const SymbolParams params{n, e == Endpoint::s0 ? 0.0 : 1.0, p, 1.0};
    auto solve = [&](int points) {
        const auto r = solve_ground_state(params, build_grid(n, points, L));
        if (!r.converged) throw ComputeError("endpoint limit equation did not converge");
        return r.lambda_s;
    };
    const double lam = solve(N);
    if (cfg.refine) {
        const double fine = solve(2 * N);
        if (std::abs(fine - lam) > cfg.refine_tol * fine)
            throw ComputeError("endpoint lambda not resolved under grid refinement");
        return fine;
    }
    return lam;
}

}  // namespace mxgs
