#pragma once

#include "mxgs/grid.hpp"
#include "mxgs/symbol.hpp"

namespace mxgs {

struct EnergyBreakdown {
    double kinetic_local = 0.0;     // int |grad u|^2
    double kinetic_nonlocal = 0.0;  // int |(-Laplacian)^{s/2} u|^2
    double mass = 0.0;              // int u^2
    double potential = 0.0;         // int |u|^{p+2}
    double j_value = 0.0;           // (kinetic + shift*mass) / potential^{2/(p+2)}; 0 when potential = 0
    double f_value = 0.0;           // (kinetic + shift*mass)/2 - potential/(p+2)
    double nehari_defect = 0.0;     // ||u||_s^2 - potential

    /// ||u||_s^2 under the given shift.
    double norm_s_sq(double shift = 1.0) const { return kinetic_local + kinetic_nonlocal + shift * mass; }
};

/// Every term of the energy in one pass (a single forward transform).
EnergyBreakdown eval_F(const RealField& u, const SymbolParams& params);
EnergyBreakdown eval_F(const RealField& u, double s, double p);

/// ||v||_s^2 / ||v||_{p+2}^2; throws InvalidArgument for the zero field.
double eval_J(const RealField& v, const SymbolParams& params);
double eval_J(const RealField& v, double s, double p);

/// ||u||_s^2 - ||u||_{p+2}^{p+2}.
double nehari_residual(const RealField& u, const SymbolParams& params);
double nehari_residual(const RealField& u, double s, double p);

struct LambdaReport {
    double lambda = 0.0;       // ||u||_{p+2}^p
    double norm_s_sq = 0.0;    // ||u||_s^2
    double consistency = 0.0;  // | ||u||_s^2 - lambda^{1+2/p} | / ||u||_s^2
    bool consistent = false;   // consistency <= 1e-4
};

/// Level extracted from a state on (or near) the Nehari manifold.
LambdaReport lambda_from_state(const RealField& u, const SymbolParams& params);
LambdaReport lambda_from_state(const RealField& u, double s, double p);

/// lambda^{1/p} v; throws InvalidArgument for lambda <= 0.
RealField rescale_minimizer(const RealField& v, double lambda, double p);

enum class Endpoint { s0, s1 };

/// Infimum of the standard functional (||grad u||^2 + ||u||^2) / ||u||_{p+2}^2 in one
/// dimension: ||Q||_{p+2}^p with Q = ((p+2)/2)^{1/p} sech^{2/p}(p x / 2).
double standard_lambda_1d(double p);

/// Scale factor relating the endpoint infimum to the standard one.
double endpoint_prefactor(int n, double p, Endpoint e);

struct EndpointConfig {
    int N = 0;          // 0 selects a default per dimension
    double L = 0.0;     // 0 selects a default per dimension
    bool refine = true; // repeat on a doubled grid and require agreement
    double refine_tol = 1e-6;
};

/// lambda_0 or lambda_1. For n = 1 the closed form; for n >= 2 a numerical
/// solve of the limit equation (-Laplacian u + 2u = u^{p+1} or
/// -2 Laplacian u + u = u^{p+1}) with a grid-refinement check.
double endpoint_lambda(int n, double p, Endpoint e, const EndpointConfig& cfg = {});

}  // namespace mxgs
