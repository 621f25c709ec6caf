#pragma once

namespace mxgs {

struct CnsResult {
    double value;           // c_{n,s}
    double integral;        // int (1 - cos xi_1) / |xi|^{n+2s} dxi
    double error_estimate;  // absolute, on the integral
};

/// Normalization constant of the singular-integral form of (-Laplacian)^s,
/// c_{n,s} = (int_{R^n} (1 - cos xi_1) |xi|^{-n-2s} dxi)^{-1}, evaluated by
/// reduction to a radial integral and adaptive quadrature. Requires 0 < s < 1.
CnsResult compute_cns(int n, double s, double rel_tol = 1e-8);

/// Surface measure of the unit sphere S^{n-1} in R^n.
double unit_sphere_measure(int n);

}  // namespace mxgs
