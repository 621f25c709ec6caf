#pragma once

#include "mxgs/fourier.hpp"

#include <functional>
#include <variant>

namespace mxgs {

/// Weight families for the quadrature of  int w(xi) u^(xi) conj(v^(xi)) dxi.
namespace weight {
struct SobolevS {
    double s;
};  // 1 + |xi|^2 + |xi|^{2s}
struct H1 {};  // 1 + |xi|^2
struct H2 {};  // (1 + |xi|^2)^2
struct L2 {};  // 1
struct Custom {
    std::function<double(double)> w;  // function of |xi|
};
}  // namespace weight

using WeightKind = std::variant<weight::SobolevS, weight::H1, weight::H2, weight::L2, weight::Custom>;

/// Multiplier realizing a weight kind on `grid`.
Multiplier weight_multiplier(const GridSpec& grid, const WeightKind& kind);

/// Discrete weighted inner product. Carries the cell volume (2L/N)^n, so that
/// Parseval holds exactly:  dV * sum_x u(x) (W v)(x).
double weighted_inner(const RealField& u, const RealField& v, const WeightKind& kind);
double weighted_norm_sq(const RealField& u, const WeightKind& kind);

/// dV * sum u (M v) for a precomputed multiplier M.
double quadratic_form(const Multiplier& m, const RealField& u, const RealField& v);

double l2_inner(const RealField& u, const RealField& v);

/// dV * sum |u|^q.
double lp_integral(const RealField& u, double q);
/// (dV * sum |u|^q)^{1/q}.
double lp_norm(const RealField& u, double q);

}  // namespace mxgs
