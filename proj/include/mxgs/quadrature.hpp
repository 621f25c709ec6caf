#pragma once

#include <functional>
#include <span>

namespace mxgs::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;  // integral of |f|, for relative error control
};

/// Adaptive Gauss-Kronrod (7/15) on [a, b]; b may be +infinity.
Result integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                 unsigned max_depth = 18);

/// Wynn epsilon extrapolation of a sequence of partial sums.
/// Returns the limit estimate; `error` receives the spread of the last two estimates.
double wynn_epsilon(std::span<const double> partial_sums, double* error = nullptr);

/// Integral over [a, infinity) of an oscillating integrand, summed panel by
/// panel between consecutive `node(k)` (node(0) = a, increasing) and
/// accelerated with the epsilon algorithm. Throws QuadratureError when the
/// extrapolation does not settle within `max_panels`.
Result integrate_oscillatory(const std::function<double(double)>& f, const std::function<double(int)>& node,
                             double rel_tol = 1e-10, int max_panels = 4000, double abs_floor = 0.0);

/// Integral over [a, b] as a sum of adaptive panels of width at most `width`
/// (for integrands oscillating with a known half period).
Result integrate_panels(const std::function<double(double)>& f, double a, double b, double width, double rel_tol = 1e-12);

}  // namespace mxgs::quad
