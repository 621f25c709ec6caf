#pragma once

#include "mxgs/ground_state.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mxgs {

// Kernel formulas use the transform f(x) = int f^(xi) e^{2 pi i x.xi} dxi with
// ordinary frequency xi. The solver's lattice uses angular frequency k = 2 pi xi,
// so a symbol g(|xi|) here corresponds to g(|k| / (2 pi)) on the grid.
inline constexpr double kFrequencyConversion = 6.283185307179586;  // k = 2 pi xi

/// H_s(r, t) = int exp(-t|xi|^2 - t|xi|^{2s}) e^{2 pi i x.xi} dxi, |x| = r.
/// Radial reduction to a one-dimensional oscillatory integral, panels of one
/// half period, truncated where the symbol falls below e^{-39}.
double heat_kernel_eval(int n, double s, double r, double t, double* error_estimate = nullptr);

/// int H_s(x, t) dx computed from the kernel itself: mass inside a large ball
/// (quadrature) plus the mass outside from the large-|x| asymptotic expansion.
double heat_kernel_mass(int n, double s, double t, double* error_estimate = nullptr);

/// t * nu(r): small-time behaviour of H_s away from the origin, with
/// nu(r) = (2 pi)^{-2s} c_{n,s} r^{-n-2s} the Levy density of |xi|^{2s}.
double heat_kernel_small_time(int n, double s, double r, double t);

/// Shape of the two-sided heat kernel bound:
/// min( max(t, t^s) / r^{n+2s}, min(t^{-n/(2s)}, t^{-n/2}) ).
double heat_bound_shape(int n, double s, double r, double t);

struct HeatBoundSample {
    double r;
    double t;
    double value;
    double bound;
    double ratio;
    std::string branch;  // "off-diagonal" or "on-diagonal"; which term of the min is active
    std::string time_branch;  // "t" or "t^s" (off-diagonal), "t^-n/2" or "t^-n/2s" (on-diagonal)
};

struct HeatBoundReport {
    std::vector<HeatBoundSample> samples;
    double max_ratio = 0.0;  // empirical C1
    double min_ratio = 0.0;
    bool finite = true;
    std::vector<std::size_t> outliers;  // ratio above 10x the median
};

HeatBoundReport heat_bound_check(int n, double s, const std::vector<std::pair<double, double>>& samples);

/// Log-spaced (r, t) grid, r in [r_lo, r_hi] and t in [t_lo, t_hi].
std::vector<std::pair<double, double>> log_grid(double r_lo, double r_hi, int nr, double t_lo, double t_hi, int nt);

/// exp(-t(-Laplacian + (-Laplacian)^s)) f on the periodic grid (angular lattice).
RealField semigroup_apply(const RealField& f, double t, double s);

enum class KernelConvention {
    ordinary, // 1 / (|xi|^2 + |xi|^{2s} + lambda), xi ordinary frequency
    angular,  // 1 / (|k|^2 + |k|^{2s} + lambda), k angular frequency (solver operator)
};

/// Green's function of the radial symbol a|k|^2 + b|k|^{2s} + c in angular
/// frequency, K(r) = (2 pi)^{-n} int e^{i k.x} / (a k^2 + b k^{2s} + c) dk,
/// evaluated by rotating the radial contour onto the imaginary axis.
double radial_green_function(int n, double s, double a, double b, double c, double r, double* error_estimate = nullptr);

/// K_lambda(r) in the requested convention. r = 0 is rejected for n >= 2.
double resolvent_kernel_eval(int n, double s, double lambda, double r,
                             KernelConvention convention = KernelConvention::ordinary, double* error_estimate = nullptr);

/// int_0^inf e^{-lambda t} H_s(r, t) dt (ordinary-frequency convention); the independent route.
double resolvent_via_heat(int n, double s, double lambda, double r, double* error_estimate = nullptr);

struct KernelSample {
    std::string kind;    // "heat" or "resolvent"
    std::string method;  // "radial-quadrature" or "multiplier-transform"
    std::vector<double> points;
    std::vector<double> times_or_shift;
    std::vector<double> values;
    std::vector<double> bound_ratio;  // heat only; empty otherwise
    double error_estimate = 0.0;
};

KernelSample sample_heat_kernel(int n, double s, const std::vector<double>& radii, const std::vector<double>& times);
KernelSample sample_resolvent_kernel(int n, double s, double lambda, const std::vector<double>& radii,
                                     KernelConvention convention = KernelConvention::ordinary);

/// sup_x ((-Laplacian) + (-Laplacian)^s + beta)^{-1} |V| on the periodic grid.
double kato_norm(const RealField& V, double beta, double s);

struct TailValues {
    std::vector<double> radii;   // evaluation radii along the first axis, snapped to the lattice
    std::vector<double> values;
    std::vector<double> error_estimates;
};

/// u(x) = int K_1(x - y) |u|^p u(y) dy by direct summation over the grid sources,
/// with K_1 the free-space Green's function of the solver operator (no periodic
/// images). Radii are snapped to lattice points on the first axis and must not
/// exceed L/2.
TailValues free_space_tail(const GroundStateResult& state, const std::vector<double>& radii);

struct TailFit {
    double r_min = 0.0;
    double r_max = 0.0;
    double fitted_exponent = 0.0;
    double fitted_constant = 0.0;
    double r_squared = 0.0;
    double expected_exponent = 0.0;           // -(n + 2s)
    std::optional<double> small_s_reference;  // -n, reported when s <= 0.1
    int points = 0;
};

/// Least-squares slope of log u against log r over the points in [r_min, r_max].
TailFit tail_exponent(const std::vector<double>& radii, const std::vector<double>& values, double r_min, double r_max,
                      int n, double s);

}  // namespace mxgs
