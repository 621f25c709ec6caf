#include "mxgs/cns.hpp"

#include "mxgs/error.hpp"
#include "mxgs/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace mxgs {

double unit_sphere_measure(int n) { return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0); }

namespace {

// omega_{n-1} - int_{S^{n-1}} cos(rho w_1) dw, stable for small rho via the
// hypergeometric series of the spherical average of cos.
double sphere_defect(int n, double rho) {
    const double omega = unit_sphere_measure(n);
    if (rho < 1.0) {
        // 1 - avg = -sum_{k>=1} (-rho^2/4)^k Gamma(n/2) / (k! Gamma(n/2 + k))
        const double x = -0.25 * rho * rho;
        double term = 1.0;
        double sum = 0.0;
        for (int k = 1; k < 40; ++k) {
            term *= x / (k * (n / 2.0 + k - 1.0));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return -omega * sum;
    }
    switch (n) {
        case 1: return 2.0 * (1.0 - std::cos(rho));
        case 3: return 4.0 * std::numbers::pi * (1.0 - std::sin(rho) / rho);
        default: return 2.0 * std::numbers::pi * (1.0 - std::cyl_bessel_j(0.0, rho));
    }
}

double sphere_cos_average(int n, double rho) {
    switch (n) {
        case 1: return std::cos(rho);
        case 3: return std::sin(rho) / rho;
        default: return std::cyl_bessel_j(0.0, rho);
    }
}

}  // namespace

CnsResult compute_cns(int n, double s, double rel_tol) {
    if (n < 1 || n > 3) throw InvalidArgument("compute_cns supports n = 1, 2, 3");
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("compute_cns requires 0 < s < 1");
    const double omega = unit_sphere_measure(n);

    // Radial form: int_0^inf rho^{-1-2s} (omega - int_S cos(rho w_1) dw) drho.
    // On [0, 1] substitute rho = t^{1/(2-2s)} to remove the endpoint singularity.
    const double a = 2.0 - 2.0 * s;
    auto inner = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double rho = std::pow(t, 1.0 / a);
        return std::pow(rho, -2.0 * s) * sphere_defect(n, rho) / (a * t);
    };
    const auto head = quad::integrate(inner, 0.0, 1.0, rel_tol * 1e-2);

    // [1, inf): omega / (2s) minus an oscillatory tail.
    const double smooth = omega / (2.0 * s);
    // Panels between asymptotic zeros of the spherical average, (k + nu/2 - 1/4) pi, nu = n/2 - 1.
    const double phase = (n / 2.0 - 1.0) / 2.0 - 0.25;
    int first = static_cast<int>(std::ceil(1.0 / std::numbers::pi - phase));
    while ((first + phase) * std::numbers::pi <= 1.0) ++first;
    auto node = [&](int k) { return k == 0 ? 1.0 : (first + k - 1 + phase) * std::numbers::pi; };
    auto osc = [&](double rho) { return omega * std::pow(rho, -1.0 - 2.0 * s) * sphere_cos_average(n, rho); };
    const auto tail = quad::integrate_oscillatory(osc, node, rel_tol * 1e-2, 20000);

    const double integral = head.value + smooth - tail.value;
    const double err = head.error + tail.error;
    if (!(err <= rel_tol * std::abs(integral)))
        throw QuadratureError("c_{n,s} quadrature did not reach tolerance", err);
    return CnsResult{1.0 / integral, integral, err};
}

}  // namespace mxgs
