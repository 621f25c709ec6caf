#include "mxgs/quadrature.hpp"

#include "mxgs/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace mxgs::quad {

Result integrate(const std::function<double(double)>& f, double a, double b, double rel_tol, unsigned max_depth) {
    Result r;
    if (a == b) return r;
    r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, rel_tol, &r.error, &r.l1);
    if (!std::isfinite(r.value)) throw QuadratureError("non-finite quadrature result", r.error);
    return r;
}

double wynn_epsilon(std::span<const double> s, double* error) {
    const std::size_t n = s.size();
    if (n == 0) return 0.0;
    if (n < 3) {
        if (error) *error = n == 2 ? std::abs(s[1] - s[0]) : std::abs(s[0]);
        return s.back();
    }
    // prev = column j-1, cur = column j; entries indexed by k.
    std::vector<double> prev(n + 1, 0.0);
    std::vector<double> cur(s.begin(), s.end());
    double best = s.back();
    double last_best = s[n - 2];
    for (std::size_t j = 1; j < n; ++j) {
        std::vector<double> next(n - j);
        bool broke = false;
        for (std::size_t k = 0; k + j < n; ++k) {
            const double diff = cur[k + 1] - cur[k];
            if (diff == 0.0) {
                broke = true;
                break;
            }
            next[k] = prev[k + 1] + 1.0 / diff;
        }
        if (broke) break;
        prev = std::move(cur);
        cur = std::move(next);
        if (j % 2 == 0) {
            last_best = cur.size() >= 2 ? cur[cur.size() - 2] : best;
            best = cur.back();
        }
        if (cur.size() < 2) break;
    }
    if (error) *error = std::abs(best - last_best);
    return best;
}

Result integrate_oscillatory(const std::function<double(double)>& f, const std::function<double(int)>& node,
                             double rel_tol, int max_panels, double abs_floor) {
    std::vector<double> sums;
    sums.reserve(static_cast<std::size_t>(max_panels));
    double total = 0.0;
    double l1 = 0.0;
    double quad_err = 0.0;
    double prev_estimate = 0.0;
    int stable = 0;
    constexpr std::size_t window = 24;
    for (int k = 0; k < max_panels; ++k) {
        const auto piece = integrate(f, node(k), node(k + 1), rel_tol * 1e-2, 12);
        total += piece.value;
        l1 += piece.l1;
        quad_err += piece.error;
        sums.push_back(total);
        if (sums.size() < 8) continue;
        const std::size_t m = std::min(window, sums.size());
        double extrap_err = 0.0;
        const double estimate = wynn_epsilon(std::span<const double>(sums).last(m), &extrap_err);
        const double tol = std::max(rel_tol * std::abs(estimate), abs_floor);
        if (extrap_err <= tol && std::abs(estimate - prev_estimate) <= tol) {
            if (++stable >= 2) return Result{estimate, extrap_err + quad_err, l1};
        } else {
            stable = 0;
        }
        prev_estimate = estimate;
    }
    throw QuadratureError("oscillatory quadrature did not converge", std::abs(sums.back() - prev_estimate));
}

Result integrate_panels(const std::function<double(double)>& f, double a, double b, double width, double rel_tol) {
    Result r;
    if (!(width > 0.0)) throw InvalidArgument("panel width must be positive");
    const auto panels = static_cast<long>(std::ceil((b - a) / width));
    for (long k = 0; k < panels; ++k) {
        const double lo = a + static_cast<double>(k) * width;
        const double hi = k + 1 == panels ? b : lo + width;
        const auto piece = integrate(f, lo, hi, rel_tol, 8);
        r.value += piece.value;
        r.error += piece.error;
        r.l1 += piece.l1;
    }
    return r;
}

}  // namespace mxgs::quad
