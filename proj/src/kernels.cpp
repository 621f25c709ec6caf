#include "mxgs/kernels.hpp"

#include "mxgs/cns.hpp"
#include "mxgs/error.hpp"
#include "mxgs/fourier.hpp"
#include "mxgs/quadrature.hpp"
#include "mxgs/symbol.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

namespace mxgs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCutoffExponent = 39.0;  // symbol truncated where exp(-t * symbol) < e^{-39}

void check_dimension(int n) {
    if (n < 1 || n > 3) throw InvalidArgument("kernels support n = 1, 2, 3");
}

void check_order(double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("s must lie in [0, 1]");
}

// Frequency beyond which t * (rho^2 + rho^{2s}) exceeds the cutoff exponent.
double frequency_cutoff(double s, double t) {
    const double a = std::sqrt(kCutoffExponent / t);
    if (s <= 0.0) return a;
    const double b = std::pow(kCutoffExponent / t, 1.0 / (2.0 * s));
    return std::min(a, b);
}

double heat_symbol(double rho, double s, double t) { return std::exp(-t * (rho * rho + fractional_symbol(rho, s))); }

// Spherical average kernel: int_{S^{n-1}} rho^{n-1} e^{2 pi i r rho w_1} dw.
double radial_fourier_weight(int n, double r, double rho) {
    const double z = 2.0 * kPi * r * rho;
    switch (n) {
        case 1: return 2.0 * std::cos(z);
        case 2: return 2.0 * kPi * rho * boost::math::cyl_bessel_j(0, z);
        default: return r > 0.0 ? 2.0 * rho * std::sin(z) / r : 4.0 * kPi * rho * rho;
    }
}

// omega_{n-1} rho^{n-1} times the transform of the indicator of the ball of radius R,
// omega_{n-1} R^{n/2} rho^{n/2-1} J_{n/2}(2 pi R rho).
double ball_weight(int n, double R, double rho) {
    if (rho == 0.0) return n == 1 ? 4.0 * R : 0.0;
    const double z = 2.0 * kPi * R * rho;
    switch (n) {
        case 1: return 2.0 * std::sin(z) / (kPi * rho);
        case 2: return 2.0 * kPi * R * boost::math::cyl_bessel_j(1, z);
        default: return 4.0 * R * (std::sin(z) / z - std::cos(z));
    }
}

}  // namespace

double heat_kernel_eval(int n, double s, double r, double t, double* error_estimate) {
    check_dimension(n);
    check_order(s);
    if (!(t > 0.0)) throw InvalidArgument("heat kernel requires t > 0");
    if (!(r >= 0.0)) throw InvalidArgument("radius must be non-negative");
    const double rho_max = frequency_cutoff(s, t);
    const double width = r > 0.0 ? std::min(0.5 / r, rho_max) : rho_max;
    const auto res = quad::integrate_panels(
        [&](double rho) { return heat_symbol(rho, s, t) * radial_fourier_weight(n, r, rho); }, 0.0, rho_max, width, 1e-10);
    if (error_estimate) *error_estimate = res.error;
    return res.value;
}

double heat_kernel_small_time(int n, double s, double r, double t) {
    check_dimension(n);
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("Levy density requires 0 < s < 1");
    const double c = compute_cns(n, s).value;
    return t * std::pow(2.0 * kPi, -2.0 * s) * c * std::pow(r, -n - 2.0 * s);
}

double heat_kernel_mass(int n, double s, double t, double* error_estimate) {
    check_dimension(n);
    check_order(s);
    if (!(t > 0.0)) throw InvalidArgument("heat kernel requires t > 0");
    double scale = std::max(1.0, std::sqrt(t));
    if (s > 0.0) scale = std::max(scale, std::pow(t, 1.0 / (2.0 * s)));
    const double R = 200.0 * scale;
    const double rho_max = frequency_cutoff(s, t);
    if (rho_max * 2.0 * R > 5e7) throw QuadratureError("heat kernel mass: ball too large for panel quadrature", 0.0);
    const auto ball = quad::integrate_panels([&](double rho) { return heat_symbol(rho, s, t) * ball_weight(n, R, rho); },
                                             0.0, rho_max, 0.5 / R, 1e-10);

    // Outside the ball: term-by-term transform of the non-smooth part of the symbol,
    // exp(-t rho^2) exp(-t rho^{2s}) = sum (-t)^{j+k} rho^{2j+2sk} / (j! k!).
    const double omega = unit_sphere_measure(n);
    double tail = 0.0;
    double last = 0.0;
    if (s > 0.0 && s < 1.0) {
        for (int j = 0; j < 6; ++j) {
            double prev_mag = std::numeric_limits<double>::infinity();
            for (int k = 0; k < 200; ++k) {
                if (j == 0 && k == 0) continue;
                const double alpha = 2.0 * j + 2.0 * s * k;
                const double half = alpha / 2.0;
                if (std::abs(half - std::round(half)) < 1e-12) continue;  // smooth term, no far field
                const double c_alpha = std::pow(kPi, -alpha - n / 2.0) * std::tgamma((n + alpha) / 2.0) / std::tgamma(-half);
                const double log_coef = (j + k) * std::log(t) - std::lgamma(j + 1.0) - std::lgamma(k + 1.0) - alpha * std::log(R);
                const double sign = ((j + k) % 2 == 0) ? 1.0 : -1.0;
                const double term = sign * std::exp(log_coef) * c_alpha * omega / alpha;
                const double mag = std::abs(term);
                if (!std::isfinite(term) || mag > prev_mag * 10.0) break;  // asymptotic series turning
                tail += term;
                last = std::max(last, k > 0 ? mag : 0.0);
                prev_mag = mag;
                if (mag < 1e-18) break;
            }
        }
    }
    if (error_estimate) *error_estimate = ball.error + last * 1e-3;
    return ball.value + tail;
}

double heat_bound_shape(int n, double s, double r, double t) {
    if (!(s > 0.0)) throw InvalidArgument("heat bound requires s > 0");
    if (!(r > 0.0) || !(t > 0.0)) throw InvalidArgument("heat bound requires r > 0 and t > 0");
    const double off = std::max(t, std::pow(t, s)) / std::pow(r, n + 2.0 * s);
    const double on = std::min(std::pow(t, -n / (2.0 * s)), std::pow(t, -n / 2.0));
    return std::min(off, on);
}

HeatBoundReport heat_bound_check(int n, double s, const std::vector<std::pair<double, double>>& samples) {
    HeatBoundReport rep;
    std::vector<double> ratios;
    for (const auto& [r, t] : samples) {
        HeatBoundSample smp{r, t, heat_kernel_eval(n, s, r, t), heat_bound_shape(n, s, r, t), 0.0, "", ""};
        smp.ratio = smp.value / smp.bound;
        const double off = std::max(t, std::pow(t, s)) / std::pow(r, n + 2.0 * s);
        const double on = std::min(std::pow(t, -n / (2.0 * s)), std::pow(t, -n / 2.0));
        if (off <= on) {
            smp.branch = "off-diagonal";
            smp.time_branch = t >= 1.0 ? "t" : "t^s";
        } else {
            smp.branch = "on-diagonal";
            smp.time_branch = t >= 1.0 ? "t^-n/2s" : "t^-n/2";
        }
        rep.finite = rep.finite && std::isfinite(smp.ratio) && smp.ratio > 0.0;
        ratios.push_back(smp.ratio);
        rep.samples.push_back(smp);
    }
    if (!ratios.empty()) {
        rep.max_ratio = *std::max_element(ratios.begin(), ratios.end());
        rep.min_ratio = *std::min_element(ratios.begin(), ratios.end());
        std::vector<double> sorted = ratios;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
        const double median = sorted[sorted.size() / 2];
        for (std::size_t i = 0; i < ratios.size(); ++i)
            if (ratios[i] > 10.0 * median) rep.outliers.push_back(i);
    }
    return rep;
}

std::vector<std::pair<double, double>> log_grid(double r_lo, double r_hi, int nr, double t_lo, double t_hi, int nt) {
    if (!(r_lo > 0.0 && t_lo > 0.0 && r_hi >= r_lo && t_hi >= t_lo && nr >= 1 && nt >= 1))
        throw InvalidArgument("invalid log grid");
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < nr; ++i) {
        const double r = nr == 1 ? r_lo : r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (nr - 1));
        for (int j = 0; j < nt; ++j) {
            const double t = nt == 1 ? t_lo : t_lo * std::pow(t_hi / t_lo, static_cast<double>(j) / (nt - 1));
            out.emplace_back(r, t);
        }
    }
    return out;
}

RealField semigroup_apply(const RealField& f, double t, double s) {
    check_order(s);
    if (!(t >= 0.0)) throw InvalidArgument("semigroup requires t >= 0");
    if (t == 0.0) return f;
    const auto m = Multiplier::radial(f.grid, [t, s](double r) { return std::exp(-t * (r * r + fractional_symbol(r, s))); });
    return m.apply(f);
}

double radial_green_function(int n, double s, double a, double b, double c, double r, double* error_estimate) {
    check_dimension(n);
    check_order(s);
    if (!(a > 0.0) || !(b >= 0.0) || !(c > 0.0)) throw InvalidArgument("Green's function requires a > 0, b >= 0, c > 0");
    if (!(r >= 0.0)) throw InvalidArgument("radius must be non-negative");
    if (n >= 2 && r == 0.0) throw InvalidArgument("Green's function is singular at r = 0 for n >= 2");
    if (error_estimate) *error_estimate = 0.0;

    // Pure second-order symbol A k^2 + C: Yukawa potential.
    if (s == 0.0 || s == 1.0 || b == 0.0) {
        const double A = s == 1.0 ? a + b : a;
        const double C = s == 0.0 ? b + c : c;
        const double mu = std::sqrt(C / A);
        switch (n) {
            case 1: return std::exp(-mu * r) / (2.0 * A * mu);
            case 2: return boost::math::cyl_bessel_k(0, mu * r) / (2.0 * kPi * A);
            default: return std::exp(-mu * r) / (4.0 * kPi * A * r);
        }
    }

    // Rotate k -> i y: D(y) = c - a y^2 + b y^{2s} e^{i pi s}; K = (b sin(pi s) / pi) int y^{2s} G_n(y, r) / |D|^2 dy.
    const double cs = std::cos(kPi * s);
    const double sn = std::sin(kPi * s);
    auto re_d = [&](double y) { return c - a * y * y + b * cs * std::pow(y, 2.0 * s); };
    auto integrand = [&](double y) {
        if (y <= 0.0) return 0.0;
        const double y2s = std::pow(y, 2.0 * s);
        const double re = c - a * y * y + b * cs * y2s;
        const double im = b * sn * y2s;
        double g = 0.0;
        switch (n) {
            case 1: g = std::exp(-y * r); break;
            case 2: g = y * boost::math::cyl_bessel_k(0, y * r) / kPi; break;
            default: g = y * std::exp(-y * r) / (2.0 * kPi * r); break;
        }
        return y2s * g / (re * re + im * im);
    };
    // Near-resonance where Re D vanishes: |D| is smallest there.
    double hi = 1.0;
    while (re_d(hi) > 0.0) hi *= 2.0;
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    const auto bracket = boost::math::tools::toms748_solve(re_d, 0.0, hi, c, re_d(hi), tol, iters);
    const double y0 = 0.5 * (bracket.first + bracket.second);
    const double slope = std::abs(-2.0 * a * y0 + 2.0 * s * b * cs * std::pow(y0, 2.0 * s - 1.0));
    const double w = std::max(b * sn * std::pow(y0, 2.0 * s) / std::max(slope, 1e-300), 1e-6 * y0);

    std::vector<double> cuts{0.0};
    for (double x : {y0 - 20.0 * w, y0 - w, y0, y0 + w, y0 + 20.0 * w})
        if (x > cuts.back()) cuts.push_back(x);
    if (r > 0.0)
        for (double x : {1.0 / r, 10.0 / r, 40.0 / r}) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double x, double y) { return y - x <= 1e-9 * y; }), cuts.end());
    // First panel: y = c1 v^q with q = 2/(2s+1) turns the y^{2s} endpoint behaviour into ~v.
    const double c1 = cuts[1];
    const double q = 2.0 / (2.0 * s + 1.0);
    const auto first = quad::integrate(
        [&](double v) { return v > 0.0 ? integrand(c1 * std::pow(v, q)) * c1 * q * std::pow(v, q - 1.0) : 0.0; }, 0.0, 1.0,
        1e-11, 14);
    double total = first.value, err = first.error;
    for (std::size_t i = 1; i + 1 < cuts.size(); ++i) {
        const auto piece = quad::integrate(integrand, cuts[i], cuts[i + 1], 1e-11, 14);
        total += piece.value;
        err += piece.error;
    }
    const auto last = quad::integrate(integrand, cuts.back(), std::numeric_limits<double>::infinity(), 1e-11, 14);
    total += last.value;
    err += last.error;
    const double pref = b * sn / kPi;
    if (error_estimate) *error_estimate = pref * err;
    return pref * total;
}

double resolvent_kernel_eval(int n, double s, double lambda, double r, KernelConvention convention,
                             double* error_estimate) {
    if (!(lambda > 0.0)) throw InvalidArgument("resolvent requires lambda > 0");
    if (convention == KernelConvention::angular) return radial_green_function(n, s, 1.0, 1.0, lambda, r, error_estimate);
    const double two_pi = kFrequencyConversion;
    return radial_green_function(n, s, 1.0 / (two_pi * two_pi), std::pow(two_pi, -2.0 * s), lambda, r, error_estimate);
}

double resolvent_via_heat(int n, double s, double lambda, double r, double* error_estimate) {
    check_dimension(n);
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("heat route requires 0 < s < 1");
    if (!(lambda > 0.0) || !(r > 0.0)) throw InvalidArgument("heat route requires lambda > 0 and r > 0");
    // Below t_min, H(r, t) = t nu(r) + O(t^2) for r bounded away from 0.
    const double t_min = 1e-4 * std::min(1.0, r * r);
    const double nu = heat_kernel_small_time(n, s, r, 1.0);
    const double head = nu * (1.0 - std::exp(-lambda * t_min) * (1.0 + lambda * t_min)) / (lambda * lambda);
    // t = e^u on [t_min, 1], then [1, inf).
    auto f_log = [&](double u) {
        const double t = std::exp(u);
        return std::exp(-lambda * t) * heat_kernel_eval(n, s, r, t) * t;
    };
    auto f_lin = [&](double t) { return std::exp(-lambda * t) * heat_kernel_eval(n, s, r, t); };
    const auto mid = quad::integrate(f_log, std::log(t_min), 0.0, 1e-9, 12);
    const auto far = quad::integrate(f_lin, 1.0, std::numeric_limits<double>::infinity(), 1e-9, 12);
    if (error_estimate) *error_estimate = mid.error + far.error + std::abs(head) * 1e-3;
    return head + mid.value + far.value;
}

KernelSample sample_heat_kernel(int n, double s, const std::vector<double>& radii, const std::vector<double>& times) {
    KernelSample ks;
    ks.kind = "heat";
    ks.method = "radial-quadrature";
    for (double t : times) {
        for (double r : radii) {
            double err = 0.0;
            ks.points.push_back(r);
            ks.times_or_shift.push_back(t);
            ks.values.push_back(heat_kernel_eval(n, s, r, t, &err));
            ks.bound_ratio.push_back(s > 0.0 && r > 0.0 ? ks.values.back() / heat_bound_shape(n, s, r, t)
                                                        : std::numeric_limits<double>::quiet_NaN());
            ks.error_estimate = std::max(ks.error_estimate, err);
        }
    }
    return ks;
}

KernelSample sample_resolvent_kernel(int n, double s, double lambda, const std::vector<double>& radii,
                                     KernelConvention convention) {
    KernelSample ks;
    ks.kind = "resolvent";
    ks.method = "radial-quadrature";
    for (double r : radii) {
        double err = 0.0;
        ks.points.push_back(r);
        ks.times_or_shift.push_back(lambda);
        ks.values.push_back(resolvent_kernel_eval(n, s, lambda, r, convention, &err));
        ks.error_estimate = std::max(ks.error_estimate, err);
    }
    return ks;
}

double kato_norm(const RealField& V, double beta, double s) {
    check_order(s);
    if (!(beta > 0.0)) throw InvalidArgument("Kato norm requires beta > 0");
    const auto inv = Multiplier::radial(V.grid, [beta, s](double r) { return 1.0 / (r * r + fractional_symbol(r, s) + beta); });
    return inv.apply(Eigen::VectorXd(V.values.cwiseAbs())).maxCoeff();
}

TailValues free_space_tail(const GroundStateResult& state, const std::vector<double>& radii) {
    const GridSpec& g = state.field.grid;
    const int n = g.n;
    const double dx = g.spacing();
    const double s = state.params.s;
    const double p = state.params.p;
    const double shift = state.params.shift;
    if (!(shift > 0.0)) throw InvalidArgument("free-space tail requires a positive shift");
    const Eigen::VectorXd src =
        state.field.values.unaryExpr([p](double u) { return std::pow(std::abs(u), p) * u; }) * g.cell_volume();

    std::unordered_map<long long, double> cache;
    auto kernel = [&](long long q) {
        if (auto it = cache.find(q); it != cache.end()) return it->second;
        double k = 0.0;
        if (q == 0 && n >= 2) {
            // Cell average over the ball with the cell's volume.
            const double rc = std::pow(std::pow(dx, n) * n / unit_sphere_measure(n), 1.0 / n);
            const auto avg = quad::integrate(
                [&](double rr) {
                    return rr > 0.0 ? radial_green_function(n, s, 1.0, 1.0, shift, rr) * unit_sphere_measure(n) * std::pow(rr, n - 1)
                                    : 0.0;
                },
                0.0, rc, 1e-8, 12);
            k = avg.value / std::pow(dx, n);
        } else {
            k = radial_green_function(n, s, 1.0, 1.0, shift, std::sqrt(static_cast<double>(q)) * dx);
        }
        cache.emplace(q, k);
        return k;
    };

    TailValues out;
    const double far = 0.75 * g.L();
    for (double r : radii) {
        if (!(r >= 0.0) || r > 0.5 * g.L() + 1e-12) throw InvalidArgument("radius outside the trusted region [0, L/2]");
        const long long k = std::llround(r / dx);
        double sum = 0.0, outer = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double f = src[static_cast<Eigen::Index>(j)];
            if (f == 0.0) continue;
            const auto ijk = g.unflatten(j);
            long long q = 0;
            double ymax = 0.0;
            for (int d = 0; d < n; ++d) {
                const long long sj = g.signed_index(ijk[d]);
                const long long diff = (d == 0 ? k : 0) - sj;
                q += diff * diff;
                ymax = std::max(ymax, std::abs(static_cast<double>(sj) * dx));
            }
            const double c = kernel(q) * f;
            sum += c;
            if (ymax >= far) outer += c;
        }
        out.radii.push_back(static_cast<double>(k) * dx);
        out.values.push_back(sum);
        out.error_estimates.push_back(std::abs(outer));
    }
    return out;
}

TailFit tail_exponent(const std::vector<double>& radii, const std::vector<double>& values, double r_min, double r_max,
                      int n, double s) {
    if (radii.size() != values.size()) throw InvalidArgument("radii and values differ in length");
    if (!(r_min >= 1.0) || !(r_max > r_min)) throw InvalidArgument("tail window must satisfy 1 <= r_min < r_max");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] < r_min || radii[i] > r_max) continue;
        if (!(values[i] > 0.0)) throw InvalidArgument("tail values must be positive");
        lx.push_back(std::log(radii[i]));
        ly.push_back(std::log(values[i]));
    }
    if (lx.size() < 6) throw InvalidArgument("tail fit needs at least 6 points in the window");
    const double m = static_cast<double>(lx.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw InvalidArgument("degenerate tail window");
    TailFit fit;
    fit.r_min = r_min;
    fit.r_max = r_max;
    fit.points = static_cast<int>(lx.size());
    fit.fitted_exponent = sxy / sxx;
    fit.fitted_constant = std::exp(my - fit.fitted_exponent * mx);
    double ss_res = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double e = ly[i] - (my + fit.fitted_exponent * (lx[i] - mx));
        ss_res += e * e;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.expected_exponent = -(n + 2.0 * s);
    if (s <= 0.1) fit.small_s_reference = -static_cast<double>(n);
    return fit;
}

}  // namespace mxgs
