#include "oracle.hpp"

#include "mxgs/error.hpp"
#include "mxgs/ground_state.hpp"
#include "mxgs/inner.hpp"
#include "mxgs/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

using namespace mxgs;

namespace {
const GroundStateResult& state(double s) {
    static std::map<double, GroundStateResult> cache;
    static const GridSpec g = build_grid(1, 2048, 40.0);
    auto it = cache.find(s);
    if (it == cache.end()) it = cache.emplace(s, solve_ground_state(SymbolParams{1, s, 2.0, 1.0}, g)).first;
    return it->second;
}
}  // namespace

TEST_CASE("frequency conversion constant") {
    CHECK(kFrequencyConversion == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-16));
}

TEST_CASE("heat kernel has unit mass") {
    for (int n : {1, 2, 3}) {
        for (double s : {0.25, 0.5, 0.75}) {
            for (double t : {0.1, 1.0}) CHECK(std::abs(heat_kernel_mass(n, s, t) - 1.0) < 1e-6);
        }
    }
    CHECK(std::abs(heat_kernel_mass(1, 0.5, 0.01) - 1.0) < 1e-6);
    CHECK(std::abs(heat_kernel_mass(1, 0.5, 10.0) - 1.0) < 1e-6);
}

TEST_CASE("heat kernel is positive and radially decreasing") {
    for (int n : {1, 3}) {
        for (double s : {0.3, 0.7}) {
            for (double t : {0.05, 1.0}) {
                const double a = heat_kernel_eval(n, s, 0.5, t), b = heat_kernel_eval(n, s, 1.0, t), c = heat_kernel_eval(n, s, 2.0, t);
                CHECK(a >= b);
                CHECK(b >= c);
                CHECK(c > 0.0);
            }
        }
    }
    CHECK_THROWS_AS(heat_kernel_eval(1, 0.5, 1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(heat_kernel_eval(1, 0.5, -1.0, 1.0), InvalidArgument);
}

TEST_CASE("s = 1 heat kernel is the Gaussian of exp(-2t|xi|^2)") {
    for (int n : {1, 2, 3}) {
        for (double t : {0.1, 1.0, 10.0}) {
            for (double r : {0.0, 0.1, 0.25, 0.5}) {
                const double ref = oracle::gaussian_heat_kernel(n, r, t);
                if (ref < 1e-3) continue;
                CHECK(std::abs(heat_kernel_eval(n, 1.0, r, t) - ref) < 1e-6 * ref);
            }
        }
    }
}

TEST_CASE("small-time heat kernel follows t times the Levy density") {
    const double s = 0.5, r = 2.0;
    const double t = 1e-4;
    CHECK(heat_kernel_eval(1, s, r, t) == doctest::Approx(heat_kernel_small_time(1, s, r, t)).epsilon(0.02));
    // Levy density uses c_{1,s} from the Gamma closed form
    const double nu = std::pow(2 * std::numbers::pi, -2 * s) * oracle::cns_closed_form(1, s) * std::pow(r, -1 - 2 * s);
    CHECK(heat_kernel_small_time(1, s, r, t) == doctest::Approx(t * nu).epsilon(1e-6));
}

TEST_CASE("heat bound branches and finiteness") {
    const double s = 0.5;
    const auto small_t = heat_bound_check(1, s, {{5.0, 1e-3}});
    CHECK(small_t.samples[0].branch == "off-diagonal");
    const auto large_t = heat_bound_check(1, s, {{0.5, 100.0}});
    CHECK(large_t.samples[0].branch == "on-diagonal");
    CHECK(large_t.samples[0].time_branch == "t^-n/2s");
    CHECK(heat_bound_check(1, s, {{0.01, 0.1}}).samples[0].time_branch == "t^-n/2");
    const auto grid = heat_bound_check(1, s, log_grid(0.1, 10.0, 10, 0.01, 100.0, 10));
    CHECK(grid.samples.size() == 100);
    CHECK(grid.finite);
    CHECK(grid.max_ratio > 0.0);
    CHECK(std::isfinite(grid.max_ratio));
    // the shape is an upper bound: the ratio never explodes
    const auto wide = heat_bound_check(1, s, log_grid(0.01, 100.0, 19, 1e-3, 1e3, 19));
    CHECK(wide.max_ratio < 2.0 * grid.max_ratio);
    CHECK(heat_bound_shape(1, 0.5, 2.0, 0.01) == doctest::Approx(std::sqrt(0.01) / 4.0));
}

TEST_CASE("semigroup: identity, positivity, mass, composition") {
    const auto g = build_grid(1, 512, 20.0);
    const auto f = sample(g, [](auto x) { return std::abs(x[0]) < 1.0 ? 1.0 : 0.0; });
    CHECK(semigroup_apply(f, 0.0, 0.5).values == f.values);
    const auto p = semigroup_apply(f, 0.1, 0.5);
    CHECK(p.values.minCoeff() > 0.0);
    CHECK(p.values.sum() == doctest::Approx(f.values.sum()).epsilon(1e-12));
    const auto two = semigroup_apply(semigroup_apply(f, 0.3, 0.5), 0.2, 0.5);
    const auto one = semigroup_apply(f, 0.5, 0.5);
    CHECK((two.values - one.values).cwiseAbs().maxCoeff() < 1e-10);
    CHECK_THROWS_AS(semigroup_apply(f, -1.0, 0.5), InvalidArgument);
    // s = 0 is the identity plus the heat flow: mass decays by e^{-t}
    CHECK(semigroup_apply(f, 0.5, 0.0).values.sum() == doctest::Approx(std::exp(-0.5) * f.values.sum()).epsilon(1e-12));
}

TEST_CASE("resolvent: closed forms at s = 1 in both conventions") {
    const double lam = 1.5;
    for (double r : {0.0, 0.3, 1.0, 2.5}) {
        const double ordinary = std::numbers::pi / std::sqrt(2 * lam) * std::exp(-std::numbers::pi * std::sqrt(2 * lam) * r);
        const double angular = std::exp(-std::sqrt(lam / 2) * r) / (2 * std::sqrt(2 * lam));
        CHECK(resolvent_kernel_eval(1, 1.0, lam, r) == doctest::Approx(ordinary).epsilon(1e-9));
        CHECK(resolvent_kernel_eval(1, 1.0, lam, r, KernelConvention::angular) == doctest::Approx(angular).epsilon(1e-9));
    }
}

TEST_CASE("resolvent: direct route against Laplace-of-heat") {
    for (double s : {0.25, 0.5, 0.75}) {
        for (double r : {0.5, 1.0, 2.0}) {
            const double a = resolvent_kernel_eval(1, s, 1.0, r), b = resolvent_via_heat(1, s, 1.0, r);
            CHECK(std::abs(a - b) < 1e-4 * std::abs(a));
        }
    }
    const double a3 = resolvent_kernel_eval(3, 0.5, 2.0, 1.0), b3 = resolvent_via_heat(3, 0.5, 2.0, 1.0);
    CHECK(std::abs(a3 - b3) < 1e-4 * a3);
    CHECK_THROWS_AS(resolvent_kernel_eval(1, 0.5, 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(resolvent_kernel_eval(2, 0.5, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("resolvent: zero-frequency value and periodic grid comparison") {
    // Gridded kernel on a large periodic box: A^{-1} delta / dx. Its total mass is 1/lambda,
    // and it matches the free-space quadrature where periodic images are negligible.
    const double lam = 1.0, s = 0.75;
    const auto g = build_grid(1, 16384, 400.0);
    RealField delta(g);
    delta.values[0] = 1.0 / g.spacing();
    const auto inv = Multiplier::radial(g, [&](double k) { return 1.0 / (k * k + fractional_symbol(k, s) + lam); });
    const auto K = inv.apply(delta);
    CHECK(K.values.sum() * g.spacing() == doctest::Approx(1.0 / lam).epsilon(1e-12));
    for (double r : {0.5, 2.0, 8.0}) {
        const auto idx = static_cast<Eigen::Index>(std::lround(r / g.spacing()));
        const double direct = resolvent_kernel_eval(1, s, lam, idx * g.spacing(), KernelConvention::angular);
        CHECK(K.values[idx] == doctest::Approx(direct).epsilon(1e-4));
    }
    // applying the operator returns the discrete delta
    const auto A = Multiplier::radial(g, [&](double k) { return k * k + fractional_symbol(k, s) + lam; });
    const auto back = A.apply(K);
    CHECK((back.values - delta.values).cwiseAbs().maxCoeff() < 1e-9 * delta.max_abs());
}

TEST_CASE("resolvent tail stays below C |x|^{-n}") {
    for (double s : {0.25, 0.75}) {
        double prev = INFINITY;
        for (double r : {2.0, 4.0, 8.0, 16.0, 32.0}) {
            const double c = resolvent_kernel_eval(1, s, 1.0, r) * r;
            CHECK(std::isfinite(c));
            CHECK(c <= prev * 1.0000001);
            prev = c;
        }
    }
}

TEST_CASE("kernel samples") {
    const auto hs = sample_heat_kernel(1, 0.5, {0.5, 1.0}, {0.1, 1.0});
    CHECK(hs.kind == "heat");
    CHECK(hs.values.size() == 4);
    CHECK(hs.bound_ratio.size() == 4);
    for (double v : hs.values) CHECK(v > 0.0);
    const auto rs = sample_resolvent_kernel(1, 0.5, 1.0, {0.5, 1.0, 2.0});
    CHECK(rs.kind == "resolvent");
    CHECK(rs.values[0] > rs.values[1]);
    CHECK(rs.values[1] > rs.values[2]);
}

TEST_CASE("Kato norms") {
    const auto g = build_grid(1, 256, 10.0);
    RealField c(g);
    c.values.setConstant(2.5);
    CHECK(kato_norm(c, 4.0, 0.5) == doctest::Approx(2.5 / 4.0).epsilon(1e-14));
    const auto& u = state(0.5);
    RealField V(u.field.grid);
    V.values = 3.0 * u.field.values.array().square().matrix();
    const double k1 = kato_norm(V, 1.0, 0.5), k10 = kato_norm(V, 10.0, 0.5), k100 = kato_norm(V, 100.0, 0.5);
    CHECK(k1 > k10);
    CHECK(k10 > k100);
    CHECK(k100 / k1 < 0.1);
    const auto bump = sample(g, [](auto x) { return std::exp(-x[0] * x[0]) * (1 + x[0]); });
    double prev = INFINITY;
    for (double beta : {0.5, 2.0, 8.0, 32.0}) {
        const double k = kato_norm(bump, beta, 0.3);
        CHECK(k < prev);
        prev = k;
    }
    CHECK_THROWS_AS(kato_norm(c, 0.0, 0.5), InvalidArgument);
}

TEST_CASE("free-space tail: core consistency, positivity, monotonicity") {
    const auto& u = state(0.75);
    std::vector<double> radii;
    for (double r = 0.0; r <= 20.0; r += 0.5) radii.push_back(r);
    const auto tail = free_space_tail(u, radii);
    const double dx = u.field.grid.spacing();
    for (std::size_t i = 0; i < tail.radii.size(); ++i) {
        CHECK(tail.values[i] > 0.0);
        if (i > 0) CHECK(tail.values[i] < tail.values[i - 1]);
        if (tail.radii[i] <= 2.0) {
            const double grid_value = u.field.values[static_cast<Eigen::Index>(std::lround(tail.radii[i] / dx))];
            CHECK(std::abs(tail.values[i] / grid_value - 1.0) < 1e-3);
        }
    }
    CHECK_THROWS_AS(free_space_tail(u, {25.0}), InvalidArgument);
}

TEST_CASE("free-space tail exponent at s = 0.5") {
    std::vector<double> radii;
    for (double r = 8.0; r <= 20.0; r += 1.0) radii.push_back(r);
    const auto tail = free_space_tail(state(0.5), radii);
    const auto fit = tail_exponent(tail.radii, tail.values, 8.0, 20.0, 1, 0.5);
    CHECK(fit.expected_exponent == doctest::Approx(-2.0));
    CHECK(std::abs(fit.fitted_exponent + 2.0) < 0.15);
    CHECK_FALSE(fit.small_s_reference);
}

TEST_CASE("tail_exponent on synthetic data and its preconditions") {
    std::vector<double> r, v;
    for (double x = 1.0; x <= 30.0; x += 1.0) r.push_back(x), v.push_back(7.0 * std::pow(x, -3.0));
    const auto fit = tail_exponent(r, v, 2.0, 25.0, 1, 1.0);
    CHECK(std::abs(fit.fitted_exponent + 3.0) < 1e-10);
    CHECK(fit.fitted_constant == doctest::Approx(7.0).epsilon(1e-10));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK(fit.points == 24);
    CHECK(oracle::loglog_slope(std::vector<double>(r.begin() + 1, r.begin() + 25), std::vector<double>(v.begin() + 1, v.begin() + 25)) ==
          doctest::Approx(fit.fitted_exponent).epsilon(1e-12));
    const auto small = tail_exponent(r, v, 2.0, 25.0, 1, 0.05);
    REQUIRE(small.small_s_reference);
    CHECK(*small.small_s_reference == -1.0);

    auto bad = v;
    bad[5] = 0.0;
    CHECK_THROWS_AS(tail_exponent(r, bad, 2.0, 25.0, 1, 1.0), InvalidArgument);
    CHECK_THROWS_AS(tail_exponent(r, v, 2.0, 5.0, 1, 1.0), InvalidArgument);
    CHECK_THROWS_AS(tail_exponent(r, v, 0.5, 25.0, 1, 1.0), InvalidArgument);
}
