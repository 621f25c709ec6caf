#include "oracle.hpp"

#include "mxgs/cns.hpp"
#include "mxgs/error.hpp"
#include "mxgs/fourier.hpp"
#include "mxgs/grid.hpp"
#include "mxgs/inner.hpp"
#include "mxgs/symbol.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mxgs;

namespace {
RealField random_field(const GridSpec& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    RealField f(g);
    for (auto& v : f.values) v = nd(rng);
    return f;
}
}  // namespace

TEST_CASE("build_grid frequencies and validation") {
    const auto g = build_grid(1, 8, M_PI);
    const auto k = axis_frequencies(g);
    const std::vector<double> expected{0, 1, 2, 3, -4, -3, -2, -1};
    for (int i = 0; i < 8; ++i) CHECK(k[i] == doctest::Approx(expected[i]).epsilon(1e-15));

    const auto g2 = build_grid(2, 8, 1.0);
    CHECK(g2.size() == 64);
    double kmax = 0;
    for (double x : axis_frequencies(g2)) kmax = std::max(kmax, std::abs(x));
    CHECK(kmax == doctest::Approx(4 * M_PI));

    CHECK_THROWS_AS(build_grid(1, 7, 1.0), InvalidArgument);
    CHECK_THROWS_AS(build_grid(4, 8, 1.0), InvalidArgument);
    CHECK_THROWS_AS(build_grid(0, 8, 1.0), InvalidArgument);
    CHECK_THROWS_AS(build_grid(1, 8, 0.0), InvalidArgument);
    CHECK_THROWS_AS(build_grid(1, 8, -1.0), InvalidArgument);
    CHECK_THROWS_AS(build_grid(1, 6, 1.0), InvalidArgument);
}

TEST_CASE("zero frequency appears exactly once") {
    const auto g = build_grid(3, 8, 2.0);
    FourierTransform ft(g);
    int zeros = 0;
    for (std::size_t k = 0; k < ft.spectrum_size(); ++k) {
        const auto xi = ft.spectrum_frequency(k);
        if (xi[0] == 0 && xi[1] == 0 && xi[2] == 0) ++zeros;
    }
    CHECK(zeros == 1);
}

TEST_CASE("eval_symbol examples and zero-mode convention") {
    SymbolParams p{1, 0.5, 2.0, 1.0};
    CHECK(eval_symbol(p, 0.0) == doctest::Approx(1.0));
    CHECK(eval_symbol(p, 1.0) == doctest::Approx(3.0));
    CHECK(eval_symbol(p, 4.0) == doctest::Approx(21.0));
    SymbolParams p0{1, 0.0, 2.0, 1.0};
    CHECK(eval_symbol(p0, 0.0) == doctest::Approx(2.0));
    CHECK(eval_symbol(p0, 3.0) == doctest::Approx(11.0));
    CHECK(fractional_symbol(0.0, 0.3) == 0.0);
    CHECK(fractional_symbol(0.0, 0.0) == 1.0);
    const double xi[2] = {3.0, 4.0};
    CHECK(eval_symbol(SymbolParams{2, 0.5, 2.0, 1.0}, std::span<const double>(xi, 2)) == doctest::Approx(1 + 25 + 5));
}

TEST_CASE("symbol parameter validation") {
    CHECK_THROWS_AS(validate(SymbolParams{1, 1.2, 2.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(validate(SymbolParams{1, -0.1, 2.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(validate(SymbolParams{1, 0.5, 0.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(validate(SymbolParams{1, 0.5, 2.0, -1.0}), InvalidArgument);
    CHECK_THROWS_AS(validate(SymbolParams{3, 0.5, 4.0, 1.0}), InvalidArgument);
    CHECK_NOTHROW(validate(SymbolParams{3, 0.5, 3.9, 1.0}));
    CHECK_NOTHROW(validate(SymbolParams{2, 0.5, 50.0, 1.0}));
    try {
        validate(SymbolParams{3, 0.5, 5.0, 1.0});
        FAIL("expected a throw");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("supercritical exponent") != std::string::npos);
    }
    CHECK(std::isinf(critical_sobolev_exponent(2)));
    CHECK(critical_sobolev_exponent(3) == doctest::Approx(6.0));
}

TEST_CASE("apply_multiplier single-mode eigenrelations") {
    const double L = 5.0;
    const auto g = build_grid(1, 64, L);
    const auto c = sample(g, [&](auto x) { return std::cos(M_PI * x[0] / L); });
    auto id = apply_multiplier(c, [](std::span<const double>) { return 1.0; });
    CHECK((id.values - c.values).cwiseAbs().maxCoeff() < 1e-14);
    auto lap = apply_multiplier(c, [](std::span<const double> xi) { return xi[0] * xi[0]; });
    CHECK((lap.values - std::pow(M_PI / L, 2) * c.values).cwiseAbs().maxCoeff() < 1e-13);
    auto half = Multiplier::radial(g, [](double r) { return fractional_symbol(r, 0.5); }).apply(c);
    CHECK((half.values - (M_PI / L) * c.values).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("apply_multiplier rejects non-Hermitian weights") {
    const auto g = build_grid(1, 16, 1.0);
    CHECK_THROWS_AS(Multiplier::general(g, [](std::span<const double> xi) { return xi[0]; }), InvalidArgument);
    const auto g2 = build_grid(2, 8, 1.0);
    CHECK_THROWS_AS(Multiplier::general(g2, [](std::span<const double> xi) { return 1.0 + xi[0] * xi[1] * xi[1]; }),
                    InvalidArgument);
    // odd in each coordinate: the Nyquist row maps to itself, so the discrete grid rejects it
    CHECK_THROWS_AS(Multiplier::general(g2, [](std::span<const double> xi) { return 1.0 + xi[0] * xi[1]; }),
                    InvalidArgument);
    CHECK_NOTHROW(Multiplier::general(g2, [](std::span<const double> xi) { return 1.0 + std::cos(xi[0] * xi[1]); }));
}

TEST_CASE("multiplier linearity and transform round trip") {
    for (int n : {1, 2, 3}) {
        const auto g = build_grid(n, n == 1 ? 256 : (n == 2 ? 32 : 16), 3.0);
        const auto u = random_field(g, 1), v = random_field(g, 2);
        const auto A = operator_multiplier(g, SymbolParams{n, 0.3, 2.0, 1.0});
        const Eigen::VectorXd lhs = A.apply(Eigen::VectorXd(2.5 * u.values - 1.5 * v.values));
        const Eigen::VectorXd rhs = 2.5 * A.apply(u.values) - 1.5 * A.apply(v.values);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * rhs.cwiseAbs().maxCoeff());

        FourierTransform ft(g);
        const auto coef = ft.forward(std::span<const double>(u.values.data(), u.size()));
        const Eigen::VectorXd back = ft.inverse(coef);
        CHECK((back - u.values).norm() < 1e-12 * u.values.norm());
    }
}

TEST_CASE("spectral derivative of a sine") {
    const double L = 4.0;
    const auto g = build_grid(1, 128, L);
    const auto f = sample(g, [&](auto x) { return std::sin(3 * M_PI * x[0] / L); });
    const auto df = spectral_derivative(f, 0);
    const auto ref = sample(g, [&](auto x) { return 3 * M_PI / L * std::cos(3 * M_PI * x[0] / L); });
    CHECK((df.values - ref.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("weighted_inner examples") {
    const double L = 3.0;
    const auto g = build_grid(1, 32, L);
    const double V = 2 * L;
    RealField one(g);
    one.values.setOnes();
    CHECK(weighted_norm_sq(one, weight::SobolevS{0.5}) == doctest::Approx(V));

    const auto c = sample(g, [&](auto x) { return std::cos(M_PI * x[0] / L); });
    const auto s = sample(g, [&](auto x) { return std::sin(M_PI * x[0] / L); });
    CHECK(std::abs(weighted_inner(c, s, weight::SobolevS{0.5})) < 1e-13);
    CHECK(std::abs(weighted_inner(c, s, weight::H2{})) < 1e-13);
    CHECK(std::abs(weighted_inner(c, s, weight::L2{})) < 1e-13);

    // cos(x) on L = pi, N = 64, s = 0.5: (V/2)(1 + 1 + 1) with V = 2 pi
    const auto g2 = build_grid(1, 64, M_PI);
    const auto cx = sample(g2, [](auto x) { return std::cos(x[0]); });
    CHECK(weighted_norm_sq(cx, weight::SobolevS{0.5}) == doctest::Approx(3 * M_PI).epsilon(1e-13));

    CHECK_THROWS_AS(weighted_inner(c, cx, weight::L2{}), InvalidArgument);
}

TEST_CASE("Sobolev weight decomposes into its three terms") {
    const auto g = build_grid(2, 32, 4.0);
    const auto u = sample(g, [](auto x) { return std::exp(-x[0] * x[0] - 0.5 * x[1] * x[1]) * (1 + x[0]); });
    const double s = 0.35;
    const double total = weighted_norm_sq(u, weight::SobolevS{s});
    const double mass = weighted_norm_sq(u, weight::L2{});
    const double grad = weighted_norm_sq(u, weight::Custom{[](double r) { return r * r; }});
    const double frac = weighted_norm_sq(u, weight::Custom{[s](double r) { return fractional_symbol(r, s); }});
    CHECK(total == doctest::Approx(mass + grad + frac).epsilon(1e-13));
    CHECK(weighted_norm_sq(u, weight::H1{}) == doctest::Approx(mass + grad).epsilon(1e-13));

    const auto w1 = weight_multiplier(g, weight::SobolevS{1.0});
    const auto w0 = weight_multiplier(g, weight::SobolevS{0.0});
    FourierTransform ft(g);
    for (std::size_t k = 0; k < ft.spectrum_size(); k += 7) {
        const auto xi = ft.spectrum_frequency(k);
        const double r2 = xi[0] * xi[0] + xi[1] * xi[1];
        CHECK(w1.weights()[k] == doctest::Approx(1 + 2 * r2).epsilon(1e-13));
        CHECK(w0.weights()[k] == doctest::Approx(2 + r2).epsilon(1e-13));
    }
}

TEST_CASE("Parseval: L2 inner product equals the physical-space sum") {
    const auto g = build_grid(1, 128, 6.0);
    const auto u = random_field(g, 3), v = random_field(g, 4);
    CHECK(weighted_inner(u, v, weight::L2{}) == doctest::Approx(g.cell_volume() * u.values.dot(v.values)).epsilon(1e-12));
    CHECK(lp_norm(u, 2.0) == doctest::Approx(std::sqrt(l2_inner(u, u))).epsilon(1e-13));
}

TEST_CASE("compute_cns matches the Gamma-function closed form") {
    for (int n : {1, 2, 3}) {
        for (double s : {0.1, 0.3, 0.5, 0.8, 0.95}) {
            const auto r = compute_cns(n, s);
            CHECK(r.value == doctest::Approx(oracle::cns_closed_form(n, s)).epsilon(1e-8));
        }
    }
    CHECK_THROWS_AS(compute_cns(1, 0.0), InvalidArgument);
    CHECK_THROWS_AS(compute_cns(1, 1.0), InvalidArgument);
}

TEST_CASE("c_{n,s}/(s(1-s)) approaches its endpoint limits") {
    // s -> 1: 2 for n = 1, 4n/omega_{n-1} for n >= 2; s -> 0: 1 for n = 1, 2/omega_{n-1}
    auto ratio = [](int n, double s) { return compute_cns(n, s).value / (s * (1 - s)); };
    CHECK(ratio(1, 0.99) == doctest::Approx(2.0).epsilon(0.02));
    CHECK(ratio(1, 0.01) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(ratio(2, 0.99) == doctest::Approx(8.0 / unit_sphere_measure(2)).epsilon(0.02));
    CHECK(ratio(2, 0.01) == doctest::Approx(2.0 / unit_sphere_measure(2)).epsilon(0.02));
    CHECK(ratio(3, 0.99) == doctest::Approx(12.0 / unit_sphere_measure(3)).epsilon(0.02));
    // monotone approach near each endpoint
    CHECK(std::abs(ratio(1, 0.99) - 2.0) < std::abs(ratio(1, 0.95) - 2.0));
    CHECK(std::abs(ratio(1, 0.01) - 1.0) < std::abs(ratio(1, 0.05) - 1.0));
    CHECK(std::abs(ratio(2, 0.99) - 8.0 / unit_sphere_measure(2)) < std::abs(ratio(2, 0.95) - 8.0 / unit_sphere_measure(2)));
}

TEST_CASE("circular shift and ascending reordering are exact") {
    const auto g = build_grid(2, 8, 1.0);
    const auto f = random_field(g, 5);
    const auto back = from_ascending(g, to_ascending(f));
    CHECK(back.values == f.values);
    const auto shifted = circular_shift(f, {3, 5, 0});
    CHECK(shifted.values[0] == f.values[static_cast<Eigen::Index>(g.flatten({3, 5, 0}))]);
    const auto asc = to_ascending(f);
    CHECK(asc[0] == f.values[static_cast<Eigen::Index>(g.flatten({4, 4, 0}))]);  // (-L, -L)
}
