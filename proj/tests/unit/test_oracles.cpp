// Checks on the test-side oracles themselves, before they are used against the library.
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

TEST_CASE("Simpson integrates sech^4 to its closed form") {
    // int sech^4 = 4/3
    const double v = oracle::simpson([](double x) { return std::pow(1.0 / std::cosh(x), 4); }, -40, 40, 200000);
    CHECK(v == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("standard 1-D infimum for p = 2 is 4/sqrt(3)") {
    // Q = sqrt(2) sech, int Q^4 = 16/3, ||Q||_4^2 = 4/sqrt(3)
    CHECK(oracle::standard_lambda_1d(2.0) == doctest::Approx(4.0 / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("endpoint levels carry the dimensional prefactors") {
    const double std2 = 4.0 / std::sqrt(3.0);
    CHECK(oracle::lambda0_1d(2.0) == doctest::Approx(std::pow(2.0, 0.75) * std2).epsilon(1e-12));
    CHECK(oracle::lambda1_1d(2.0) == doctest::Approx(std::pow(2.0, 0.25) * std2).epsilon(1e-12));
    CHECK(oracle::lambda0_1d(2.0) == doctest::Approx(3.883934173659).epsilon(1e-11));
}

TEST_CASE("cubic soliton solves -u'' + a u = u^3") {
    for (double a : {1.0, 2.0}) {
        for (double x : {0.0, 0.3, 1.7}) {
            const double h = 1e-4;
            const double u = oracle::cubic_soliton(a, x);
            const double upp = (oracle::cubic_soliton(a, x + h) - 2 * u + oracle::cubic_soliton(a, x - h)) / (h * h);
            CHECK(std::abs(-upp + a * u - u * u * u) < 1e-6);
        }
    }
}

TEST_CASE("closed-form c_{n,s} reproduces the endpoint limits") {
    // s -> 1: 2 (n = 1), 4n / omega_{n-1} (n >= 2); s -> 0: 1 (n = 1), 2 / omega_{n-1} (n >= 2)
    const double s1 = 1.0 - 1e-7, s0 = 1e-7;
    CHECK(oracle::cns_closed_form(1, s1) / (s1 * (1 - s1)) == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(oracle::cns_closed_form(1, s0) / (s0 * (1 - s0)) == doctest::Approx(1.0).epsilon(1e-5));
    for (int n : {2, 3}) {
        const double w = oracle::sphere_measure(n);
        CHECK(oracle::cns_closed_form(n, s1) / (s1 * (1 - s1)) == doctest::Approx(4.0 * n / w).epsilon(1e-5));
        CHECK(oracle::cns_closed_form(n, s0) / (s0 * (1 - s0)) == doctest::Approx(2.0 / w).epsilon(1e-5));
    }
    CHECK(oracle::sphere_measure(2) == doctest::Approx(2 * std::numbers::pi));
}

TEST_CASE("Gaussian heat kernel has unit mass") {
    for (double t : {0.1, 1.0, 10.0}) {
        const double m = oracle::simpson([t](double x) { return oracle::gaussian_heat_kernel(1, std::abs(x), t); }, -60, 60, 200000);
        CHECK(m == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("dense operator matrix acts on single cosines by its symbol") {
    const oracle::Dense1D d(32, M_PI);
    const Eigen::MatrixXd A = d.operator_matrix(0.5);
    Eigen::VectorXd c(32);
    for (int j = 0; j < 32; ++j) c[j] = std::cos(3.0 * d.x[j]);
    CHECK(((A * c) - (1 + 9 + 3) * c).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dense ground state satisfies its own equation") {
    const oracle::Dense1D d(64, 12.0);
    const auto gs = oracle::dense_ground_state(d, 0.5, 2.0);
    const Eigen::MatrixXd A = d.operator_matrix(0.5);
    const Eigen::VectorXd res = A * gs.u - gs.u.array().cube().matrix();
    CHECK(res.cwiseAbs().maxCoeff() < 1e-9 * gs.u.cwiseAbs().maxCoeff());
    CHECK(gs.u.minCoeff() > 0.0);
}

TEST_CASE("log-log slope recovers an exact power") {
    std::vector<double> x, y;
    for (double r = 1; r < 20; r += 1.5) x.push_back(r), y.push_back(5.0 * std::pow(r, -2.5));
    CHECK(oracle::loglog_slope(x, y) == doctest::Approx(-2.5).epsilon(1e-12));
}
