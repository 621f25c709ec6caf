#pragma once

// Test-side reference computations. Nothing here calls into the library's
// numerical routines: every value is produced by closed forms, plain sums or
// dense linear algebra.

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace oracle {

/// Composite Simpson rule with `panels` (even) subintervals.
double simpson(const std::function<double(double)>& f, double a, double b, int panels);

/// Standard one-dimensional infimum ||Q||_{p+2}^p for Q = ((p+2)/2)^{1/p} sech^{2/p}(p x/2),
/// integrated by Simpson on [-60, 60].
double standard_lambda_1d(double p);

/// lambda_0 and lambda_1 for n = 1 from the prefactors 2^{1-n/2+n/(p+2)} and 2^{n/2-n/(p+2)}.
double lambda0_1d(double p);
double lambda1_1d(double p);

/// Soliton of -u'' + a u = u^3: sqrt(2a) sech(sqrt(a) x).
double cubic_soliton(double a, double x);

/// c_{n,s} = s 2^{2s} Gamma(n/2 + s) / (pi^{n/2} Gamma(1 - s)).
double cns_closed_form(int n, double s);

/// Surface measure of S^{n-1}.
double sphere_measure(int n);

/// s = 1 heat kernel: symbol exp(-2t|xi|^2) with kernel e^{2 pi i x.xi}:
/// (pi/(2t))^{n/2} exp(-pi^2 r^2/(2t)).
double gaussian_heat_kernel(int n, double r, double t);

/// Dense one-dimensional periodic model on [-L, L) with N points (storage in
/// FFT order, x_j = j dx for j < N/2 and (j - N) dx otherwise).
struct Dense1D {
    int N;
    double L;
    double dx;
    std::vector<double> x;

    Dense1D(int N, double L);

    /// Matrix of the multiplier w(|k|), k = pi m / L, built as the explicit
    /// cosine sum (1/N) sum_m w(|k_m|) cos(k_m (x_i - x_j)) over m in [-N/2, N/2).
    Eigen::MatrixXd multiplier_matrix(const std::function<double(double)>& w) const;
    /// 1 + k^2 + |k|^{2s} (|k|^{2s} = 0 at k = 0 for s > 0, = 1 for s = 0).
    Eigen::MatrixXd operator_matrix(double s) const;
};

struct DenseGroundState {
    Eigen::VectorXd u;
    int iterations = 0;
    double step = 0.0;
};

/// Petviashvili iteration u <- M^{(p+1)/p} A^{-1} |u|^p u with dense A^{-1}.
DenseGroundState dense_ground_state(const Dense1D& d, double s, double p, int max_iterations = 2000, double tol = 1e-13);

/// All eigenvalues (ascending) of A - (p+1) diag(|u|^p).
Eigen::VectorXd dense_linearized_spectrum(const Dense1D& d, double s, double p, const Eigen::VectorXd& u);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace oracle
