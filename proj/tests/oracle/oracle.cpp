#include "oracle.hpp"

#include <cmath>
#include <numbers>

namespace oracle {

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double sum = f(a) + f(b);
    for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return sum * h / 3.0;
}

double standard_lambda_1d(double p) {
    const double amp = std::pow((p + 2.0) / 2.0, 1.0 / p);
    auto q = [&](double x) { return amp * std::pow(1.0 / std::cosh(p * x / 2.0), 2.0 / p); };
    const double integral = simpson([&](double x) { return std::pow(q(x), p + 2.0); }, -60.0, 60.0, 400000);
    return std::pow(integral, p / (p + 2.0));
}

double lambda0_1d(double p) { return std::pow(2.0, 0.5 + 1.0 / (p + 2.0)) * standard_lambda_1d(p); }

double lambda1_1d(double p) { return std::pow(2.0, 0.5 - 1.0 / (p + 2.0)) * standard_lambda_1d(p); }

double cubic_soliton(double a, double x) { return std::sqrt(2.0 * a) / std::cosh(std::sqrt(a) * x); }

double cns_closed_form(int n, double s) {
    return s * std::pow(2.0, 2.0 * s) * std::tgamma(n / 2.0 + s) / (std::pow(std::numbers::pi, n / 2.0) * std::tgamma(1.0 - s));
}

double sphere_measure(int n) { return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0); }

double gaussian_heat_kernel(int n, double r, double t) {
    const double pi = std::numbers::pi;
    return std::pow(pi / (2.0 * t), n / 2.0) * std::exp(-pi * pi * r * r / (2.0 * t));
}

Dense1D::Dense1D(int N_, double L_) : N(N_), L(L_), dx(2.0 * L_ / N_), x(N_) {
    for (int j = 0; j < N; ++j) x[j] = (j < N / 2 ? j : j - N) * dx;
}

Eigen::MatrixXd Dense1D::multiplier_matrix(const std::function<double(double)>& w) const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    std::vector<double> weights(N), k(N);
    for (int m = -N / 2; m < N / 2; ++m) {
        k[m + N / 2] = std::numbers::pi * m / L;
        weights[m + N / 2] = w(std::abs(k[m + N / 2]));
    }
    for (int i = 0; i < N; ++i) {
        for (int j = i; j < N; ++j) {
            double sum = 0.0;
            for (int m = 0; m < N; ++m) sum += weights[m] * std::cos(k[m] * (x[i] - x[j]));
            A(i, j) = A(j, i) = sum / N;
        }
    }
    return A;
}

Eigen::MatrixXd Dense1D::operator_matrix(double s) const {
    return multiplier_matrix([s](double k) {
        const double frac = s == 0.0 ? 1.0 : (k == 0.0 ? 0.0 : std::pow(k, 2.0 * s));
        return 1.0 + k * k + frac;
    });
}

DenseGroundState dense_ground_state(const Dense1D& d, double s, double p, int max_iterations, double tol) {
    const Eigen::MatrixXd A = d.operator_matrix(s);
    const Eigen::LLT<Eigen::MatrixXd> llt(A);
    Eigen::VectorXd u(d.N);
    for (int j = 0; j < d.N; ++j) u[j] = std::exp(-d.x[j] * d.x[j]);
    const double gamma = (p + 1.0) / p;
    DenseGroundState out;
    for (int it = 1; it <= max_iterations; ++it) {
        const Eigen::VectorXd f = u.array().abs().pow(p) * u.array();
        const double M = u.dot(A * u) / u.dot(f);
        const Eigen::VectorXd next = std::pow(M, gamma) * llt.solve(f);
        out.step = (next - u).cwiseAbs().maxCoeff() / next.cwiseAbs().maxCoeff();
        u = next;
        out.iterations = it;
        if (out.step < tol) break;
    }
    out.u = u;
    return out;
}

Eigen::VectorXd dense_linearized_spectrum(const Dense1D& d, double s, double p, const Eigen::VectorXd& u) {
    Eigen::MatrixXd Lmat = d.operator_matrix(s);
    Lmat.diagonal() -= (p + 1.0) * u.array().abs().pow(p).matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Lmat, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
