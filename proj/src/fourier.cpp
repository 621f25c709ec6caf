#include "mxgs/fourier.hpp"

#include "mxgs/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace mxgs {

namespace detail {

struct FftPlan {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    std::size_t real_size = 0;
    std::size_t complex_size = 0;

    FftPlan() = default;
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    // Plans are cached for the process lifetime, so this only runs at exit.
    ~FftPlan() {
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
    }

    // The FFTW planner is not thread-safe; execution with new-array calls is.
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }
};

namespace {

struct RealBuffer {
    explicit RealBuffer(std::size_t n) : ptr(fftw_alloc_real(n)) {}
    ~RealBuffer() { fftw_free(ptr); }
    RealBuffer(const RealBuffer&) = delete;
    RealBuffer& operator=(const RealBuffer&) = delete;
    double* ptr;
};

struct ComplexBuffer {
    explicit ComplexBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)) {}
    ~ComplexBuffer() { fftw_free(ptr); }
    ComplexBuffer(const ComplexBuffer&) = delete;
    ComplexBuffer& operator=(const ComplexBuffer&) = delete;
    fftw_complex* ptr;
};

std::shared_ptr<const FftPlan> plan_for(const GridSpec& g) {
    static std::mutex cache_mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const FftPlan>> cache;
    std::lock_guard cache_lock(cache_mutex);
    const auto key = std::make_pair(g.n, g.N());
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    auto plan = std::make_shared<FftPlan>();
    plan->real_size = g.size();
    plan->complex_size = g.size() / static_cast<std::size_t>(g.N()) * static_cast<std::size_t>(g.N() / 2 + 1);
    int dims[3] = {g.N(), g.N(), g.N()};
    {
        std::lock_guard lock(FftPlan::planner_mutex());
        RealBuffer r(plan->real_size);
        ComplexBuffer c(plan->complex_size);
        plan->r2c = fftw_plan_dft_r2c(g.n, dims, r.ptr, c.ptr, FFTW_ESTIMATE);
        plan->c2r = fftw_plan_dft_c2r(g.n, dims, c.ptr, r.ptr, FFTW_ESTIMATE);
    }
    if (!plan->r2c || !plan->c2r) throw ComputeError("FFTW plan creation failed");
    cache[key] = plan;
    return plan;
}

}  // namespace
}  // namespace detail

FourierTransform::FourierTransform(const GridSpec& grid) : grid_(grid), plan_(detail::plan_for(grid)) {}

std::size_t FourierTransform::spectrum_size() const { return plan_->complex_size; }

std::vector<std::complex<double>> FourierTransform::forward(std::span<const double> values) const {
    if (values.size() != plan_->real_size) throw InvalidArgument("transform input has wrong size");
    detail::RealBuffer in(plan_->real_size);
    detail::ComplexBuffer out(plan_->complex_size);
    std::copy(values.begin(), values.end(), in.ptr);
    fftw_execute_dft_r2c(plan_->r2c, in.ptr, out.ptr);
    std::vector<std::complex<double>> coef(plan_->complex_size);
    for (std::size_t k = 0; k < coef.size(); ++k) coef[k] = {out.ptr[k][0], out.ptr[k][1]};
    return coef;
}

Eigen::VectorXd FourierTransform::inverse(std::span<const std::complex<double>> spectrum) const {
    if (spectrum.size() != plan_->complex_size) throw InvalidArgument("spectrum has wrong size");
    detail::ComplexBuffer in(plan_->complex_size);
    detail::RealBuffer out(plan_->real_size);
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        in.ptr[k][0] = spectrum[k].real();
        in.ptr[k][1] = spectrum[k].imag();
    }
    fftw_execute_dft_c2r(plan_->c2r, in.ptr, out.ptr);
    const double scale = 1.0 / static_cast<double>(plan_->real_size);
    Eigen::VectorXd v(static_cast<Eigen::Index>(plan_->real_size));
    for (std::size_t i = 0; i < plan_->real_size; ++i) v[static_cast<Eigen::Index>(i)] = out.ptr[i] * scale;
    return v;
}

std::array<int, 3> FourierTransform::spectrum_lattice_index(std::size_t k) const {
    const int N = grid_.N();
    const auto half = static_cast<std::size_t>(N / 2 + 1);
    std::array<int, 3> j{0, 0, 0};
    const int last = static_cast<int>(k % half);
    k /= half;
    j[grid_.n - 1] = last == N / 2 ? -N / 2 : last;
    for (int d = grid_.n - 2; d >= 0; --d) {
        j[d] = grid_.signed_index(static_cast<int>(k % static_cast<std::size_t>(N)));
        k /= static_cast<std::size_t>(N);
    }
    return j;
}

std::array<double, 3> FourierTransform::spectrum_frequency(std::size_t k) const {
    const auto j = spectrum_lattice_index(k);
    std::array<double, 3> xi{0.0, 0.0, 0.0};
    for (int d = 0; d < grid_.n; ++d) xi[d] = M_PI * j[d] / grid_.L();
    return xi;
}

Multiplier Multiplier::radial(const GridSpec& grid, const RadialWeight& weight) {
    Multiplier m{FourierTransform(grid)};
    m.weights_.resize(m.transform_.spectrum_size());
    for (std::size_t k = 0; k < m.weights_.size(); ++k) {
        const auto xi = m.transform_.spectrum_frequency(k);
        const double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
        const double w = weight(r);
        if (!std::isfinite(w)) throw InvalidArgument("multiplier weight is not finite at |xi| = " + std::to_string(r));
        m.weights_[k] = w;
    }
    return m;
}

Multiplier Multiplier::general(const GridSpec& grid, const VectorWeight& weight) {
    // Hermitian symmetry on the full lattice: w(xi) must equal w(-xi) (wrapped).
    const int N = grid.N();
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        const auto ijk = grid.unflatten(idx);
        double xi[3] = {0, 0, 0};
        double mxi[3] = {0, 0, 0};
        for (int d = 0; d < grid.n; ++d) {
            const int j = grid.signed_index(ijk[d]);
            const int mj = grid.signed_index((N - ijk[d]) % N);
            xi[d] = M_PI * j / grid.L();
            mxi[d] = M_PI * mj / grid.L();
        }
        const double a = weight(std::span<const double>(xi, static_cast<std::size_t>(grid.n)));
        const double b = weight(std::span<const double>(mxi, static_cast<std::size_t>(grid.n)));
        if (!std::isfinite(a)) throw InvalidArgument("multiplier weight is not finite on the lattice");
        if (std::abs(a - b) > 1e-14 * std::max({1.0, std::abs(a), std::abs(b)}))
            throw InvalidArgument("multiplier weight breaks Hermitian symmetry w(xi) = w(-xi)");
    }
    Multiplier m{FourierTransform(grid)};
    m.weights_.resize(m.transform_.spectrum_size());
    for (std::size_t k = 0; k < m.weights_.size(); ++k) {
        const auto xi = m.transform_.spectrum_frequency(k);
        m.weights_[k] = weight(std::span<const double>(xi.data(), static_cast<std::size_t>(grid.n)));
    }
    return m;
}

Eigen::VectorXd Multiplier::apply(const Eigen::VectorXd& values) const {
    auto coef = transform_.forward(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
    for (std::size_t k = 0; k < coef.size(); ++k) coef[k] *= weights_[k];
    return transform_.inverse(coef);
}

RealField Multiplier::apply(const RealField& f) const {
    if (!(f.grid == grid())) throw InvalidArgument("multiplier and field grids differ");
    return RealField(f.grid, apply(f.values));
}

Multiplier Multiplier::reciprocal() const {
    Multiplier m = *this;
    for (double& w : m.weights_) {
        if (w == 0.0) throw InvalidArgument("multiplier has a zero weight and cannot be inverted");
        w = 1.0 / w;
    }
    return m;
}

RealField apply_multiplier(const RealField& f, const Multiplier::VectorWeight& weight) {
    return Multiplier::general(f.grid, weight).apply(f);
}

RealField spectral_derivative(const RealField& f, int axis) {
    if (axis < 0 || axis >= f.grid.n) throw InvalidArgument("derivative axis out of range");
    FourierTransform t(f.grid);
    auto coef = t.forward(std::span<const double>(f.values.data(), f.size()));
    const int N = f.grid.N();
    for (std::size_t k = 0; k < coef.size(); ++k) {
        const auto j = t.spectrum_lattice_index(k);
        if (j[axis] == -N / 2) {
            coef[k] = 0.0;
            continue;
        }
        coef[k] *= std::complex<double>(0.0, M_PI * j[axis] / f.grid.L());
    }
    return RealField(f.grid, t.inverse(coef));
}

}  // namespace mxgs
