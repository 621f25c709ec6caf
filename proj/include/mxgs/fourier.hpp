#pragma once

#include "mxgs/grid.hpp"

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace mxgs {

namespace detail {
struct FftPlan;
}

/// Real-to-complex transform pair for one grid shape (FFTW, estimate-mode plans).
///
/// Plans are cached process-wide; execution is reentrant. The spectrum uses the
/// unnormalized forward convention, inverse() divides by N^n.
class FourierTransform {
public:
    explicit FourierTransform(const GridSpec& grid);

    const GridSpec& grid() const { return grid_; }
    /// Number of stored half-spectrum coefficients, N^(n-1) * (N/2 + 1).
    std::size_t spectrum_size() const;

    std::vector<std::complex<double>> forward(std::span<const double> values) const;
    Eigen::VectorXd inverse(std::span<const std::complex<double>> spectrum) const;

    /// Signed lattice index (per axis) of half-spectrum entry k.
    std::array<int, 3> spectrum_lattice_index(std::size_t k) const;
    /// Lattice frequency vector of half-spectrum entry k.
    std::array<double, 3> spectrum_frequency(std::size_t k) const;

private:
    GridSpec grid_;
    std::shared_ptr<const detail::FftPlan> plan_;
};

/// Fourier multiplier with precomputed weights on the half-spectrum.
class Multiplier {
public:
    using RadialWeight = std::function<double(double)>;
    using VectorWeight = std::function<double(std::span<const double>)>;

    /// Weight depending only on |xi|.
    static Multiplier radial(const GridSpec& grid, const RadialWeight& weight);
    /// Arbitrary weight; rejected unless w(xi) = w(-xi) on the lattice.
    static Multiplier general(const GridSpec& grid, const VectorWeight& weight);

    const GridSpec& grid() const { return transform_.grid(); }
    const std::vector<double>& weights() const { return weights_; }
    double zero_mode() const { return weights_.front(); }

    Eigen::VectorXd apply(const Eigen::VectorXd& values) const;
    RealField apply(const RealField& f) const;

    Multiplier reciprocal() const;

private:
    explicit Multiplier(FourierTransform t) : transform_(std::move(t)) {}
    FourierTransform transform_;
    std::vector<double> weights_;
};

/// Inverse transform of weight(xi) * f^(xi).
RealField apply_multiplier(const RealField& f, const Multiplier::VectorWeight& weight);

/// Spectral derivative along `axis` (Nyquist mode of that axis set to zero).
RealField spectral_derivative(const RealField& f, int axis);

}  // namespace mxgs
