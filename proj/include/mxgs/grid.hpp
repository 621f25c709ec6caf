#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <vector>

namespace mxgs {

/// Periodic tensor grid on [-L, L)^n with N points per axis.
///
/// Samples are stored in FFT order: along each axis index i < N/2 sits at
/// x = i*dx and index i >= N/2 at x = (i - N)*dx, so the origin is index 0.
/// Multi-dimensional data is row-major with axis 0 slowest.
struct GridSpec {
    int n = 1;
    int points_per_axis = 0;
    double half_length = 0.0;

    int N() const { return points_per_axis; }
    double L() const { return half_length; }
    double spacing() const { return 2.0 * half_length / points_per_axis; }
    double cell_volume() const;
    double volume() const;
    std::size_t size() const;

    /// Signed lattice index for storage index i: 0..N/2-1, -N/2..-1.
    int signed_index(int i) const { return i < points_per_axis / 2 ? i : i - points_per_axis; }
    /// Angular frequency pi*j/L for storage index i.
    double frequency(int i) const;
    double coordinate(int i) const { return signed_index(i) * spacing(); }

    std::array<int, 3> unflatten(std::size_t idx) const;
    std::size_t flatten(const std::array<int, 3>& ijk) const;
    /// Storage index of -x for the sample at idx.
    std::size_t mirror(std::size_t idx) const;
    /// |x| of the sample at idx.
    double radius(std::size_t idx) const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Validates (n in 1..3, N even and >= 8, L > 0) and returns the grid.
GridSpec build_grid(int n, int N, double L);

/// Lattice frequencies along one axis in storage order.
std::vector<double> axis_frequencies(const GridSpec& grid);

/// Real samples on a GridSpec.
struct RealField {
    GridSpec grid;
    Eigen::VectorXd values;

    RealField() = default;
    explicit RealField(const GridSpec& g) : grid(g), values(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()))) {}
    RealField(const GridSpec& g, Eigen::VectorXd v);

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
    double max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
    bool all_finite() const { return values.allFinite(); }
};

/// Fills a field by evaluating f(x) at every sample (x padded with zeros for n < 3).
template <typename F>
RealField sample(const GridSpec& grid, F&& f) {
    RealField out(grid);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        const auto ijk = grid.unflatten(idx);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int d = 0; d < grid.n; ++d) x[d] = grid.coordinate(ijk[d]);
        out.values[static_cast<Eigen::Index>(idx)] = f(x);
    }
    return out;
}

/// Throws InvalidArgument unless both fields live on the same grid.
void require_same_grid(const RealField& a, const RealField& b);

/// Circular shift so that storage index `offset` (per axis) moves to index 0.
RealField circular_shift(const RealField& f, const std::array<int, 3>& offset);

/// Reorders storage into ascending-coordinate order (x from -L) and back.
std::vector<double> to_ascending(const RealField& f);
RealField from_ascending(const GridSpec& grid, const std::vector<double>& data);

}  // namespace mxgs
