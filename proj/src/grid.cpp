#include "mxgs/grid.hpp"

#include "mxgs/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mxgs {

double GridSpec::cell_volume() const { return std::pow(spacing(), n); }

double GridSpec::volume() const { return std::pow(2.0 * half_length, n); }

std::size_t GridSpec::size() const {
    std::size_t total = 1;
    for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(points_per_axis);
    return total;
}

double GridSpec::frequency(int i) const { return std::numbers::pi * signed_index(i) / half_length; }

std::array<int, 3> GridSpec::unflatten(std::size_t idx) const {
    std::array<int, 3> ijk{0, 0, 0};
    const auto N = static_cast<std::size_t>(points_per_axis);
    for (int d = n - 1; d >= 0; --d) {
        ijk[d] = static_cast<int>(idx % N);
        idx /= N;
    }
    return ijk;
}

std::size_t GridSpec::flatten(const std::array<int, 3>& ijk) const {
    std::size_t idx = 0;
    const auto N = static_cast<std::size_t>(points_per_axis);
    for (int d = 0; d < n; ++d) idx = idx * N + static_cast<std::size_t>(ijk[d]);
    return idx;
}

std::size_t GridSpec::mirror(std::size_t idx) const {
    auto ijk = unflatten(idx);
    for (int d = 0; d < n; ++d) ijk[d] = (points_per_axis - ijk[d]) % points_per_axis;
    return flatten(ijk);
}

double GridSpec::radius(std::size_t idx) const {
    const auto ijk = unflatten(idx);
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) {
        const double x = coordinate(ijk[d]);
        r2 += x * x;
    }
    return std::sqrt(r2);
}

GridSpec build_grid(int n, int N, double L) {
    if (n < 1 || n > 3) throw InvalidArgument("grid dimension must be 1, 2 or 3, got " + std::to_string(n));
    if (N % 2 != 0) throw InvalidArgument("points per axis must be even, got " + std::to_string(N));
    if (N < 8) throw InvalidArgument("points per axis must be at least 8, got " + std::to_string(N));
    if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("half-length must be positive");
    return GridSpec{n, N, L};
}

std::vector<double> axis_frequencies(const GridSpec& grid) {
    std::vector<double> xi(static_cast<std::size_t>(grid.N()));
    for (int i = 0; i < grid.N(); ++i) xi[static_cast<std::size_t>(i)] = grid.frequency(i);
    return xi;
}

RealField::RealField(const GridSpec& g, Eigen::VectorXd v) : grid(g), values(std::move(v)) {
    if (static_cast<std::size_t>(values.size()) != grid.size())
        throw InvalidArgument("field size does not match grid");
}

void require_same_grid(const RealField& a, const RealField& b) {
    if (!(a.grid == b.grid)) throw InvalidArgument("fields live on different grids");
}

RealField circular_shift(const RealField& f, const std::array<int, 3>& offset) {
    const auto& g = f.grid;
    RealField out(g);
    const int N = g.N();
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        auto ijk = g.unflatten(idx);
        for (int d = 0; d < g.n; ++d) ijk[d] = (ijk[d] + offset[d]) % N;
        out.values[static_cast<Eigen::Index>(idx)] = f.values[static_cast<Eigen::Index>(g.flatten(ijk))];
    }
    return out;
}

namespace {
// Storage index for ascending position a (0 -> x = -L).
int storage_from_ascending(int a, int N) { return (a + N / 2) % N; }
}  // namespace

std::vector<double> to_ascending(const RealField& f) {
    const auto& g = f.grid;
    std::vector<double> out(g.size());
    for (std::size_t pos = 0; pos < g.size(); ++pos) {
        auto ijk = g.unflatten(pos);
        for (int d = 0; d < g.n; ++d) ijk[d] = storage_from_ascending(ijk[d], g.N());
        out[pos] = f.values[static_cast<Eigen::Index>(g.flatten(ijk))];
    }
    return out;
}

RealField from_ascending(const GridSpec& grid, const std::vector<double>& data) {
    if (data.size() != grid.size()) throw InvalidArgument("data size does not match grid");
    RealField out(grid);
    for (std::size_t pos = 0; pos < grid.size(); ++pos) {
        auto ijk = grid.unflatten(pos);
        for (int d = 0; d < grid.n; ++d) ijk[d] = storage_from_ascending(ijk[d], grid.N());
        out.values[static_cast<Eigen::Index>(grid.flatten(ijk))] = data[pos];
    }
    return out;
}

}  // namespace mxgs
