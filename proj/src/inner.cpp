#include "mxgs/inner.hpp"

#include "mxgs/error.hpp"
#include "mxgs/symbol.hpp"

#include <cmath>

namespace mxgs {

Multiplier weight_multiplier(const GridSpec& grid, const WeightKind& kind) {
    return std::visit(
        [&grid](const auto& k) -> Multiplier {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, weight::SobolevS>) {
                if (!(k.s >= 0.0 && k.s <= 1.0)) throw InvalidArgument("Sobolev weight requires s in [0, 1]");
                const double s = k.s;
                return Multiplier::radial(grid, [s](double r) { return 1.0 + r * r + fractional_symbol(r, s); });
            } else if constexpr (std::is_same_v<K, weight::H1>) {
                return Multiplier::radial(grid, [](double r) { return 1.0 + r * r; });
            } else if constexpr (std::is_same_v<K, weight::H2>) {
                return Multiplier::radial(grid, [](double r) { return (1.0 + r * r) * (1.0 + r * r); });
            } else if constexpr (std::is_same_v<K, weight::L2>) {
                return Multiplier::radial(grid, [](double) { return 1.0; });
            } else {
                if (!k.w) throw InvalidArgument("custom weight is empty");
                return Multiplier::radial(grid, k.w);
            }
        },
        kind);
}

double quadratic_form(const Multiplier& m, const RealField& u, const RealField& v) {
    require_same_grid(u, v);
    return u.grid.cell_volume() * u.values.dot(m.apply(v.values));
}

double weighted_inner(const RealField& u, const RealField& v, const WeightKind& kind) {
    require_same_grid(u, v);
    if (std::holds_alternative<weight::L2>(kind)) return l2_inner(u, v);
    return quadratic_form(weight_multiplier(u.grid, kind), u, v);
}

double weighted_norm_sq(const RealField& u, const WeightKind& kind) { return weighted_inner(u, u, kind); }

double l2_inner(const RealField& u, const RealField& v) {
    require_same_grid(u, v);
    return u.grid.cell_volume() * u.values.dot(v.values);
}

double lp_integral(const RealField& u, double q) {
    if (!(q > 0.0)) throw InvalidArgument("L^q exponent must be positive");
    double acc = 0.0;
    if (q == 2.0) {
        acc = u.values.squaredNorm();
    } else {
        for (Eigen::Index i = 0; i < u.values.size(); ++i) acc += std::pow(std::abs(u.values[i]), q);
    }
    return u.grid.cell_volume() * acc;
}

double lp_norm(const RealField& u, double q) { return std::pow(lp_integral(u, q), 1.0 / q); }

}  // namespace mxgs
