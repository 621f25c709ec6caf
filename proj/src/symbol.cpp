#include "mxgs/symbol.hpp"

#include "mxgs/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mxgs {

double critical_sobolev_exponent(int n) {
    if (n <= 2) return std::numeric_limits<double>::infinity();
    return 2.0 * n / (n - 2.0);
}

void validate(const SymbolParams& params) {
    if (params.n < 1 || params.n > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
    if (!(params.s >= 0.0 && params.s <= 1.0)) throw InvalidArgument("s must lie in [0, 1]");
    if (!(params.p > 0.0)) throw InvalidArgument("exponent p must be positive");
    const double bound = critical_sobolev_exponent(params.n) - 2.0;
    if (!(params.p < bound)) {
        std::ostringstream msg;
        msg << "supercritical exponent: p = " << params.p << " must be below 2* - 2 = " << bound << " for n = " << params.n;
        throw InvalidArgument(msg.str());
    }
    if (!(params.shift >= 0.0) || !std::isfinite(params.shift)) throw InvalidArgument("shift must be non-negative");
}

double fractional_symbol(double abs_xi, double s) {
    if (s == 0.0) return 1.0;
    if (abs_xi == 0.0) return 0.0;
    if (s == 1.0) return abs_xi * abs_xi;
    return std::pow(abs_xi, 2.0 * s);
}

double eval_symbol(const SymbolParams& params, double abs_xi) {
    validate(params);
    return params.shift + abs_xi * abs_xi + fractional_symbol(abs_xi, params.s);
}

double eval_symbol(const SymbolParams& params, std::span<const double> xi) {
    double r2 = 0.0;
    for (double x : xi) r2 += x * x;
    return eval_symbol(params, std::sqrt(r2));
}

Multiplier operator_multiplier(const GridSpec& grid, const SymbolParams& params) {
    validate(params);
    if (params.n != grid.n) throw InvalidArgument("symbol dimension does not match grid dimension");
    const double s = params.s;
    const double shift = params.shift;
    return Multiplier::radial(grid, [s, shift](double r) { return shift + r * r + fractional_symbol(r, s); });
}

}  // namespace mxgs
