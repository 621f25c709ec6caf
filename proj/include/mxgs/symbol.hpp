#pragma once

#include "mxgs/fourier.hpp"

#include <span>

namespace mxgs {

/// Parameters of the multiplier family shift + |xi|^2 + |xi|^{2s} and the power p.
struct SymbolParams {
    int n = 1;
    double s = 0.5;
    double p = 2.0;
    double shift = 1.0;
};

/// Critical Sobolev exponent 2n/(n-2); +infinity for n <= 2.
double critical_sobolev_exponent(int n);

/// Throws InvalidArgument when s, p or shift is outside its admissible range.
void validate(const SymbolParams& params);

/// |xi|^{2s} with the zero-mode convention: 0 at xi = 0 for s > 0, and 1 for s = 0.
double fractional_symbol(double abs_xi, double s);

double eval_symbol(const SymbolParams& params, double abs_xi);
double eval_symbol(const SymbolParams& params, std::span<const double> xi);

/// Multiplier of shift - Laplacian + (-Laplacian)^s on `grid`.
Multiplier operator_multiplier(const GridSpec& grid, const SymbolParams& params);

}  // namespace mxgs
