#pragma once

#include <vector>

#include "phifun/xprec.hpp"

namespace phifun {

// Truncated absolute-coefficient series of the backward-error function for
// degree pair (m, p): coeffs[k] holds |c_{first_order + k}| for
// k = 0 .. trunc_order - first_order, with first_order = 2m + p + 1.
// Coefficients are kept in extended precision; the tail magnitudes fall
// below the double-precision underflow threshold.
struct HtildeSeries {
    int m = 0;
    int p = 0;
    int first_order = 0;
    int trunc_order = 0;
    int digits = 0;
    std::vector<BigFloat> coeffs;
};

inline constexpr int kThetaSeriesMargin = 250; // default trunc_order - (2m+p)
inline constexpr int kThetaDigits = 120;       // working digits for generation

// Offline developer tool, not on the runtime path: derives the series from
// the exact rational polynomials by series division and logarithm.
HtildeSeries make_htilde_series(int m, int p, int trunc_order, int digits = kThetaDigits);

// Truncated series value at x >= 0; x must not exceed the validated radius
// for the degree (the smallest denominator-root magnitude).
double htilde_eval(const HtildeSeries& s, double x);

// Root of htilde(theta)/theta^d = u for the degree pair, with d = 1 when the
// unrefined root is >= 1 and d = p otherwise. trunc_order < 0 selects the
// default 2m + p + kThetaSeriesMargin.
double regenerate_theta(int m, int p, int trunc_order = -1);

} // namespace phifun
