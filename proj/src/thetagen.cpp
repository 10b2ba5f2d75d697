#include "phifun/thetagen.hpp"

#include <cmath>
#include <stdexcept>

#include "phifun/pade.hpp"
#include "phifun/pade_exact.hpp"

namespace phifun {

namespace {

// Series value sum_k coeffs[k] x^(first_order + k) by Horner over the stored
// window, times x^first_order.
BigFloat eval_series(const HtildeSeries& s, const BigFloat& x) {
    BigFloat acc = 0;
    for (std::size_t k = s.coeffs.size(); k-- > 0;) acc = acc * x + s.coeffs[k];
    return acc * pow(x, s.first_order);
}

// Unique root of eval(x)/x^d = u in (0, hi): the quotient is a series in
// positive powers with positive coefficients, hence strictly increasing.
BigFloat solve_gauge(const HtildeSeries& s, int d, const BigFloat& hi_limit) {
    const BigFloat u = ldexp(BigFloat(1), -53);
    auto excess = [&](const BigFloat& x) { return eval_series(s, x) - u * pow(x, d); };
    BigFloat lo = ldexp(BigFloat(1), -40);
    BigFloat hi = hi_limit;
    if (!(excess(lo) < 0) || !(excess(hi) > 0))
        throw std::runtime_error("gauge root not bracketed; raise trunc_order or digits");
    for (int it = 0; it < 260; ++it) {
        BigFloat mid = (lo + hi) / 2;
        if (excess(mid) < 0)
            lo = mid;
        else
            hi = mid;
    }
    return (lo + hi) / 2;
}

} // namespace

HtildeSeries make_htilde_series(int m, int p, int trunc_order, int digits) {
    if (m < 1 || p < 1) throw std::invalid_argument("degrees must be positive");
    if (trunc_order < 2 * m + p + 150)
        throw std::invalid_argument("trunc_order too small for a reliable tail");
    PrecisionGuard guard(digits);
    const int first = 2 * m + p + 1;
    const int K = trunc_order;

    const auto num0 = exact::r0_numerator(m, p); // degree m+p
    const auto den = exact::pade_den(m, p);      // degree m

    // s = exp(-x) * num0, truncated at K.
    std::vector<BigFloat> expneg(K + 1);
    expneg[0] = 1;
    for (int k = 1; k <= K; ++k) expneg[k] = -expneg[k - 1] / k;
    std::vector<BigFloat> s(K + 1, BigFloat(0));
    for (int i = 0; i <= m + p; ++i) {
        const BigFloat ci(num0[i]);
        for (int k = i; k <= K; ++k) s[k] += ci * expneg[k - i];
    }

    // q = s / den as a power series (den[0] = 1).
    std::vector<BigFloat> dreal(m + 1);
    for (int i = 0; i <= m; ++i) dreal[i] = BigFloat(den[i]);
    std::vector<BigFloat> q(K + 1);
    for (int k = 0; k <= K; ++k) {
        BigFloat acc = s[k];
        for (int j = 1; j <= std::min(k, m); ++j) acc -= dreal[j] * q[k - j];
        q[k] = acc;
    }

    // g = log q via q' = g' q; q[0] = 1.
    std::vector<BigFloat> g(K + 1, BigFloat(0));
    for (int k = 1; k <= K; ++k) {
        BigFloat acc = k * q[k];
        for (int j = 1; j < k; ++j) acc -= j * g[j] * q[k - j];
        g[k] = acc / k;
    }

    // Orders below first vanish identically; residues reflect roundoff only.
    const BigFloat lead = abs(g[first]);
    for (int k = 1; k < first; ++k)
        if (abs(g[k]) > lead * 1e-20 + ldexp(BigFloat(1), -200))
            throw std::runtime_error("series generation lost too much precision");

    HtildeSeries out;
    out.m = m;
    out.p = p;
    out.first_order = first;
    out.trunc_order = K;
    out.digits = digits;
    out.coeffs.reserve(K - first + 1);
    for (int k = first; k <= K; ++k) out.coeffs.push_back(abs(g[k]));
    return out;
}

double htilde_eval(const HtildeSeries& s, double x) {
    if (x < 0) throw std::domain_error("series argument must be nonnegative");
    const double radius = nu1(degree_index(s.m));
    if (x > radius) throw std::domain_error("series argument exceeds validated radius");
    PrecisionGuard guard(s.digits);
    return eval_series(s, BigFloat(x)).convert_to<double>();
}

double regenerate_theta(int m, int p, int trunc_order) {
    const double radius = nu1(degree_index(m)); // also validates the degree
    if (trunc_order < 0) trunc_order = 2 * m + p + kThetaSeriesMargin;
    const auto series = make_htilde_series(m, p, trunc_order);
    PrecisionGuard guard(series.digits);
    const BigFloat hi = BigFloat(radius) * (1 - BigFloat(1) / 1000000);
    BigFloat root = solve_gauge(series, 1, hi);
    if (root < 1 && p > 1) root = solve_gauge(series, p, hi);
    return root.convert_to<double>();
}

} // namespace phifun
