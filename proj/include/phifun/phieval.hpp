#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "phifun/matrix.hpp"
#include "phifun/pade.hpp"
#include "phifun/select.hpp"

namespace phifun {

template <class T>
struct PhiResult {
    std::vector<Matrix<T>> phis; // phi_0 .. phi_p
    SelectionResult selection;
    CostRational matmul_count{0};
    StructureKind structure = StructureKind::full;
};

// Shared powers A^1..A^tau of the scaled matrix, built ascending.
template <class T>
struct PowerCache {
    int tau = 0;
    std::vector<Matrix<T>> powers;
    const Matrix<T>& pw(int k) const { return powers[k - 1]; }
};

inline double inv_factorial(int j) {
    long double f = 1.0L;
    for (int k = 2; k <= j; ++k) f *= k;
    return static_cast<double>(1.0L / f);
}

template <class T>
PowerCache<T> build_power_cache(const Matrix<T>& a, int tau, EvalContext& ctx) {
    PowerCache<T> cache;
    cache.tau = tau;
    cache.powers.reserve(tau);
    cache.powers.push_back(a);
    for (int k = 2; k <= tau; ++k) cache.powers.push_back(matmul(cache.powers.back(), a, ctx));
    return cache;
}

namespace detail {

// Degree-limited slice sum_{j=0}^{len-1} c[lo+j] A^j from stored powers;
// scalar work only.
template <class T>
Matrix<T> coeff_chunk(const std::vector<double>& c, int lo, int len, std::size_t n,
                      const PowerCache<T>& cache) {
    Matrix<T> m(n);
    add_scaled_identity(m, c[lo]);
    for (int j = 1; j < len; ++j) add_scaled(m, c[lo + j], cache.pw(j));
    return m;
}

// Horner over tau-sized chunks. When tau divides the degree the top chunk is
// a plain multiple of the identity and its product with A^tau costs nothing.
template <class T>
Matrix<T> eval_poly_ps(const std::vector<double>& c, int tau, const PowerCache<T>& cache,
                       std::size_t n, EvalContext& ctx) {
    const int m = static_cast<int>(c.size()) - 1;
    const int nu = m / tau;
    const bool divides = (m % tau == 0);
    if (nu == 0) return coeff_chunk(c, 0, m + 1, n, cache);
    Matrix<T> acc = coeff_chunk(c, tau * nu, m - tau * nu + 1, n, cache);
    for (int k = nu - 1; k >= 0; --k) {
        if (k == nu - 1 && divides) {
            acc = cache.pw(tau);
            acc *= T(c[m]);
        } else {
            acc = matmul(acc, cache.pw(tau), ctx);
        }
        acc += coeff_chunk(c, tau * k, tau, n, cache);
    }
    return acc;
}

inline int isqrt_floor(int x) {
    int r = static_cast<int>(std::sqrt(static_cast<double>(x)));
    while (r * r > x) --r;
    while ((r + 1) * (r + 1) <= x) ++r;
    return r;
}

} // namespace detail

// Numerator/denominator pair evaluated with one shared power cache;
// tau - 1 + 2(floor(m/tau) - [tau | m]) multiplications in total.
template <class T>
std::pair<Matrix<T>, Matrix<T>> ps_eval_pair(const Matrix<T>& a_scaled, const PadeCoeffs& coeffs,
                                             int tau, EvalContext& ctx) {
    const int fl = detail::isqrt_floor(2 * coeffs.m);
    const int ce = (fl * fl == 2 * coeffs.m) ? fl : fl + 1;
    if (tau != fl && tau != ce)
        throw std::invalid_argument("block size must bracket sqrt(2m)");
    const auto cache = build_power_cache(a_scaled, tau, ctx);
    const std::size_t n = a_scaled.dim();
    Matrix<T> num = detail::eval_poly_ps<T>(coeffs.num, tau, cache, n, ctx);
    Matrix<T> den = detail::eval_poly_ps<T>(coeffs.den, tau, cache, n, ctx);
    return {std::move(num), std::move(den)};
}

// Backward recurrence from the index-p approximant: exactly p products.
template <class T>
std::vector<Matrix<T>> recover_chain(const Matrix<T>& rp, const Matrix<T>& a_scaled, int p,
                                     EvalContext& ctx) {
    std::vector<Matrix<T>> phis(p + 1);
    phis[p] = rp;
    for (int j = p - 1; j >= 0; --j) {
        phis[j] = matmul(a_scaled, phis[j + 1], ctx);
        add_scaled_identity(phis[j], inv_factorial(j));
    }
    return phis;
}

// One doubling sweep over indices p..1, in place. The descending order keeps
// every right-hand operand at the old argument: slots above j are already
// rewritten but never read again, slots up to j are still old, and slot j's
// own old value is consumed before it is overwritten. The index-0 update
// (squaring or structured refresh) is the caller's final step.
template <class T>
void double_argument_step(std::vector<Matrix<T>>& phis, EvalContext& ctx) {
    const int p = static_cast<int>(phis.size()) - 1;
    for (int j = p; j >= 1; --j) {
        Matrix<T> acc = matmul(phis[0], phis[j], ctx);
        for (int k = 1; k <= j; ++k) add_scaled(acc, inv_factorial(j - k), phis[k]);
        phis[j] = scale_pow2(acc, -j);
    }
}

namespace detail {

template <class T>
void validate_phi_input(const Matrix<T>& a, int p) {
    if (a.dim() == 0) throw std::invalid_argument("matrix must be nonempty");
    if (p < 1) throw std::invalid_argument("index p must be positive");
    if (!is_finite(a)) throw std::invalid_argument("matrix entries must be finite");
}

template <class T>
std::vector<Matrix<T>> run_phi_core(const Matrix<T>& a, int p, const SelectionResult& sel,
                                    StructureKind structure, EvalContext& ctx) {
    const Matrix<T> as = scale_pow2(a, -sel.s);
    const PadeCoeffs coeffs = pade_coeffs(sel.m, p);
    auto [num, den] = ps_eval_pair(as, coeffs, sel.tau, ctx);
    Matrix<T> rp = lu_solve_multi(den, num, ctx);
    std::vector<Matrix<T>> phis = recover_chain(rp, as, p, ctx);
    const bool structured = structure != StructureKind::full;
    if (structured) exp_diag_blocks(phis[0], as, 0);
    for (int k = 1; k <= sel.s; ++k) {
        double_argument_step(phis, ctx);
        if (structured)
            refresh_exp_diagonal(phis[0], as, k, ctx);
        else
            phis[0] = matmul(phis[0], phis[0], ctx);
    }
    return phis;
}

} // namespace detail

// Simultaneous approximation of phi_0(A) .. phi_p(A): parameter selection,
// binary down-scaling, shared-denominator rational evaluation, backward
// recurrence, then s doubling sweeps with the structured fast path for
// (quasi-)triangular inputs.
template <class T>
PhiResult<T> phi_funm(const Matrix<T>& a, int p, EvalContext& ctx,
                      SelectionDetail* detail_out = nullptr) {
    detail::validate_phi_input(a, p);
    PhiResult<T> out;
    out.structure = detect_structure(a);
    const CostRational start = ctx.matmul_count;

    if (one_norm(a) == 0.0) {
        // phi_j(0) = I/j! exactly; no parameters to select.
        out.phis.reserve(p + 1);
        for (int j = 0; j <= p; ++j) {
            Matrix<T> m(a.dim());
            add_scaled_identity(m, inv_factorial(j));
            out.phis.push_back(std::move(m));
        }
        out.selection.p_hat = p;
        return out;
    }

    out.selection = select_parameters(a, p, ctx, detail_out);
    out.phis = detail::run_phi_core(a, p, out.selection, out.structure, ctx);
    out.matmul_count = ctx.matmul_count - start;
    if (out.matmul_count != out.selection.predicted_cost)
        throw std::logic_error("multiplication count deviates from the predicted cost");
    return out;
}

// Testing entry: bypass selection and force the degree/scaling pair.
template <class T>
PhiResult<T> phi_funm_forced(const Matrix<T>& a, int p, int m, int s, EvalContext& ctx) {
    detail::validate_phi_input(a, p);
    if (s < 0) throw std::invalid_argument("scaling parameter must be nonnegative");
    const int i = degree_index(m);
    PhiResult<T> out;
    out.structure = detect_structure(a);
    SelectionResult sel;
    sel.m = m;
    sel.i = i;
    sel.tau = tau_star(m, i);
    sel.r = 0;
    sel.s = s;
    sel.p_hat = p_hat(theta(i, p), p);
    sel.delta = delta_exponent(p, sel.p_hat);
    sel.predicted_cost = CostRational(i + p) + CostRational(4, 3) +
                         CostRational(static_cast<long long>(s) * (p + 1));
    out.selection = sel;
    const CostRational start = ctx.matmul_count;
    out.phis = detail::run_phi_core(a, p, sel, out.structure, ctx);
    out.matmul_count = ctx.matmul_count - start;
    if (out.matmul_count != sel.predicted_cost)
        throw std::logic_error("multiplication count deviates from the predicted cost");
    return out;
}

} // namespace phifun
