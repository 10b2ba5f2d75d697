#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "phifun/matrix.hpp"
#include "phifun/normest.hpp"
#include "phifun/pade.hpp"

namespace phifun {

// Norm gauges alpha_r = max(||A^r||^(1/r), ||A^(r+1)||^(1/(r+1))) for
// r = 2..r_max. Much smaller than ||A|| for nonnormal matrices.
struct AlphaSeq {
    int r_max = 0;
    std::vector<double> values; // values[r - 2] holds alpha_r
    double at(int r) const { return values.at(r - 2); }
};

struct CostCell {
    bool feasible = false;
    int s = 0;
    CostRational cost{0};
};

// Candidate costs over (degree index i, gauge index r); infeasible cells
// stay empty. Also records the per-degree scaling floor and index split.
struct CostMatrix {
    int i_max = 0;
    int r_max = 0;
    int p = 0;
    std::vector<CostCell> cells;
    std::vector<int> t_per_degree;
    std::vector<int> p_hat_per_degree;
    std::vector<double> delta_per_degree;

    CostCell& cell(int i, int r) { return cells[i * (r_max - 1) + (r - 2)]; }
    const CostCell& cell(int i, int r) const { return cells[i * (r_max - 1) + (r - 2)]; }
};

struct SelectionResult {
    int m = 0;
    int i = 0;
    int tau = 0;
    int r = 0;
    int s = 0;
    int p_hat = 0;
    double delta = 1.0;
    CostRational predicted_cost{0};
};

// Extra byproducts of the selection, surfaced for diagnostics.
struct SelectionDetail {
    AlphaSeq alphas;
    CostMatrix costs;
};

inline int p_hat(double theta_at_max, int p) { return theta_at_max >= 1.0 ? p : 0; }

inline double delta_exponent(int p, int p_hat_val) {
    return static_cast<double>(p - 1) * (p - p_hat_val) / p + 1.0;
}

// Largest r with 2m + p_hat + 1 >= r(r-1).
inline int r_max_for(int m, int p_hat_val) {
    const int disc = 1 + 4 * (2 * m + p_hat_val + 1);
    int root = static_cast<int>(std::sqrt(static_cast<double>(disc)));
    while (root * root > disc) --root;
    while ((root + 1) * (root + 1) <= disc) ++root;
    return (1 + root) / 2;
}

// Block size for the power-reuse evaluation scheme at degree m on ladder
// index i: floor(sqrt(2m)), bumped up when its multiplication count
// disagrees with the ladder.
inline int tau_star(int m, int i) {
    int tau = static_cast<int>(std::floor(std::sqrt(2.0 * m)));
    while (tau * tau > 2 * m) --tau;
    if (ps_mult_count(m, tau) != i) {
        const int up = (tau * tau == 2 * m) ? tau : tau + 1;
        if (ps_mult_count(m, up) != i)
            throw std::logic_error("no block size attains the ladder count");
        tau = up;
    }
    return tau;
}

namespace detail {

template <class T>
double exact_power_norm(const Matrix<T>& a, int r) {
    // Oracle route for small matrices: form the power explicitly. Uses a
    // scratch context; norm estimation is outside the cost model.
    Matrix<T> pw = a;
    EvalContext scratch;
    for (int k = 1; k < r; ++k) pw = matmul(pw, a, scratch);
    return one_norm(pw);
}

} // namespace detail

// Gauge sequence from the block estimator (or explicit powers when the
// context requests the exact route and n <= 64).
template <class T>
AlphaSeq alpha_seq(const Matrix<T>& a, int r_max, EvalContext& ctx) {
    if (r_max < 2) throw std::invalid_argument("r_max must be at least 2");
    const bool exact = ctx.exact_alpha && a.dim() <= 64;
    std::vector<double> ests(r_max + 2);
    for (int r = 2; r <= r_max + 1; ++r) {
        if (exact) {
            ests[r] = detail::exact_power_norm(a, r);
        } else {
            PowerActionSpec<T> spec{&a, r, false};
            ests[r] = est_power_one_norm(spec, kEstimatorColumns,
                                         ctx.seed + static_cast<std::uint64_t>(r));
        }
        if (std::isinf(ests[r]))
            throw std::overflow_error("matrix magnitude overflows the norm estimate");
    }
    AlphaSeq seq;
    seq.r_max = r_max;
    seq.values.resize(r_max - 1);
    for (int r = 2; r <= r_max; ++r) {
        const double lo = std::pow(ests[r], 1.0 / r);
        const double hi = std::pow(ests[r + 1], 1.0 / (r + 1));
        seq.values[r - 2] = std::max(lo, hi);
    }
    return seq;
}

// Scaling floor: smallest nonnegative t with the leading backward-error term
// at 2^-t A below the unit roundoff. Evaluated entirely in logarithms so the
// norm ratio never overflows.
template <class T>
int t_param(const Matrix<T>& a, int m, int p, double delta) {
    const double norm_a = one_norm(a);
    if (!(norm_a > 0.0)) throw std::invalid_argument("zero matrix has no scaling floor");
    const int k = 2 * m + p + 1;
    const double log2_power = log2_abs_power_one_norm(a, k);
    if (std::isinf(log2_power)) {
        if (log2_power < 0) return 0;
        throw std::overflow_error("matrix magnitude overflows the scaling floor");
    }
    const double log2_arg =
        log2_leading_error_coeff(m, p) + log2_power + 53.0 - delta * std::log2(norm_a);
    const double t = std::ceil(log2_arg / (k - delta));
    return t > 0 ? static_cast<int>(t) : 0;
}

namespace detail {

inline int scaling_steps(double alpha, double theta_val) {
    if (!(alpha > theta_val)) return 0;
    const int s = static_cast<int>(std::ceil(std::log2(alpha / theta_val)));
    return s > 0 ? s : 0;
}

} // namespace detail

// Cost over all feasible (degree, gauge) pairs:
//   C = i + p + 4/3 + max(ceil(log2(alpha_r / theta_i)), t_i, 0) * (p + 1).
template <class T>
CostMatrix build_cost_matrix(const Matrix<T>& a, int p, const AlphaSeq& alphas) {
    CostMatrix mat;
    mat.i_max = kMaxDegreeIndex;
    mat.r_max = alphas.r_max;
    mat.p = p;
    mat.cells.resize((mat.i_max + 1) * (mat.r_max - 1));
    mat.t_per_degree.resize(mat.i_max + 1);
    mat.p_hat_per_degree.resize(mat.i_max + 1);
    mat.delta_per_degree.resize(mat.i_max + 1);

    for (int i = 0; i <= mat.i_max; ++i) {
        const int m = optimal_degree(i);
        const double th = theta(i, p);
        const int ph = p_hat(th, p);
        const double dl = delta_exponent(p, ph);
        const int t = t_param(a, m, p, dl);
        mat.t_per_degree[i] = t;
        mat.p_hat_per_degree[i] = ph;
        mat.delta_per_degree[i] = dl;
        for (int r = 2; r <= mat.r_max; ++r) {
            if (2 * m + ph + 1 < r * (r - 1)) continue;
            const int s = std::max(detail::scaling_steps(alphas.at(r), th), t);
            CostCell& c = mat.cell(i, r);
            c.feasible = true;
            c.s = s;
            c.cost = CostRational(i + p) + CostRational(4, 3) +
                     CostRational(static_cast<long long>(s) * (p + 1));
        }
    }
    return mat;
}

// Minimal feasible cell; ties fall to the smaller degree index, then the
// smaller gauge index. The scaling parameter recovered from the winning cost
// must come out a nonnegative integer.
inline SelectionResult choose(const CostMatrix& costs, int p) {
    const CostCell* best = nullptr;
    int bi = -1, br = -1;
    for (int i = 0; i <= costs.i_max; ++i)
        for (int r = 2; r <= costs.r_max; ++r) {
            const CostCell& c = costs.cell(i, r);
            if (!c.feasible) continue;
            if (!best || c.cost < best->cost) {
                best = &c;
                bi = i;
                br = r;
            }
        }
    if (!best) throw std::invalid_argument("no feasible degree/gauge pair");

    SelectionResult sel;
    sel.i = bi;
    sel.r = br;
    sel.m = optimal_degree(bi);
    const CostRational rec =
        (best->cost - CostRational(bi + p) - CostRational(4, 3)) / CostRational(p + 1);
    if (rec.denominator() != 1 || rec.numerator() < 0 || rec.numerator() != best->s)
        throw std::logic_error("recovered scaling parameter is not a nonnegative integer");
    sel.s = static_cast<int>(rec.numerator());
    sel.tau = tau_star(sel.m, bi);
    sel.p_hat = costs.p_hat_per_degree[bi];
    sel.delta = costs.delta_per_degree[bi];
    sel.predicted_cost = best->cost;
    return sel;
}

// Full parameter selection for a nonzero matrix.
template <class T>
SelectionResult select_parameters(const Matrix<T>& a, int p, EvalContext& ctx,
                                  SelectionDetail* detail_out = nullptr) {
    if (p < 1) throw std::invalid_argument("index p must be positive");
    if (!(one_norm(a) > 0.0)) throw std::invalid_argument("zero matrix bypasses selection");
    const int ph_global = p_hat(theta(kMaxDegreeIndex, p), p);
    const int rmax = r_max_for(kMaxDegree, ph_global);
    AlphaSeq alphas = alpha_seq(a, rmax, ctx);
    CostMatrix costs = build_cost_matrix(a, p, alphas);
    SelectionResult sel = choose(costs, p);
    if (detail_out) {
        detail_out->alphas = std::move(alphas);
        detail_out->costs = std::move(costs);
    }
    return sel;
}

} // namespace phifun
