#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "phifun/matrix.hpp"
#include "phifun/rng.hpp"

namespace phifun {

// A^r (or its adjoint) as an implicit operator; the power is never formed.
template <class T>
struct PowerActionSpec {
    const Matrix<T>* base = nullptr;
    int exponent = 1;
    bool transposed = false;
};

// Estimator defaults, surfaced so diagnostics can report them.
inline constexpr int kEstimatorColumns = 2;
inline constexpr int kEstimatorMaxIter = 5;

namespace detail {

// Column block, n x t, column-major.
template <class T>
struct ColBlock {
    std::size_t n = 0, t = 0;
    std::vector<T> v;
    ColBlock(std::size_t n_, std::size_t t_) : n(n_), t(t_), v(n_ * t_, T{}) {}
    T& at(std::size_t i, std::size_t c) { return v[c * n + i]; }
    const T& at(std::size_t i, std::size_t c) const { return v[c * n + i]; }
};

// y = op(A) x for one application, op = A or its conjugate transpose.
template <class T>
void apply_once(const Matrix<T>& a, bool adjoint, const ColBlock<T>& x, ColBlock<T>& y) {
    const std::size_t n = a.dim(), t = x.t;
    for (std::size_t c = 0; c < t; ++c)
        for (std::size_t i = 0; i < n; ++i) {
            T s{};
            if (!adjoint) {
                for (std::size_t k = 0; k < n; ++k) s += a(i, k) * x.at(k, c);
            } else {
                for (std::size_t k = 0; k < n; ++k) s += conj_of(a(k, i)) * x.at(k, c);
            }
            y.at(i, c) = s;
        }
}

template <class T>
ColBlock<T> apply_power(const PowerActionSpec<T>& spec, const ColBlock<T>& x) {
    ColBlock<T> cur = x;
    ColBlock<T> next(x.n, x.t);
    for (int step = 0; step < spec.exponent; ++step) {
        apply_once(*spec.base, spec.transposed, cur, next);
        std::swap(cur, next);
    }
    return cur;
}

template <class T>
double col_one_norm(const ColBlock<T>& y, std::size_t c) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.n; ++i) s += abs_of(y.at(i, c));
    return s;
}

// Entrywise unit sign; sign(0) := 1.
inline double unit_sign(double x) { return x >= 0.0 ? 1.0 : -1.0; }
inline std::complex<double> unit_sign(const std::complex<double>& x) {
    const double m = std::abs(x);
    return m == 0.0 ? std::complex<double>{1.0, 0.0} : x / m;
}

inline bool cols_parallel(const ColBlock<double>& a, std::size_t ca,
                          const ColBlock<double>& b, std::size_t cb) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.n; ++i) dot += a.at(i, ca) * b.at(i, cb);
    return std::abs(dot) == static_cast<double>(a.n);
}
inline bool cols_parallel(const ColBlock<std::complex<double>>&, std::size_t,
                          const ColBlock<std::complex<double>>&, std::size_t) {
    // Unit-modulus sign vectors repeat with negligible probability; the
    // parallel-column shortcut only matters for the +-1 real case.
    return false;
}

} // namespace detail

// Block 1-norm lower-bound estimate of ||A^r||_1 from O(t_cols) forward and
// adjoint actions on n x t blocks. Deterministic for a fixed seed: the first
// start column is the scaled ones vector, the rest are random +-1 columns.
template <class T>
double est_power_one_norm(const PowerActionSpec<T>& spec, int t_cols, std::uint64_t seed) {
    const Matrix<T>& a = *spec.base;
    const std::size_t n = a.dim();
    if (n == 0) return 0.0;
    const std::size_t t = std::min<std::size_t>(std::max(t_cols, 1), n);
    constexpr int max_iter = kEstimatorMaxIter;
    Rng rng(seed);

    detail::ColBlock<T> x(n, t);
    for (std::size_t i = 0; i < n; ++i) x.at(i, 0) = T(1.0 / static_cast<double>(n));
    for (std::size_t c = 1; c < t; ++c) {
        for (int attempt = 0; attempt < 16; ++attempt) {
            for (std::size_t i = 0; i < n; ++i)
                x.at(i, c) = T(rng.rademacher() / static_cast<double>(n));
            bool clash = false;
            if constexpr (!detail::is_complex_v<T>) {
                for (std::size_t cc = 0; cc < c && !clash; ++cc) {
                    double dot = 0.0;
                    for (std::size_t i = 0; i < n; ++i) dot += x.at(i, c) * x.at(i, cc);
                    clash = std::abs(dot) * n * n >= static_cast<double>(n) - 0.5;
                }
            }
            if (!clash) break;
        }
    }

    double est = 0.0, est_old = 0.0;
    std::vector<bool> in_hist(n, false);
    std::vector<std::size_t> col_index(t, std::size_t(-1)); // unit index behind each column
    std::size_t ind_best = std::size_t(-1);
    detail::ColBlock<T> s_mat(n, t), s_old(n, t);

    for (int it = 1; it <= max_iter; ++it) {
        const auto y = detail::apply_power(spec, x);
        est = 0.0;
        std::size_t jbest = 0;
        for (std::size_t c = 0; c < t; ++c) {
            const double cn = detail::col_one_norm(y, c);
            if (cn > est) {
                est = cn;
                jbest = c;
            }
        }
        if (it == 1 || est > est_old) ind_best = col_index[jbest];
        if (it >= 2 && est <= est_old) {
            est = est_old;
            break;
        }
        est_old = est;
        if (est == 0.0 || it == max_iter) break;

        s_old = s_mat;
        for (std::size_t c = 0; c < t; ++c)
            for (std::size_t i = 0; i < n; ++i)
                s_mat.at(i, c) = detail::unit_sign(y.at(i, c));
        if constexpr (!detail::is_complex_v<T>) {
            if (it >= 2) {
                bool all_parallel = true;
                for (std::size_t c = 0; c < t && all_parallel; ++c) {
                    bool found = false;
                    for (std::size_t cc = 0; cc < t && !found; ++cc)
                        found = detail::cols_parallel(s_mat, c, s_old, cc);
                    all_parallel = found;
                }
                if (all_parallel) break;
            }
        }

        PowerActionSpec<T> adj{spec.base, spec.exponent, !spec.transposed};
        const auto z = detail::apply_power(adj, s_mat);
        std::vector<double> h(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < t; ++c)
                h[i] = std::max(h[i], detail::abs_of(z.at(i, c)));
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&h](std::size_t l, std::size_t r) { return h[l] > h[r]; });
        if (it >= 2 && ind_best != std::size_t(-1) && h[order[0]] == h[ind_best]) break;
        bool fresh = false;
        for (std::size_t k = 0; k < t && k < n; ++k) fresh = fresh || !in_hist[order[k]];
        if (!fresh) break;

        std::size_t c = 0;
        for (std::size_t k = 0; k < n && c < t; ++k) {
            const std::size_t idx = order[k];
            if (in_hist[idx]) continue;
            for (std::size_t i = 0; i < n; ++i) x.at(i, c) = T{};
            x.at(idx, c) = T{1};
            col_index[c] = idx;
            in_hist[idx] = true;
            ++c;
        }
        for (; c < t; ++c) {
            for (std::size_t i = 0; i < n; ++i)
                x.at(i, c) = T(rng.rademacher() / static_cast<double>(n));
            col_index[c] = std::size_t(-1);
        }
    }
    return est;
}

// ||  |A|^k ||_1 evaluated exactly in O(k n^2) by k applications of |A^T| to
// the ones vector; the power itself is never formed. Overflow to +Inf is
// allowed and propagated.
template <class T>
double exact_abs_power_one_norm(const Matrix<T>& a, int k) {
    if (k < 1) throw std::invalid_argument("power must be >= 1");
    const std::size_t n = a.dim();
    std::vector<double> v(n, 1.0), w(n);
    for (int step = 0; step < k; ++step) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += detail::abs_of(a(i, j)) * v[i];
            w[j] = s;
        }
        v.swap(w);
    }
    double best = 0.0;
    for (double x : v) best = std::max(best, x);
    return best;
}

// log2 of the same quantity with periodic rescaling, finite even when the
// raw norm would overflow. Returns -infinity when the power vanishes.
template <class T>
double log2_abs_power_one_norm(const Matrix<T>& a, int k) {
    if (k < 1) throw std::invalid_argument("power must be >= 1");
    const std::size_t n = a.dim();
    std::vector<double> v(n, 1.0), w(n);
    double e2 = 0.0;
    for (int step = 0; step < k; ++step) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += detail::abs_of(a(i, j)) * v[i];
            w[j] = s;
        }
        v.swap(w);
        double m = 0.0;
        for (double x : v) m = std::max(m, x);
        if (m == 0.0) return -std::numeric_limits<double>::infinity();
        if (m > 0x1.0p+500 || m < 0x1.0p-500) {
            const int sh = -std::ilogb(m);
            for (double& x : v) x = std::ldexp(x, sh);
            e2 -= sh;
        }
    }
    double best = 0.0;
    for (double x : v) best = std::max(best, x);
    return std::log2(best) + e2;
}

} // namespace phifun
