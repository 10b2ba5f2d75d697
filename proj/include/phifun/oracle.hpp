#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "phifun/matrix.hpp"
#include "phifun/xprec.hpp"

// Test-side reference computation of the phi family in software extended
// precision. Algorithmically independent of the production path: truncated
// Taylor of the block companion embedding with scaling and repeated
// squaring, plus a direct per-index series as a second, cross-checking
// route. Never used in production evaluations.
namespace phifun::oracle {

struct BigComplex {
    BigFloat re{0}, im{0};
    BigComplex() = default;
    BigComplex(double r) : re(r) {}
    BigComplex(const BigFloat& r) : re(r) {}
    BigComplex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}
    BigComplex(const std::complex<double>& z) : re(z.real()), im(z.imag()) {}

    BigComplex& operator+=(const BigComplex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    BigComplex& operator-=(const BigComplex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    friend BigComplex operator+(BigComplex a, const BigComplex& b) { return a += b; }
    friend BigComplex operator-(BigComplex a, const BigComplex& b) { return a -= b; }
    friend BigComplex operator*(const BigComplex& a, const BigComplex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    BigComplex& operator*=(const BigComplex& o) { return *this = *this * o; }
};

inline BigFloat abs_value(const BigFloat& x) { return abs(x); }
inline BigFloat abs_value(const BigComplex& z) { return sqrt(z.re * z.re + z.im * z.im); }

inline double to_working(const BigFloat& x, double*) { return x.convert_to<double>(); }
inline std::complex<double> to_working(const BigComplex& z, std::complex<double>*) {
    return {z.re.convert_to<double>(), z.im.convert_to<double>()};
}

template <class T>
struct ExtOf;
template <>
struct ExtOf<double> {
    using type = BigFloat;
};
template <>
struct ExtOf<std::complex<double>> {
    using type = BigComplex;
};

// Square extended-precision matrix.
template <class K>
class XMatrix {
public:
    XMatrix() = default;
    explicit XMatrix(std::size_t n) : n_(n), data_(n * n) {}

    static XMatrix identity(std::size_t n) {
        XMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = K(1.0);
        return m;
    }

    std::size_t dim() const noexcept { return n_; }
    K& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const K& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    XMatrix& operator+=(const XMatrix& o) {
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    XMatrix& operator-=(const XMatrix& o) {
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }

private:
    std::size_t n_ = 0;
    std::vector<K> data_;
};

template <class K>
XMatrix<K> multiply(const XMatrix<K>& a, const XMatrix<K>& b) {
    const std::size_t n = a.dim();
    XMatrix<K> c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const K& aik = a(i, k);
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

template <class K, class S>
void add_scaled(XMatrix<K>& dst, const S& s, const XMatrix<K>& m) {
    for (std::size_t i = 0; i < dst.dim(); ++i)
        for (std::size_t j = 0; j < dst.dim(); ++j) dst(i, j) += K(s) * m(i, j);
}

template <class K>
BigFloat one_norm_x(const XMatrix<K>& a) {
    BigFloat best = 0;
    for (std::size_t j = 0; j < a.dim(); ++j) {
        BigFloat s = 0;
        for (std::size_t i = 0; i < a.dim(); ++i) s += abs_value(a(i, j));
        if (s > best) best = s;
    }
    return best;
}

template <class T>
XMatrix<typename ExtOf<T>::type> to_extended(const Matrix<T>& a) {
    XMatrix<typename ExtOf<T>::type> x(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) x(i, j) = typename ExtOf<T>::type(a(i, j));
    return x;
}

template <class T, class K>
Matrix<T> round_to_working(const XMatrix<K>& x) {
    Matrix<T> m(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i)
        for (std::size_t j = 0; j < x.dim(); ++j)
            m(i, j) = to_working(x(i, j), static_cast<T*>(nullptr));
    return m;
}

// || computed - ref ||_1 / || ref ||_1 in extended precision.
template <class T, class K>
double rel_error_1norm(const Matrix<T>& computed, const XMatrix<K>& ref) {
    XMatrix<K> e = to_extended(computed);
    e -= ref;
    const BigFloat denom = one_norm_x(ref);
    const BigFloat num = one_norm_x(e);
    if (denom == 0) return num == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return (num / denom).convert_to<double>();
}

// First block row of exp(2^-sigma W) accumulated by truncated Taylor, then
// sigma squarings; W is the companion embedding [[A, E], [0, J]] with
// E = [I 0 .. 0] and J the shift-by-one block nilpotent. Only the first
// block row is stored: the remaining rows of every power of W are known in
// closed form, so the arithmetic matches the dense recursion while the cost
// stays linear in p.
template <class T>
std::vector<XMatrix<typename ExtOf<T>::type>> phi_reference(const Matrix<T>& a, int p,
                                                            int digits) {
    using K = typename ExtOf<T>::type;
    const std::size_t n = a.dim();
    if (p < 0) throw std::invalid_argument("index must be nonnegative");
    if (n * static_cast<std::size_t>(p + 1) > 2048)
        throw std::invalid_argument("reference solver size limit exceeded");
    if (digits < 32) throw std::invalid_argument("reference solver needs >= 32 digits");
    if (!is_finite(a)) throw std::invalid_argument("matrix entries must be finite");

    PrecisionGuard guard(digits);
    XMatrix<K> ax = to_extended(a);
    const BigFloat norm_a = one_norm_x(ax);
    BigFloat wnorm = norm_a < 1 ? BigFloat(1) : norm_a;
    int sigma = 2;
    while (ldexp(wnorm, -sigma) > BigFloat(1) / 4) ++sigma;
    const BigFloat half_pow = ldexp(BigFloat(1), -sigma);

    XMatrix<K> as(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) as(i, j) = ax(i, j) * K(half_pow);

    // Partial sums: F ~ phi_0 block, gs[c] ~ scaled phi_c block, c = 1..p.
    XMatrix<K> f = XMatrix<K>::identity(n);
    std::vector<XMatrix<K>> gs(p + 1, XMatrix<K>(n));
    XMatrix<K> pk = XMatrix<K>::identity(n);
    std::vector<XMatrix<K>> qk(p + 1, XMatrix<K>(n));
    // Column sums of the accumulated lower-right (nilpotent) part; starts at
    // the identity term.
    std::vector<BigFloat> hsum(p + 1, BigFloat(1));
    BigFloat jterm = 1; // (2^-sigma)^k / k!
    const BigFloat tol = pow(BigFloat(10), -digits);
    constexpr int term_cap = 10000;

    int k = 1;
    for (; k <= term_cap; ++k) {
        for (int c = p; c >= 1; --c) {
            const XMatrix<K>& src = (c == 1) ? pk : qk[c - 1];
            XMatrix<K> next(n);
            const BigFloat w = half_pow / k;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) next(i, j) = src(i, j) * K(w);
            qk[c] = std::move(next);
        }
        {
            XMatrix<K> next = multiply(pk, as);
            const BigFloat w = BigFloat(1) / k;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) next(i, j) *= K(w);
            pk = std::move(next);
        }
        jterm *= half_pow / k;

        f += pk;
        for (int c = 1; c <= p; ++c) gs[c] += qk[c];
        for (int c = k + 1; c <= p; ++c) hsum[c] += jterm;

        BigFloat term_norm = one_norm_x(pk);
        for (int c = 1; c <= p; ++c) {
            BigFloat t = one_norm_x(qk[c]);
            if (c - k >= 1 && k <= p - 1) t += jterm;
            if (t > term_norm) term_norm = t;
        }
        BigFloat sum_norm = one_norm_x(f);
        for (int c = 1; c <= p; ++c) {
            BigFloat t = one_norm_x(gs[c]) + hsum[c];
            if (t > sum_norm) sum_norm = t;
        }
        if (term_norm <= sum_norm * tol) break;
    }
    if (k > term_cap) throw std::runtime_error("reference solver exceeded its term budget");

    // Squaring phase; the lower-right block is the exponential of the scaled
    // nilpotent, known in closed form at every scale.
    std::vector<BigFloat> inv_fact(p + 1);
    inv_fact[0] = 1;
    for (int q = 1; q <= p; ++q) inv_fact[q] = inv_fact[q - 1] / q;
    for (int t = 1; t <= sigma; ++t) {
        const BigFloat scale = ldexp(BigFloat(1), t - 1 - sigma);
        std::vector<BigFloat> spow(p + 1);
        spow[0] = 1;
        for (int q = 1; q <= p; ++q) spow[q] = spow[q - 1] * scale;
        std::vector<XMatrix<K>> gnew(p + 1, XMatrix<K>(n));
        for (int c = 1; c <= p; ++c) {
            XMatrix<K> acc = multiply(f, gs[c]);
            for (int rb = 1; rb <= c; ++rb) add_scaled(acc, spow[c - rb] * inv_fact[c - rb], gs[rb]);
            gnew[c] = std::move(acc);
        }
        f = multiply(f, f);
        for (int c = 1; c <= p; ++c) gs[c] = std::move(gnew[c]);
    }

    std::vector<XMatrix<K>> out;
    out.reserve(p + 1);
    out.push_back(std::move(f));
    for (int c = 1; c <= p; ++c) out.push_back(std::move(gs[c]));
    return out;
}

// Direct series sum_{k=0}^{terms} A^k / (k+j)!; requires ||A||_1 <= 1 (the
// caller pre-scales). Exact after q terms for nilpotents of index q.
template <class T>
XMatrix<typename ExtOf<T>::type> phi_series_direct(const Matrix<T>& a, int j, int digits,
                                                   int terms) {
    using K = typename ExtOf<T>::type;
    const std::size_t n = a.dim();
    if (j < 0) throw std::invalid_argument("index must be nonnegative");
    if (one_norm(a) > 1.0 + 16 * kUnitRoundoff)
        throw std::invalid_argument("direct series requires a pre-scaled matrix");
    PrecisionGuard guard(digits);
    XMatrix<K> ax = to_extended(a);
    BigFloat inv_fact = 1; // 1/j!
    for (int q = 1; q <= j; ++q) inv_fact /= q;

    XMatrix<K> sum(n);
    for (std::size_t i = 0; i < n; ++i) sum(i, i) = K(inv_fact);
    XMatrix<K> pk = XMatrix<K>::identity(n);
    BigFloat w = inv_fact;
    for (int k = 1; k <= terms; ++k) {
        pk = multiply(pk, ax);
        w /= (k + j);
        XMatrix<K> scaled = pk;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t jj = 0; jj < n; ++jj) scaled(i, jj) *= K(w);
        sum += scaled;
    }
    return sum;
}

// Second full reference: pre-scale below unit norm, run the direct series
// for every index, then undo the scaling with extended-precision
// double-argument sweeps. Used to cross-validate phi_reference.
template <class T>
std::vector<XMatrix<typename ExtOf<T>::type>> phi_reference_series(const Matrix<T>& a, int p,
                                                                   int digits) {
    using K = typename ExtOf<T>::type;
    int c = 0;
    double norm = one_norm(a);
    while (std::ldexp(norm, -c) > 1.0) ++c;
    const Matrix<T> as = scale_pow2(a, -c);

    int terms = 4;
    {
        double lg = 0.0;
        const double target = (digits + 8) * std::log(10.0);
        while (lg < target) {
            ++terms;
            lg += std::log(static_cast<double>(terms));
        }
    }

    PrecisionGuard guard(digits);
    std::vector<XMatrix<K>> phis;
    phis.reserve(p + 1);
    for (int j = 0; j <= p; ++j) phis.push_back(phi_series_direct(as, j, digits, terms));

    std::vector<BigFloat> inv_fact(p + 1);
    inv_fact[0] = 1;
    for (int q = 1; q <= p; ++q) inv_fact[q] = inv_fact[q - 1] / q;
    for (int step = 0; step < c; ++step) {
        for (int j = p; j >= 1; --j) {
            XMatrix<K> acc = multiply(phis[0], phis[j]);
            for (int k = 1; k <= j; ++k) add_scaled(acc, inv_fact[j - k], phis[k]);
            const BigFloat h = ldexp(BigFloat(1), -j);
            for (std::size_t i = 0; i < acc.dim(); ++i)
                for (std::size_t jj = 0; jj < acc.dim(); ++jj) acc(i, jj) *= K(h);
            phis[j] = std::move(acc);
        }
        phis[0] = multiply(phis[0], phis[0]);
    }
    return phis;
}

} // namespace phifun::oracle
