#include "phifun/pade.hpp"
#include "phifun/pade_exact.hpp"
#include "phifun/xprec.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace phifun {

namespace exact {

BigInt factorial(int n) {
    BigInt f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

std::vector<Rational> pade_num(int m, int p) {
    std::vector<Rational> num(m + 1);
    const Rational lead = Rational(factorial(m)) / Rational(factorial(2 * m + p));
    for (int i = 0; i <= m; ++i) {
        Rational inner = 0;
        for (int j = 0; j <= i; ++j) {
            Rational term = Rational(factorial(2 * m + p - j)) /
                            Rational(factorial(j) * factorial(m - j) * factorial(p + i - j));
            inner += (j % 2 == 0) ? term : -term;
        }
        num[i] = lead * inner;
    }
    return num;
}

std::vector<Rational> pade_den(int m, int p) {
    std::vector<Rational> den(m + 1);
    const Rational lead = Rational(factorial(m)) / Rational(factorial(2 * m + p));
    for (int i = 0; i <= m; ++i) {
        Rational term = lead * Rational(factorial(2 * m + p - i)) /
                        Rational(factorial(i) * factorial(m - i));
        den[i] = (i % 2 == 0) ? term : -term;
    }
    return den;
}

std::vector<Rational> r0_numerator(int m, int p) {
    const auto num = pade_num(m, p);
    const auto den = pade_den(m, p);
    std::vector<Rational> out(m + p + 1, Rational(0));
    for (int i = 0; i <= m; ++i) out[p + i] += num[i];
    for (int j = 0; j < p; ++j) {
        const Rational w = Rational(1) / Rational(factorial(j));
        for (int i = 0; i <= m; ++i) out[j + i] += w * den[i];
    }
    return out;
}

Rational leading_error_coeff(int m, int p) {
    return Rational(factorial(m + p) * factorial(m)) /
           Rational(factorial(2 * m + p) * factorial(2 * m + p + 1));
}

} // namespace exact

PadeCoeffs pade_coeffs(int m, int p) {
    if (m < 1 || m > kMaxDegree) throw std::invalid_argument("degree m out of range");
    if (p < 1) throw std::invalid_argument("index p must be positive");
    const auto num = exact::pade_num(m, p);
    const auto den = exact::pade_den(m, p);
    PadeCoeffs c;
    c.m = m;
    c.p = p;
    c.num.resize(m + 1);
    c.den.resize(m + 1);
    for (int i = 0; i <= m; ++i) {
        c.num[i] = num[i].convert_to<double>();
        c.den[i] = den[i].convert_to<double>();
    }
    return c;
}

int optimal_degree(int i) {
    if (i < 0) throw std::invalid_argument("degree index must be nonnegative");
    return (i + 3) * (i + 3) / 8;
}

int degree_index(int m) {
    if (m < 1) throw std::invalid_argument("degree must be positive");
    // ceil(sqrt(8(m+1)) - 3) = i + 1, exact in integers.
    int r = static_cast<int>(std::sqrt(8.0 * (m + 1)));
    while (r * r > 8 * (m + 1)) --r;
    while ((r + 1) * (r + 1) <= 8 * (m + 1)) ++r;
    const int i = (r * r == 8 * (m + 1)) ? r - 3 - 1 : r + 1 - 3 - 1;
    if (optimal_degree(i) != m)
        throw std::invalid_argument("degree is not on the optimal ladder");
    return i;
}

int ps_mult_count(int m, int tau) {
    if (m < 1 || tau < 1) throw std::invalid_argument("degree and block size must be positive");
    const int divides = (m % tau == 0) ? 1 : 0;
    return tau - 1 + 2 * (m / tau - divides);
}

namespace {

// theta[p-1][i] for p = 1..10 and degree index i = 0..7. Sub-unity entries
// are the refined roots of the index-p gauge equation; the rest solve the
// index-1 form. Monotone increasing along both axes.
constexpr double kTheta[10][8] = {
    {2.00e-5, 3.81e-3, 3.97e-2, 1.54e-1, 7.26e-1, 1.76, 3.17, 4.87},
    {3.76e-5, 6.09e-3, 5.81e-2, 2.13e-1, 9.28e-1, 2.06, 3.54, 5.28},
    {7.37e-5, 9.87e-3, 8.53e-2, 2.94e-1, 1.16, 2.37, 3.91, 5.69},
    {1.50e-4, 1.62e-2, 1.26e-1, 4.06e-1, 1.40, 2.69, 4.28, 6.09},
    {3.15e-4, 2.70e-2, 1.87e-1, 5.62e-1, 1.66, 3.01, 4.65, 6.50},
    {6.86e-4, 4.55e-2, 2.80e-1, 7.79e-1, 1.92, 3.34, 5.02, 6.90},
    {1.54e-3, 7.75e-2, 4.18e-1, 1.05, 2.20, 3.68, 5.40, 7.30},
    {3.54e-3, 1.33e-1, 6.26e-1, 1.26, 2.48, 4.01, 5.77, 7.69},
    {8.35e-3, 2.30e-1, 9.34e-1, 1.48, 2.77, 4.35, 6.14, 8.08},
    {2.01e-2, 3.99e-1, 1.16, 1.71, 3.07, 4.69, 6.51, 8.47},
};

constexpr double kNu1[8] = {3.00, 4.47, 5.65, 7.05, 9.68, 1.23e1, 1.50e1, 1.76e1};

void check_index(int i) {
    if (i < 0 || i > kMaxDegreeIndex) throw std::invalid_argument("degree index out of range");
}

} // namespace

double theta_table(int i, int p) {
    check_index(i);
    if (p < 1 || p > 10) throw std::invalid_argument("index p out of table range");
    return kTheta[p - 1][i];
}

double theta(int i, int p) {
    check_index(i);
    if (p < 1) throw std::invalid_argument("index p must be positive");
    return kTheta[std::min(p, 7) - 1][i];
}

double nu1(int i) {
    check_index(i);
    return kNu1[i];
}

double log2_leading_error_coeff(int m, int p) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, double> cache;
    std::lock_guard<std::mutex> lock(mu);
    const auto key = std::make_pair(m, p);
    if (const auto it = cache.find(key); it != cache.end()) return it->second;
    const auto c = exact::leading_error_coeff(m, p);
    PrecisionGuard guard(50);
    BigFloat v(c);
    const double out = (log(v) / log(BigFloat(2))).convert_to<double>();
    cache.emplace(key, out);
    return out;
}

} // namespace phifun
