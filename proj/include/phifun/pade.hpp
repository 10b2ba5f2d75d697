#pragma once

#include <vector>

namespace phifun {

// Shared-denominator rational approximant of degree (m, p): num/den hold the
// m+1 coefficients of N_m and D_m in ascending powers. den[0] = 1 exactly and
// den alternates in sign.
struct PadeCoeffs {
    int m = 0;
    int p = 0;
    std::vector<double> num;
    std::vector<double> den;
};

// Coefficients are generated in exact big-integer rational arithmetic from
// the factorial formulas and rounded once to double.
PadeCoeffs pade_coeffs(int m, int p);

// The degree ladder visited by the cost search: m_i = floor((i+3)^2 / 8),
// giving {1, 2, 3, 4, 6, 8, 10, 12} for i = 0..7.
int optimal_degree(int i);
// Inverse of the ladder for members of it: ceil(sqrt(8(m+1)) - 3) = i + 1.
int degree_index(int m);
// Multiplications needed to evaluate the numerator/denominator pair with
// block size tau: tau - 1 + 2(floor(m/tau) - [tau | m]).
int ps_mult_count(int m, int tau);

// Largest i such that optimal_degree(i) <= 12.
inline constexpr int kMaxDegreeIndex = 7;
inline constexpr int kMaxDegree = 12;

// Gauge thresholds: theta(i, p) is the largest safe value of the norm gauge
// for degree m_i and index p. Entries exist for p = 1..10; the runtime
// accessor clamps p above 7 to row 7, which keeps the denominator systems
// well conditioned without weakening the error bound.
double theta(int i, int p);       // clamped accessor used on the runtime path
double theta_table(int i, int p); // raw table entry, p in 1..10
// Magnitude of the smallest denominator root at p = 1; every theta entry
// lies strictly inside this radius.
double nu1(int i);

// Documentation constants: upper bounds on the condition number of the
// denominator polynomial at the largest degree, for p = 1 and p = 7. Kept
// for reference only; nothing evaluates them at runtime.
inline constexpr double kDenomCondBoundDeg12P1 = 8.98e1;
inline constexpr double kDenomCondBoundDeg12P7 = 2.42e2;

// log2 of (m+p)! m! / ((2m+p)! (2m+p+1)!), the magnitude of the leading
// error coefficient, computed exactly and rounded once.
double log2_leading_error_coeff(int m, int p);

} // namespace phifun
