#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <vector>

namespace phifun::exact {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

BigInt factorial(int n);

// Exact coefficient vectors (ascending powers, length m+1) of the degree-m
// numerator and shared denominator for the largest index p.
std::vector<Rational> pade_num(int m, int p);
std::vector<Rational> pade_den(int m, int p);

// Numerator polynomial of the index-0 approximant recovered through the
// backward recurrence: z^p N_m(z) + sum_{j<p} z^j D_m(z)/j!. Degree m+p.
std::vector<Rational> r0_numerator(int m, int p);

// (m+p)! m! / ((2m+p)! (2m+p+1)!), the magnitude of the leading coefficient
// of the order-(2m+p+1) error term.
Rational leading_error_coeff(int m, int p);

} // namespace phifun::exact
