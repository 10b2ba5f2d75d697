#include <doctest.h>

#include <cmath>

#include "phifun/normest.hpp"
#include "phifun/rng.hpp"

using namespace phifun;

namespace {

RealMatrix jordan(std::size_t n, double lambda) {
    RealMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = lambda;
        if (i + 1 < n) a(i, i + 1) = 1.0;
    }
    return a;
}

double exact_power_norm(const RealMatrix& a, int r) {
    EvalContext scratch;
    RealMatrix p = a;
    for (int k = 1; k < r; ++k) p = matmul(p, a, scratch);
    return one_norm(p);
}

} // namespace

TEST_SUITE("normest") {

    TEST_CASE("est_power_one_norm: identity, diagonal, nilpotent") {
        const RealMatrix eye = RealMatrix::identity(6);
        PowerActionSpec<double> s1{&eye, 5, false};
        CHECK(est_power_one_norm(s1, 2, 42) == 1.0);

        RealMatrix d(3);
        d(0, 0) = 1.0;
        d(1, 1) = 2.0;
        d(2, 2) = 3.0;
        PowerActionSpec<double> s2{&d, 2, false};
        CHECK(est_power_one_norm(s2, 2, 42) == 9.0);

        const RealMatrix j8 = jordan(8, 0.0);
        PowerActionSpec<double> s3{&j8, 8, false};
        CHECK(est_power_one_norm(s3, 2, 42) == 0.0);
    }

    TEST_CASE("est_power_one_norm never exceeds the exact norm") {
        Rng rng(5);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 14);
            RealMatrix a(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.symmetric();
            const int r = 2 + static_cast<int>(rng.uniform() * 4);
            PowerActionSpec<double> spec{&a, r, false};
            const double est = est_power_one_norm(spec, 2, 42 + trial);
            const double exact = exact_power_norm(a, r);
            CHECK(est <= exact * (1.0 + 10 * kUnitRoundoff));
        }
    }

    TEST_CASE("est_power_one_norm is deterministic in the seed") {
        Rng rng(9);
        RealMatrix a(10);
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = 0; j < 10; ++j) a(i, j) = rng.symmetric();
        PowerActionSpec<double> spec{&a, 3, false};
        CHECK(est_power_one_norm(spec, 2, 1234) == est_power_one_norm(spec, 2, 1234));
    }

    TEST_CASE("est_power_one_norm handles the adjoint flag") {
        Rng rng(15);
        RealMatrix a(6);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) a(i, j) = rng.symmetric();
        // The transposed operator has the infinity norm of A^r as its 1-norm;
        // the estimate must stay below it.
        PowerActionSpec<double> spec{&a, 2, true};
        EvalContext scratch;
        RealMatrix p = matmul(a, a, scratch);
        double inf_norm = 0.0;
        for (std::size_t i = 0; i < 6; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < 6; ++j) s += std::abs(p(i, j));
            inf_norm = std::max(inf_norm, s);
        }
        CHECK(est_power_one_norm(spec, 2, 7) <= inf_norm * (1.0 + 10 * kUnitRoundoff));
    }

    TEST_CASE("exact_abs_power_one_norm: examples") {
        CHECK(exact_abs_power_one_norm(RealMatrix::identity(4), 7) == 1.0);
        RealMatrix a(2);
        a(0, 1) = -2.0;
        CHECK(exact_abs_power_one_norm(a, 1) == 2.0);
    }

    TEST_CASE("exact_abs_power_one_norm matches explicit formation") {
        Rng rng(21);
        RealMatrix a(5);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j) a(i, j) = rng.symmetric();
        RealMatrix abs_a(5);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j) abs_a(i, j) = std::abs(a(i, j));
        const int k = 3;
        EvalContext scratch;
        RealMatrix p = abs_a;
        for (int step = 1; step < k; ++step) p = matmul(p, abs_a, scratch);
        const double direct = one_norm(p);
        const double fast = exact_abs_power_one_norm(a, k);
        CHECK(std::abs(fast - direct) <= 10.0 * k * 5 * kUnitRoundoff * direct);
    }

    TEST_CASE("exact_abs_power_one_norm is monotone under entrywise dominance") {
        Rng rng(27);
        for (int trial = 0; trial < 10; ++trial) {
            RealMatrix a(4), b(4);
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t j = 0; j < 4; ++j) {
                    a(i, j) = rng.symmetric();
                    b(i, j) = a(i, j) * (1.0 + rng.uniform());
                }
            const int k = 1 + static_cast<int>(rng.uniform() * 4);
            CHECK(exact_abs_power_one_norm(a, k) <=
                  exact_abs_power_one_norm(b, k) * (1.0 + 10 * kUnitRoundoff));
        }
    }

    TEST_CASE("exact_abs_power_one_norm propagates overflow") {
        RealMatrix a(2);
        a(0, 0) = 1e200;
        a(0, 1) = 1e200;
        a(1, 0) = 1e200;
        a(1, 1) = 1e200;
        CHECK(std::isinf(exact_abs_power_one_norm(a, 3)));
        // All-equal entries e: the norm is (n e)^k, so log2 = k log2(2e200).
        const double lg = log2_abs_power_one_norm(a, 3);
        CHECK(std::isfinite(lg));
        CHECK(lg == doctest::Approx(3 * std::log2(2e200)).epsilon(1e-12));
    }

    TEST_CASE("log2 variant agrees with the plain one in range") {
        Rng rng(33);
        RealMatrix a(6);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) a(i, j) = rng.symmetric();
        for (int k : {1, 2, 5}) {
            const double plain = exact_abs_power_one_norm(a, k);
            const double lg = log2_abs_power_one_norm(a, k);
            CHECK(lg == doctest::Approx(std::log2(plain)).epsilon(1e-12));
        }
        CHECK(std::isinf(log2_abs_power_one_norm(jordan(4, 0.0), 4)));
        CHECK(log2_abs_power_one_norm(jordan(4, 0.0), 4) < 0);
    }
}
