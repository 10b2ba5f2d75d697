#include <doctest.h>

#include <cmath>
#include <complex>

#include "phifun/matrix.hpp"
#include "phifun/oracle.hpp"
#include "phifun/rng.hpp"

using namespace phifun;

namespace {

RealMatrix random_matrix(Rng& rng, std::size_t n, double scale = 1.0) {
    RealMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = scale * rng.symmetric();
    return a;
}

double rel_diff(const RealMatrix& a, const RealMatrix& b) {
    RealMatrix d = a;
    d -= b;
    const double base = one_norm(b);
    return base == 0.0 ? one_norm(d) : one_norm(d) / base;
}

} // namespace

TEST_SUITE("densemat") {

    TEST_CASE("matmul: identity and nilpotent cases, counter increments") {
        EvalContext ctx;
        Rng rng(7);
        const RealMatrix a = random_matrix(rng, 4);
        const RealMatrix ia = matmul(RealMatrix::identity(4), a, ctx);
        CHECK(ia == a);
        CHECK(ctx.matmul_count == CostRational(1));

        RealMatrix j2(2);
        j2(0, 1) = 1.0;
        const RealMatrix sq = matmul(j2, j2, ctx);
        CHECK(one_norm(sq) == 0.0);
        CHECK(ctx.matmul_count == CostRational(2));

        RealMatrix b(3);
        CHECK_THROWS_AS((void)matmul(a, b, ctx), std::invalid_argument);
    }

    TEST_CASE("matmul matches the extended-precision product to 4u") {
        Rng rng(11);
        EvalContext ctx;
        const RealMatrix a = random_matrix(rng, 3);
        const RealMatrix b = random_matrix(rng, 3);
        const RealMatrix c = matmul(a, b, ctx);
        PrecisionGuard guard(40);
        const auto ref = oracle::multiply(oracle::to_extended(a), oracle::to_extended(b));
        CHECK(oracle::rel_error_1norm(c, ref) <= 4 * kUnitRoundoff);
    }

    TEST_CASE("matmul associativity to relative 10 n u") {
        Rng rng(13);
        EvalContext ctx;
        for (int trial = 0; trial < 5; ++trial) {
            const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 6);
            const RealMatrix a = random_matrix(rng, n);
            const RealMatrix b = random_matrix(rng, n);
            const RealMatrix c = random_matrix(rng, n);
            const RealMatrix left = matmul(matmul(a, b, ctx), c, ctx);
            const RealMatrix right = matmul(a, matmul(b, c, ctx), ctx);
            CHECK(rel_diff(left, right) <= 10.0 * n * kUnitRoundoff);
        }
    }

    TEST_CASE("lu_solve_multi: identity and scalar systems") {
        EvalContext ctx;
        Rng rng(3);
        const RealMatrix b = random_matrix(rng, 3);
        CHECK(lu_solve_multi(RealMatrix::identity(3), b, ctx) == b);
        CHECK(ctx.matmul_count == CostRational(4, 3));

        RealMatrix two = RealMatrix::identity(3);
        two *= 2.0;
        const RealMatrix x = lu_solve_multi(two, RealMatrix::identity(3), ctx);
        RealMatrix half = RealMatrix::identity(3);
        half *= 0.5;
        CHECK(x == half);
    }

    TEST_CASE("lu_solve_multi: residual bound on diagonally dominant input") {
        Rng rng(17);
        EvalContext ctx;
        RealMatrix d = random_matrix(rng, 4);
        for (std::size_t i = 0; i < 4; ++i) d(i, i) += 6.0;
        const RealMatrix rhs = random_matrix(rng, 4);
        const RealMatrix x = lu_solve_multi(d, rhs, ctx);
        EvalContext scratch;
        RealMatrix resid = matmul(d, x, scratch);
        resid -= rhs;
        CHECK(one_norm(resid) <= 10.0 * 4 * kUnitRoundoff * one_norm(d) * one_norm(x));
    }

    TEST_CASE("lu_solve_multi composed with multiplication reproduces rhs") {
        Rng rng(19);
        EvalContext ctx;
        for (int trial = 0; trial < 4; ++trial) {
            const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform() * 5);
            RealMatrix d = random_matrix(rng, n, 0.3);
            for (std::size_t i = 0; i < n; ++i) d(i, i) += 1.0;
            const RealMatrix rhs = random_matrix(rng, n);
            const RealMatrix x = lu_solve_multi(d, rhs, ctx);
            const RealMatrix dinv = lu_solve_multi(d, RealMatrix::identity(n), ctx);
            const double kappa = one_norm(d) * one_norm(dinv);
            EvalContext scratch;
            CHECK(rel_diff(matmul(d, x, scratch), rhs) <= 10.0 * n * kUnitRoundoff * kappa);
        }
    }

    TEST_CASE("lu_solve_multi: singular pivot reports the index") {
        EvalContext ctx;
        RealMatrix d(3);
        d(0, 0) = 1.0;
        d(0, 1) = 2.0;
        // Column 1 is zero below the eliminated row: pivot index 1 fails.
        d(1, 2) = 1.0;
        d(2, 2) = 1.0;
        try {
            (void)lu_solve_multi(d, RealMatrix::identity(3), ctx);
            FAIL("expected singular_pivot_error");
        } catch (const singular_pivot_error& e) {
            CHECK(e.pivot_index() == 1);
        }
    }

    TEST_CASE("one_norm: examples") {
        CHECK(one_norm(RealMatrix(4)) == 0.0);
        CHECK(one_norm(RealMatrix::identity(7)) == 1.0);
        RealMatrix a(2);
        a(0, 0) = 1.0;
        a(0, 1) = -2.0;
        a(1, 0) = 3.0;
        a(1, 1) = 4.0;
        CHECK(one_norm(a) == 6.0);
    }

    TEST_CASE("one_norm: absolute homogeneity and subadditivity") {
        Rng rng(23);
        for (int trial = 0; trial < 8; ++trial) {
            const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 7);
            const RealMatrix a = random_matrix(rng, n);
            const RealMatrix b = random_matrix(rng, n);
            // Exact with a power-of-two representable scalar.
            CHECK(one_norm(scale_pow2(a, 3)) == 8.0 * one_norm(a));
            CHECK(one_norm(a + b) <= one_norm(a) + one_norm(b));
        }
    }

    TEST_CASE("detect_structure: classification by exact zeros") {
        RealMatrix tri(3);
        tri(0, 0) = 1.0;
        tri(0, 2) = 2.0;
        tri(1, 1) = -1.0;
        tri(2, 2) = 0.5;
        CHECK(detect_structure(tri) == StructureKind::upper_triangular);

        RealMatrix quasi(4);
        for (std::size_t i = 0; i < 4; ++i) quasi(i, i) = 1.0;
        quasi(2, 1) = -0.7; // isolated bump
        CHECK(detect_structure(quasi) == StructureKind::upper_quasi_triangular);

        RealMatrix adj(4);
        adj(1, 0) = 1.0;
        adj(2, 1) = 1.0; // adjacent bumps are not quasi-triangular
        CHECK(detect_structure(adj) == StructureKind::full);

        Rng rng(29);
        RealMatrix full = random_matrix(rng, 5);
        CHECK(detect_structure(full) == StructureKind::full);

        CHECK(detect_structure(RealMatrix(1)) == StructureKind::upper_triangular);
    }

    TEST_CASE("triangular products keep an exactly zero lower part") {
        Rng rng(31);
        EvalContext ctx;
        RealMatrix t(6);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = i; j < 6; ++j) t(i, j) = rng.symmetric();
        const RealMatrix sq = matmul(t, t, ctx);
        CHECK(detect_structure(sq) == StructureKind::upper_triangular);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < i; ++j) CHECK(sq(i, j) == 0.0);
    }

    TEST_CASE("refresh_exp_diagonal: diagonal matrix is exact at any step") {
        EvalContext ctx;
        RealMatrix a(2);
        a(0, 0) = -0.3;
        a(1, 1) = 1.7;
        for (int w : {0, 1, 3}) {
            RealMatrix x = RealMatrix::identity(2); // arbitrary approximant
            refresh_exp_diagonal(x, a, w, ctx);
            CHECK(x(0, 0) == std::exp(std::ldexp(-0.3, w)));
            CHECK(x(1, 1) == std::exp(std::ldexp(1.7, w)));
        }
    }

    TEST_CASE("exp_diag_blocks: repeated-eigenvalue superdiagonal closed form") {
        const double lambda = -0.4, t = 0.8;
        RealMatrix a(2);
        a(0, 0) = lambda;
        a(0, 1) = t;
        a(1, 1) = lambda;
        for (int w : {0, 2}) {
            RealMatrix x(2);
            exp_diag_blocks(x, a, w);
            const double c = std::ldexp(1.0, w);
            CHECK(x(0, 1) == doctest::Approx(t * c * std::exp(c * lambda)).epsilon(4e-16));
        }
    }

    TEST_CASE("exp_2x2: complex-conjugate eigenvalue block matches the reference") {
        RealMatrix a(2);
        a(0, 0) = 0.4;
        a(0, 1) = 1.3;
        a(1, 0) = -1.3;
        a(1, 1) = 0.4;
        const auto e = exp_2x2(a(0, 0), a(0, 1), a(1, 0), a(1, 1));
        RealMatrix x(2);
        x(0, 0) = e[0];
        x(0, 1) = e[1];
        x(1, 0) = e[2];
        x(1, 1) = e[3];
        const auto ref = oracle::phi_reference(a, 0, 40);
        CHECK(oracle::rel_error_1norm(x, ref[0]) <= 4 * kUnitRoundoff);
        // cos/sin form visible directly
        CHECK(e[0] == doctest::Approx(std::exp(0.4) * std::cos(1.3)).epsilon(1e-15));
        CHECK(e[1] == doctest::Approx(std::exp(0.4) * std::sin(1.3)).epsilon(1e-15));
    }

    TEST_CASE("exp_2x2: complex scalar block against the reference") {
        using C = std::complex<double>;
        ComplexMatrix a(2);
        a(0, 0) = C{0.2, 0.5};
        a(0, 1) = C{-0.4, 1.0};
        a(1, 0) = C{0.3, -0.2};
        a(1, 1) = C{-0.6, 0.1};
        const auto e = exp_2x2(a(0, 0), a(0, 1), a(1, 0), a(1, 1));
        ComplexMatrix x(2);
        x(0, 0) = e[0];
        x(0, 1) = e[1];
        x(1, 0) = e[2];
        x(1, 1) = e[3];
        const auto ref = oracle::phi_reference(a, 0, 40);
        CHECK(oracle::rel_error_1norm(x, ref[0]) <= 8 * kUnitRoundoff);
    }

    TEST_CASE("exp_diag_blocks rejects full matrices") {
        Rng rng(37);
        RealMatrix a = random_matrix(rng, 3);
        RealMatrix x = RealMatrix::identity(3);
        CHECK_THROWS_AS(exp_diag_blocks(x, a, 0), std::invalid_argument);
    }
}
