#include "phifun/corpus.hpp"

#include <cmath>

#include "phifun/pade.hpp"
#include "phifun/rng.hpp"

namespace phifun {

namespace {

RealMatrix jordan(std::size_t n, double lambda) {
    RealMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = lambda;
        if (i + 1 < n) a(i, i + 1) = 1.0;
    }
    return a;
}

RealMatrix dense_scaled(Rng& rng, std::size_t n, double target_norm) {
    RealMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.symmetric();
    const double norm = one_norm(a);
    const double f = target_norm / norm;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= f;
    return a;
}

RealMatrix quasi_schur(Rng& rng, std::size_t n, double fill) {
    RealMatrix a(n);
    std::size_t i = 0;
    while (i < n) {
        if (i + 1 < n && rng.uniform() < 0.4) {
            const double re = -1.0 + 1.2 * rng.uniform();
            const double w = 0.2 + 1.3 * rng.uniform();
            a(i, i) = re;
            a(i, i + 1) = w;
            a(i + 1, i) = -w;
            a(i + 1, i + 1) = re;
            i += 2;
        } else {
            a(i, i) = -1.5 + 1.8 * rng.uniform();
            i += 1;
        }
    }
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r + 2; c < n; ++c) a(r, c) = fill * rng.symmetric();
    // Keep the strict block pattern: entries directly above a bump stay.
    for (std::size_t r = 0; r + 1 < n; ++r)
        if (a(r + 1, r) == 0.0 && a(r, r + 1) == 0.0) a(r, r + 1) = fill * rng.symmetric();
    return a;
}

double alpha2_exact(const RealMatrix& a) {
    EvalContext scratch;
    const RealMatrix a2 = matmul(a, a, scratch);
    const RealMatrix a3 = matmul(a2, a, scratch);
    return std::max(std::sqrt(one_norm(a2)), std::cbrt(one_norm(a3)));
}

} // namespace

std::vector<CorpusEntry> gen_corpus(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<CorpusEntry> out;
    auto push = [&out](std::string name, RealMatrix a) {
        CorpusEntry e;
        e.name = std::move(name);
        const double norm = one_norm(a);
        const double a2 = alpha2_exact(a);
        const double ratio = norm > 0 ? norm / std::max(a2, 1e-300) : 1.0;
        e.kappa_proxy = (1.0 + norm) * (1.0 + ratio);
        e.well_conditioned = e.kappa_proxy <= kWellConditionedProxyBound;
        e.a = std::move(a);
        out.push_back(std::move(e));
    };

    push("jordan_nilpotent_8", jordan(8, 0.0));
    push("jordan_shift_neg_6", jordan(6, -0.5));
    push("jordan_shift_two_4", jordan(4, 2.0));

    {
        RealMatrix a(8);
        for (std::size_t i = 0; i < 8; ++i) {
            a(i, i) = -static_cast<double>(i + 1);
            if (i + 1 < 8) a(i, i + 1) = 1.0;
        }
        push("tri_decay_8", std::move(a));
    }
    {
        // One huge superdiagonal entry, mild elsewhere: strongly nonnormal
        // with fast-decaying power norms.
        RealMatrix a(12);
        for (std::size_t i = 0; i < 12; ++i) a(i, i) = -2.0 + 1.9 * rng.uniform();
        a(0, 1) = 1e3;
        for (std::size_t i = 1; i + 1 < 12; ++i) a(i, i + 1) = rng.uniform();
        push("tri_stiff_super_12", std::move(a));
    }
    {
        // Alternating large/small superdiagonal: adjacent products are tame.
        RealMatrix a(20);
        for (std::size_t i = 0; i < 20; ++i) {
            a(i, i) = 0.1;
            if (i + 1 < 20) a(i, i + 1) = (i % 2 == 0) ? 10.0 : 0.01;
        }
        push("alt_bidiag_20", std::move(a));
    }
    {
        RealMatrix a(2);
        a(0, 0) = 1.0;
        a(0, 1) = 1e3;
        a(1, 1) = 1.0;
        push("shear_1000_2", std::move(a));
    }

    push("dense_tiny_4", dense_scaled(rng, 4, 1e-3));
    push("dense_unit_8", dense_scaled(rng, 8, 1.0));
    push("dense_ten_10", dense_scaled(rng, 10, 10.0));
    push("dense_thirty_12", dense_scaled(rng, 12, 30.0));
    push("dense_micro_3", dense_scaled(rng, 3, 1e-8));

    {
        RealMatrix a(10);
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = i + 1; j < 10; ++j) a(i, j) = rng.symmetric();
        push("nilpotent_upper_10", std::move(a));
    }

    push("quasi_schur_10", quasi_schur(rng, 10, 0.6));
    push("quasi_schur_24", quasi_schur(rng, 24, 0.4));
    push("quasi_mixed_40", quasi_schur(rng, 40, 0.2));

    {
        // Norm pinned just inside / just outside the largest-degree gauge
        // threshold at index 7 (the clamped row used for p > 7).
        const double edge = theta(kMaxDegreeIndex, 7);
        for (const auto& [name, factor] :
             {std::pair<const char*, double>{"theta_edge_low_6", 0.999},
              std::pair<const char*, double>{"theta_edge_high_6", 1.001}}) {
            RealMatrix a(6);
            for (std::size_t i = 0; i < 6; ++i)
                for (std::size_t j = 0; j < 6; ++j)
                    a(i, j) = (i == j) ? 1.0 : 0.05 * rng.symmetric();
            const double f = edge * factor / one_norm(a);
            for (std::size_t i = 0; i < 6; ++i)
                for (std::size_t j = 0; j < 6; ++j) a(i, j) *= f;
            push(name, std::move(a));
        }
    }

    {
        RealMatrix a(2);
        a(0, 0) = 0.3;
        a(0, 1) = 2.0;
        a(1, 0) = -2.0;
        a(1, 1) = 0.3;
        push("rot_mild_2", std::move(a));
    }
    {
        RealMatrix a(2);
        a(0, 0) = -1.0;
        a(0, 1) = 40.0;
        a(1, 0) = -40.0;
        a(1, 1) = -1.0;
        push("rot_stiff_2", std::move(a));
    }

    push("identity_5", RealMatrix::identity(5));

    {
        RealMatrix a(10);
        for (std::size_t i = 0; i < 10; ++i) {
            const double mag = std::pow(10.0, -3.0 + 5.0 * rng.uniform());
            a(i, i) = rng.rademacher() * mag;
        }
        push("diag_wide_10", std::move(a));
    }
    {
        RealMatrix a(30);
        for (std::size_t i = 0; i < 30; ++i) {
            a(i, i) = -2.0;
            if (i + 1 < 30) {
                a(i, i + 1) = 1.0;
                a(i + 1, i) = 1.0;
            }
        }
        push("toeplitz_tridiag_30", std::move(a));
    }
    {
        RealMatrix a(14);
        for (std::size_t i = 0; i < 14; ++i) {
            a(i, i) = -40.0;
            if (i + 1 < 14) {
                a(i, i + 1) = 20.0;
                a(i + 1, i) = 20.0;
            }
        }
        push("toeplitz_stiff_14", std::move(a));
    }
    {
        RealMatrix a(16);
        for (std::size_t i = 0; i < 16; ++i) {
            a(i, i) = rng.symmetric();
            for (std::size_t j = i + 1; j < 16; ++j) a(i, j) = rng.symmetric();
        }
        push("tri_uniform_16", std::move(a));
    }

    return out;
}

} // namespace phifun
