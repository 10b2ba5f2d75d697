#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phifun/matrix.hpp"

namespace phifun {

struct CorpusEntry {
    std::string name;
    RealMatrix a;
    // Construction-time conditioning gauge: (1 + ||A||_1)(1 + ||A||_1/alpha_2).
    double kappa_proxy = 0.0;
    bool well_conditioned = false; // kappa_proxy <= 1e3
};

inline constexpr double kWellConditionedProxyBound = 1e3;

// Deterministic synthetic test set: >= 20 square matrices, n in [2, 40],
// spanning nonnormality, (quasi-)triangular structure, nilpotency, wide norm
// ranges, and gauge-threshold edges. Byte-identical output for equal seeds.
std::vector<CorpusEntry> gen_corpus(std::uint64_t seed);

} // namespace phifun
