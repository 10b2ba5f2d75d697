#pragma once

#include <boost/multiprecision/mpfr.hpp>

namespace phifun {

// Software extended-precision scalar with runtime-configurable digit count.
using BigFloat = boost::multiprecision::mpfr_float;

// Scoped override of the global default precision (decimal digits).
class PrecisionGuard {
public:
    explicit PrecisionGuard(unsigned digits10)
        : saved_(BigFloat::default_precision()) {
        BigFloat::default_precision(digits10);
    }
    ~PrecisionGuard() { BigFloat::default_precision(saved_); }
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

private:
    unsigned saved_;
};

} // namespace phifun
