#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>

#include "phifun/matrix.hpp"

namespace phifun {

class mm_parse_error : public std::runtime_error {
public:
    mm_parse_error(const std::string& msg, std::size_t line, std::size_t column)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"),
          line_(line),
          column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

using AnyMatrix = std::variant<RealMatrix, ComplexMatrix>;

// Reads array or coordinate format, real/integer/complex fields, with
// general/symmetric/skew-symmetric/hermitian symmetry expansion. The matrix
// must be square with finite entries.
AnyMatrix read_matrix_market(const std::string& path);

// Array-format writers with 17 significant digits: doubles survive a
// write/read round trip bit for bit.
void write_matrix_market(const std::string& path, const RealMatrix& a);
void write_matrix_market(const std::string& path, const ComplexMatrix& a);

void write_csv(const std::string& path, const RealMatrix& a);
void write_csv(const std::string& path, const ComplexMatrix& a);

} // namespace phifun
