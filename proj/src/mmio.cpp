#include "phifun/mmio.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace phifun {

namespace {

struct Token {
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;
};

// Whitespace-delimited tokens with positions; comment lines stripped.
class TokenStream {
public:
    explicit TokenStream(std::istream& in) {
        std::string raw;
        std::size_t lineno = 0;
        while (std::getline(in, raw)) {
            ++lineno;
            if (lineno == 1) banner_ = raw;
            if (!raw.empty() && raw[0] == '%') continue;
            std::size_t pos = 0;
            while (pos < raw.size()) {
                while (pos < raw.size() && std::isspace(static_cast<unsigned char>(raw[pos]))) ++pos;
                if (pos >= raw.size()) break;
                const std::size_t start = pos;
                while (pos < raw.size() && !std::isspace(static_cast<unsigned char>(raw[pos]))) ++pos;
                tokens_.push_back({raw.substr(start, pos - start), lineno, start + 1});
            }
        }
        last_line_ = lineno;
    }

    const std::string& banner() const { return banner_; }

    bool empty() const { return next_ >= tokens_.size(); }

    Token take(const char* what) {
        if (empty()) throw mm_parse_error(std::string("missing ") + what, last_line_, 1);
        return tokens_[next_++];
    }

    long long take_int(const char* what) {
        const Token t = take(what);
        errno = 0;
        char* end = nullptr;
        const long long v = std::strtoll(t.text.c_str(), &end, 10);
        if (errno != 0 || end == t.text.c_str() || *end != '\0')
            throw mm_parse_error(std::string("expected integer for ") + what, t.line, t.column);
        return v;
    }

    double take_real(const char* what) {
        const Token t = take(what);
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(t.text.c_str(), &end);
        if (end == t.text.c_str() || *end != '\0')
            throw mm_parse_error(std::string("expected number for ") + what, t.line, t.column);
        if (!std::isfinite(v))
            throw mm_parse_error(std::string("non-finite value for ") + what, t.line, t.column);
        return v;
    }

private:
    std::string banner_;
    std::vector<Token> tokens_;
    std::size_t next_ = 0;
    std::size_t last_line_ = 1;
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

enum class Sym { general, symmetric, skew, hermitian };

template <class T>
void mirror(Matrix<T>& a, Sym sym) {
    if (sym == Sym::general) return;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            if (sym == Sym::symmetric)
                a(j, i) = a(i, j);
            else if (sym == Sym::skew)
                a(j, i) = -a(i, j);
            else
                a(j, i) = detail::conj_of(a(i, j));
        }
}

template <class T>
AnyMatrix read_entries(TokenStream& ts, bool coordinate, bool complex_field, Sym sym,
                       std::size_t banner_line) {
    const Token nrow_tok = ts.take("row count");
    errno = 0;
    char* hdr_end = nullptr;
    const long long rows = std::strtoll(nrow_tok.text.c_str(), &hdr_end, 10);
    if (errno != 0 || hdr_end == nrow_tok.text.c_str() || *hdr_end != '\0')
        throw mm_parse_error("expected integer for row count", nrow_tok.line, nrow_tok.column);
    const long long cols = ts.take_int("column count");
    if (rows <= 0 || cols <= 0)
        throw mm_parse_error("dimensions must be positive", nrow_tok.line, nrow_tok.column);
    if (rows != cols)
        throw mm_parse_error("matrix is not square", nrow_tok.line, nrow_tok.column);
    const std::size_t n = static_cast<std::size_t>(rows);
    Matrix<T> a(n);

    auto read_value = [&]() -> T {
        const double re = ts.take_real("entry");
        if constexpr (detail::is_complex_v<T>) {
            const double im = complex_field ? ts.take_real("imaginary part") : 0.0;
            return T{re, im};
        } else {
            (void)complex_field;
            return T(re);
        }
    };

    if (coordinate) {
        const long long nnz = ts.take_int("entry count");
        for (long long e = 0; e < nnz; ++e) {
            const Token itok = ts.take("row index");
            char* end = nullptr;
            const long long i = std::strtoll(itok.text.c_str(), &end, 10);
            if (end == itok.text.c_str() || *end != '\0')
                throw mm_parse_error("expected integer row index", itok.line, itok.column);
            const long long j = ts.take_int("column index");
            if (i < 1 || i > rows || j < 1 || j > cols)
                throw mm_parse_error("index out of range", itok.line, itok.column);
            a(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)) += read_value();
        }
    } else {
        // Array format lists the lower part only for non-general symmetry.
        if (sym == Sym::general) {
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i) a(i, j) = read_value();
        } else {
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = j; i < n; ++i) a(i, j) = read_value();
        }
    }
    if (!ts.empty()) {
        const Token t = ts.take("");
        throw mm_parse_error("trailing data after matrix entries", t.line, t.column);
    }
    mirror(a, sym);
    if (!is_finite(a)) throw mm_parse_error("matrix has non-finite entries", banner_line, 1);
    return AnyMatrix{std::move(a)};
}

} // namespace

AnyMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mm_parse_error("cannot open file " + path, 0, 0);
    TokenStream ts(in);

    std::istringstream banner(ts.banner());
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (lower(tag) != "%%matrixmarket" || lower(object) != "matrix")
        throw mm_parse_error("missing MatrixMarket banner", 1, 1);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);

    bool coordinate;
    if (format == "coordinate")
        coordinate = true;
    else if (format == "array")
        coordinate = false;
    else
        throw mm_parse_error("unsupported format '" + format + "'", 1, 1);

    Sym sym;
    if (symmetry == "general")
        sym = Sym::general;
    else if (symmetry == "symmetric")
        sym = Sym::symmetric;
    else if (symmetry == "skew-symmetric")
        sym = Sym::skew;
    else if (symmetry == "hermitian")
        sym = Sym::hermitian;
    else
        throw mm_parse_error("unsupported symmetry '" + symmetry + "'", 1, 1);

    if (field == "real" || field == "integer") {
        if (sym == Sym::hermitian) sym = Sym::symmetric;
        return read_entries<double>(ts, coordinate, false, sym, 1);
    }
    if (field == "complex") return read_entries<std::complex<double>>(ts, coordinate, true, sym, 1);
    throw mm_parse_error("unsupported field '" + field + "'", 1, 1);
}

namespace {

void open_out(std::ofstream& out, const std::string& path) {
    out.open(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

} // namespace

void write_matrix_market(const std::string& path, const RealMatrix& a) {
    std::ofstream out;
    open_out(out, path);
    const std::size_t n = a.dim();
    out << "%%MatrixMarket matrix array real general\n" << n << " " << n << "\n";
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) out << fmt(a(i, j)) << "\n";
}

void write_matrix_market(const std::string& path, const ComplexMatrix& a) {
    std::ofstream out;
    open_out(out, path);
    const std::size_t n = a.dim();
    out << "%%MatrixMarket matrix array complex general\n" << n << " " << n << "\n";
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            out << fmt(a(i, j).real()) << " " << fmt(a(i, j).imag()) << "\n";
}

void write_csv(const std::string& path, const RealMatrix& a) {
    std::ofstream out;
    open_out(out, path);
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) out << ",";
            out << fmt(a(i, j));
        }
        out << "\n";
    }
}

void write_csv(const std::string& path, const ComplexMatrix& a) {
    std::ofstream out;
    open_out(out, path);
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) out << ",";
            const double im = a(i, j).imag();
            out << fmt(a(i, j).real()) << (im < 0 ? "-" : "+") << fmt(std::abs(im)) << "i";
        }
        out << "\n";
    }
}

} // namespace phifun
