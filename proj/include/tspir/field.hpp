#pragma once

// Exact arithmetic and linear algebra over a prime field F_p.
// Elements are canonical residues in [0, p); every operation stays canonical.

#include <cassert>
#include <cstdint>
#include <vector>

#include "tspir/errors.hpp"

namespace tspir {

using Felem = std::uint32_t;

class PrimeField {
public:
    explicit PrimeField(std::uint32_t p) : p_(p) {
        if (!is_prime(p))
            throw InvalidParams("modulus must be a prime in [2, 2^31)");
    }

    std::uint32_t modulus() const { return p_; }

    bool canonical(Felem a) const { return a < p_; }

    Felem add(Felem a, Felem b) const {
        assert(canonical(a) && canonical(b));
        std::uint64_t s = std::uint64_t(a) + b;
        return Felem(s >= p_ ? s - p_ : s);
    }

    Felem sub(Felem a, Felem b) const {
        assert(canonical(a) && canonical(b));
        return a >= b ? a - b : Felem(p_ - (b - a));
    }

    Felem neg(Felem a) const { return sub(0, a); }

    Felem mul(Felem a, Felem b) const {
        assert(canonical(a) && canonical(b));
        return Felem((std::uint64_t(a) * b) % p_);
    }

    static bool is_prime(std::uint32_t p) {
        if (p < 2 || p >= (1u << 31)) return false;
        if (p < 4) return true;
        if (p % 2 == 0) return false;
        for (std::uint32_t d = 3; std::uint64_t(d) * d <= p; d += 2)
            if (p % d == 0) return false;
        return true;
    }

    bool operator==(const PrimeField& rhs) const { return p_ == rhs.p_; }
    bool operator!=(const PrimeField& rhs) const { return p_ != rhs.p_; }

private:
    std::uint32_t p_;
};

// a^e mod p by square-and-multiply; 0^0 := 1.
inline Felem fp_pow(Felem a, std::uint64_t e, const PrimeField& f) {
    assert(f.canonical(a));
    Felem acc = 1;
    Felem base = a;
    while (e > 0) {
        if (e & 1) acc = f.mul(acc, base);
        base = f.mul(base, base);
        e >>= 1;
    }
    return acc;
}

// Multiplicative inverse by extended Euclid.
inline Felem fp_inv(Felem a, const PrimeField& f) {
    if (a == 0) throw ZeroInverse();
    std::int64_t r0 = f.modulus(), r1 = a;
    std::int64_t s0 = 0, s1 = 1;
    while (r1 != 0) {
        std::int64_t q = r0 / r1;
        std::int64_t r2 = r0 - q * r1;
        std::int64_t s2 = s0 - q * s1;
        r0 = r1; r1 = r2;
        s0 = s1; s1 = s2;
    }
    if (s0 < 0) s0 += f.modulus();
    return Felem(s0);
}

class FieldMatrix {
public:
    FieldMatrix(std::size_t rows, std::size_t cols, PrimeField field, Felem fill = 0)
        : rows_(rows), cols_(cols), field_(field), a_(rows * cols, fill) {
        assert(field.canonical(fill));
    }

    static FieldMatrix identity(std::size_t n, PrimeField field) {
        FieldMatrix m(n, n, field);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const PrimeField& field() const { return field_; }

    Felem& at(std::size_t r, std::size_t c) {
        assert(r < rows_ && c < cols_);
        return a_[r * cols_ + c];
    }
    Felem at(std::size_t r, std::size_t c) const {
        assert(r < rows_ && c < cols_);
        return a_[r * cols_ + c];
    }

    const std::vector<Felem>& entries() const { return a_; }

    std::vector<Felem> row(std::size_t r) const {
        return {a_.begin() + long(r * cols_), a_.begin() + long((r + 1) * cols_)};
    }
    std::vector<Felem> col(std::size_t c) const {
        std::vector<Felem> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
        return out;
    }

    bool operator==(const FieldMatrix& rhs) const {
        return rows_ == rhs.rows_ && cols_ == rhs.cols_ && field_ == rhs.field_ && a_ == rhs.a_;
    }

private:
    std::size_t rows_, cols_;
    PrimeField field_;
    std::vector<Felem> a_;
};

inline FieldMatrix mat_mul(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.field() != b.field()) throw DimensionMismatch("operands over different fields");
    if (a.cols() != b.rows()) throw DimensionMismatch("mat_mul inner dimensions");
    const PrimeField& f = a.field();
    FieldMatrix out(a.rows(), b.cols(), f);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            Felem aik = a.at(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                out.at(i, j) = f.add(out.at(i, j), f.mul(aik, b.at(k, j)));
        }
    return out;
}

inline Felem dot(const std::vector<Felem>& a, const std::vector<Felem>& b, const PrimeField& f) {
    if (a.size() != b.size()) throw DimensionMismatch("dot product lengths");
    Felem acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc = f.add(acc, f.mul(a[i], b[i]));
    return acc;
}

namespace detail {

// Row-echelon elimination; pivot = first nonzero in column, scaled by its
// inverse. Returns the rank; if rhs != nullptr it receives the same row ops.
inline std::size_t eliminate(FieldMatrix& m, std::vector<Felem>* rhs) {
    const PrimeField& f = m.field();
    std::size_t pivot_row = 0;
    for (std::size_t c = 0; c < m.cols() && pivot_row < m.rows(); ++c) {
        std::size_t r = pivot_row;
        while (r < m.rows() && m.at(r, c) == 0) ++r;
        if (r == m.rows()) continue;
        if (r != pivot_row) {
            for (std::size_t j = 0; j < m.cols(); ++j)
                std::swap(m.at(r, j), m.at(pivot_row, j));
            if (rhs) std::swap((*rhs)[r], (*rhs)[pivot_row]);
        }
        Felem inv = fp_inv(m.at(pivot_row, c), f);
        for (std::size_t j = c; j < m.cols(); ++j)
            m.at(pivot_row, j) = f.mul(m.at(pivot_row, j), inv);
        if (rhs) (*rhs)[pivot_row] = f.mul((*rhs)[pivot_row], inv);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == pivot_row) continue;
            Felem factor = m.at(i, c);
            if (factor == 0) continue;
            for (std::size_t j = c; j < m.cols(); ++j)
                m.at(i, j) = f.sub(m.at(i, j), f.mul(factor, m.at(pivot_row, j)));
            if (rhs) (*rhs)[i] = f.sub((*rhs)[i], f.mul(factor, (*rhs)[pivot_row]));
        }
        ++pivot_row;
    }
    return pivot_row;
}

}  // namespace detail

inline std::size_t mat_rank(FieldMatrix m) {
    return detail::eliminate(m, nullptr);
}

// Solves a*x = b for square invertible a; throws SingularMatrix otherwise.
inline std::vector<Felem> mat_solve(FieldMatrix a, std::vector<Felem> b) {
    if (a.rows() != a.cols()) throw DimensionMismatch("mat_solve needs a square matrix");
    if (b.size() != a.rows()) throw DimensionMismatch("mat_solve rhs length");
    std::size_t n = a.rows();
    if (detail::eliminate(a, &b) < n) throw SingularMatrix();
    // eliminate() leaves a reduced identity, so b now holds the solution.
    return b;
}

}  // namespace tspir
