#pragma once

// Generalized Reed-Solomon generator matrices: Vandermonde rows over distinct
// evaluation points, columns scaled by nonzero multipliers. Storage and query
// codes are both built here; their Schur product governs how many masked
// interference sums a retrieval round carries.

#include <algorithm>
#include <vector>

#include "tspir/field.hpp"

namespace tspir {

struct GrsCode {
    std::size_t dim = 0;              // M for the storage code, T for the query code
    std::vector<Felem> points;        // lambda_1..lambda_N, pairwise distinct
    std::vector<Felem> multipliers;   // phi or psi, all nonzero
    FieldMatrix generator;            // dim x N, generator[j][n] = mult_n * lambda_n^j

    std::size_t length() const { return generator.cols(); }
};

namespace detail {

inline GrsCode make_grs(const std::vector<Felem>& points, const std::vector<Felem>& multipliers,
                        std::size_t dim, const PrimeField& field) {
    if (points.size() != multipliers.size())
        throw DimensionMismatch("points and multipliers must have equal length");
    const std::size_t n = points.size();
    if (dim == 0 || dim > n)
        throw InvalidParams("code dimension must be in [1, N]");
    for (std::size_t i = 0; i < n; ++i) {
        if (!field.canonical(points[i]) || !field.canonical(multipliers[i]))
            throw InvalidParams("points and multipliers must be canonical residues");
        if (multipliers[i] == 0) throw ZeroMultiplier();
        for (std::size_t j = i + 1; j < n; ++j)
            if (points[i] == points[j]) throw InvalidPoints();
    }
    FieldMatrix g(dim, n, field);
    for (std::size_t c = 0; c < n; ++c) {
        Felem v = multipliers[c];
        for (std::size_t r = 0; r < dim; ++r) {
            g.at(r, c) = v;
            v = field.mul(v, points[c]);
        }
    }
    return GrsCode{dim, points, multipliers, std::move(g)};
}

// Enumerates k-subsets of [0, n) in lexicographic order.
inline bool next_subset(std::vector<std::size_t>& idx, std::size_t n) {
    std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
        if (idx[i] + (k - i) < n) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace detail

inline GrsCode storage_generator(const std::vector<Felem>& points, const std::vector<Felem>& phi,
                                 std::size_t m, const PrimeField& field) {
    return detail::make_grs(points, phi, m, field);
}

inline GrsCode query_generator(const std::vector<Felem>& points, const std::vector<Felem>& psi,
                               std::size_t t, const PrimeField& field) {
    return detail::make_grs(points, psi, t, field);
}

// Exhaustive MDS test: every dim x dim column submatrix must be invertible.
// Deliberately combinatorial so it can vet hand-supplied matrices too.
inline bool check_mds(const GrsCode& code) {
    const std::size_t n = code.length();
    const std::size_t d = code.dim;
    if (d == 0 || d > n || code.generator.rows() != d) return false;
    std::vector<std::size_t> idx(d);
    for (std::size_t i = 0; i < d; ++i) idx[i] = i;
    do {
        FieldMatrix sub(d, d, code.generator.field());
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c)
                sub.at(r, c) = code.generator.at(r, idx[c]);
        if (mat_rank(std::move(sub)) < d) return false;
    } while (detail::next_subset(idx, n));
    return true;
}

// Rank of the span of all componentwise row products between the two codes.
inline std::size_t schur_product_dim(const GrsCode& a, const GrsCode& b) {
    if (a.length() != b.length()) throw DimensionMismatch("schur product needs equal code length");
    if (a.generator.field() != b.generator.field())
        throw DimensionMismatch("schur product needs a common field");
    const PrimeField& f = a.generator.field();
    const std::size_t n = a.length();
    FieldMatrix prod(a.dim * b.dim, n, f);
    for (std::size_t i = 0; i < a.dim; ++i)
        for (std::size_t j = 0; j < b.dim; ++j)
            for (std::size_t c = 0; c < n; ++c)
                prod.at(i * b.dim + j, c) = f.mul(a.generator.at(i, c), b.generator.at(j, c));
    return mat_rank(std::move(prod));
}

}  // namespace tspir
