#pragma once

// Independent reference computations for the test suite. Each one recomputes
// a quantity the library also produces, but by a deliberately different route
// (plain integer loops, permutation expansions, byte-by-byte packing), so a
// shared bug in the production code cannot also hide here.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "tspir/tspir.hpp"

namespace oracle {

// a^e mod p by repeated multiplication (not square-and-multiply); 0^0 = 1.
inline std::uint64_t mod_pow(std::uint64_t a, unsigned e, std::uint64_t p) {
    std::uint64_t acc = 1 % p;
    for (unsigned i = 0; i < e; ++i) acc = acc * (a % p) % p;
    return acc;
}

// Answer formula evaluated with raw integer arithmetic, reducing at the end
// of each term: <q, d> + phi_n psi_n sum_j s_j lambda_n^(j-1).
inline std::uint64_t answer(const std::vector<tspir::Felem>& q_vec,
                            const std::vector<tspir::Felem>& shard,
                            const std::vector<tspir::Felem>& s_row, unsigned node,
                            const tspir::SchemeParams& par, unsigned terms) {
    const std::uint64_t p = par.field.modulus();
    std::uint64_t acc = 0;
    for (std::size_t l = 0; l < q_vec.size(); ++l)
        acc = (acc + std::uint64_t(q_vec[l]) * shard[l]) % p;
    std::uint64_t coeff = std::uint64_t(par.phi[node - 1]) * par.psi[node - 1] % p;
    for (unsigned j = 0; j < terms; ++j) {
        std::uint64_t term = coeff * s_row[j] % p * mod_pow(par.points[node - 1], j, p) % p;
        acc = (acc + term) % p;
    }
    return acc;
}

// Interference sums X_j^(r), iterating j outward and splitting j+1 = t+m,
// the opposite nesting from the library's (t, m)-major accumulation.
inline std::vector<std::vector<std::uint64_t>> masked_unknowns(
    const std::vector<tspir::FieldMatrix>& user_rand, const tspir::Database& db,
    const tspir::SchemeParams& par) {
    const std::uint64_t p = par.field.modulus();
    const unsigned mask = par.storage_dim + par.collusion - 1;
    std::vector<std::vector<std::uint64_t>> x(par.storage_dim,
                                              std::vector<std::uint64_t>(mask, 0));
    for (unsigned r = 0; r < par.storage_dim; ++r)
        for (unsigned j = 1; j <= mask; ++j)
            for (unsigned t = 1; t <= par.collusion; ++t) {
                if (j + 1 < t + 1) continue;
                unsigned m = j + 1 - t;
                if (m < 1 || m > par.storage_dim) continue;
                std::uint64_t s = 0;
                for (std::size_t l = 0; l < db.w.rows(); ++l)
                    s = (s + std::uint64_t(user_rand[r].at(l, t - 1)) * db.w.at(l, m - 1)) % p;
                x[r][j - 1] = (x[r][j - 1] + s) % p;
            }
    return x;
}

// Rate formulas in lowest terms, derived as plain integer fractions rather
// than through the Rational class: capacity = (N-M-T+1)/N, secrecy bound
// = (M+T-1)/(N-M-T+1).
inline std::pair<std::int64_t, std::int64_t> reduced(std::int64_t n, std::int64_t d) {
    std::int64_t g = std::gcd(n, d);
    return {n / g, d / g};
}

inline std::pair<std::int64_t, std::int64_t> capacity(unsigned n, unsigned m, unsigned t) {
    if (n < m + t) return {0, 1};
    return reduced(std::int64_t(n) - m - t + 1, std::int64_t(n));
}

inline std::pair<std::int64_t, std::int64_t> secrecy_bound(unsigned n, unsigned m, unsigned t) {
    return reduced(std::int64_t(m) + t - 1, std::int64_t(n) - m - t + 1);
}

// Determinant by Leibniz permutation expansion (fine for dim <= 4).
inline std::uint64_t naive_det(const tspir::FieldMatrix& a) {
    const std::uint64_t p = a.field().modulus();
    const std::size_t n = a.rows();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::int64_t det = 0;
    do {
        std::size_t inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inversions;
        std::uint64_t prod = 1;
        for (std::size_t i = 0; i < n; ++i) prod = prod * a.at(i, perm[i]) % p;
        det += (inversions % 2 == 0) ? std::int64_t(prod) : -std::int64_t(prod);
    } while (std::next_permutation(perm.begin(), perm.end()));
    det %= std::int64_t(p);
    if (det < 0) det += std::int64_t(p);
    return std::uint64_t(det);
}

// Encoded-storage entry D[r][n] = phi_n sum_m W[r][m] lambda_n^(m-1) as a
// scalar sum, never going through mat_mul.
inline std::uint64_t encode_entry(const tspir::Database& db, const tspir::SchemeParams& par,
                                  std::size_t r, unsigned n) {
    const std::uint64_t p = par.field.modulus();
    std::uint64_t acc = 0;
    for (unsigned m = 0; m < par.storage_dim; ++m)
        acc = (acc + std::uint64_t(db.w.at(r, m)) * mod_pow(par.points[n - 1], m, p)) % p;
    return acc * par.phi[n - 1] % p;
}

// Wire frame built byte by byte from the documented layout, independently of
// the codec's put_* helpers.
inline std::vector<std::uint8_t> frame_bytes(const tspir::WireMessage& m) {
    std::vector<std::uint8_t> b;
    auto le = [&](std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) b.push_back(std::uint8_t(v >> (8 * i)));
    };
    le(14 + 4 * m.payload.size(), 4);
    b.push_back(std::uint8_t(m.kind));
    b.push_back(1);
    le(m.modulus, 4);
    le(m.node, 2);
    le(m.round, 2);
    le(m.payload.size(), 4);
    for (tspir::Felem e : m.payload) le(e, 4);
    return b;
}

}  // namespace oracle
