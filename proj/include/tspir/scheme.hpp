#pragma once

// Symmetric PIR over an (N,M)-MDS coded store with up to T colluding servers.
//
// One retrieval runs M rounds. Per round the user hides a deterministic
// unit-vector selection pattern inside queries randomized through a T-dim
// GRS code; every server answers with one inner product plus a shared mask,
// and the user peels M+T-1 masked interference sums per round before solving
// for the file symbols.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tspir/field.hpp"
#include "tspir/grs.hpp"
#include "tspir/rng.hpp"

namespace tspir {

// Scheme variants whose only purpose is to demonstrate that the privacy
// audits catch broken constructions.
enum class Mutant {
    none,
    no_randomization,  // user randomness forced to zero; queries expose the selection pattern
    no_mask,           // servers skip the shared mask entirely
    short_mask,        // mask uses one term too few
};

struct SchemeParams {
    unsigned servers;     // N
    unsigned storage_dim; // M, also the number of rounds
    unsigned collusion;   // T
    unsigned files;       // K
    PrimeField field;
    std::vector<Felem> points;  // lambda, shared by both codes
    std::vector<Felem> phi;     // storage code multipliers
    std::vector<Felem> psi;     // query code multipliers

    // Derived. rows_per_file = N-M-T+1 rows of W per file; file_len = M * rows_per_file.
    unsigned rows_per_file;
    unsigned file_len;
    unsigned full_groups;   // rows_per_file / M (always-active column groups, Case 2)
    unsigned ladder_width;  // rows_per_file % M (cyclic ladder width on the first M columns)
    GrsCode storage_code;   // G_S, M x N
    GrsCode query_code;     // G_Q, T x N
    bool single_file_ok = false;

    unsigned mask_len() const { return storage_dim + collusion - 1; }  // M+T-1
    unsigned query_len() const { return rows_per_file * files; }       // per-round query vector length
    bool single_file_allowed() const { return single_file_ok; }

    static SchemeParams create(unsigned n, unsigned m, unsigned t, unsigned k, std::uint32_t q,
                               std::vector<Felem> lambda = {}, std::vector<Felem> phi = {},
                               std::vector<Felem> psi = {}, bool allow_single_file = false) {
        if (m < 1 || t < 1 || n < 1) throw InvalidParams("N, M, T must be positive");
        if (k < 1) throw InvalidParams("K must be positive");
        if (k < 2 && !allow_single_file)
            throw InvalidParams("K must be ≥ 2 (single-file privacy is vacuous)");
        if (n < m + t) throw InvalidParams("N must be ≥ M+T");
        if (!PrimeField::is_prime(q) || q <= n)
            throw InvalidParams("modulus must be prime > N");
        PrimeField field(q);
        if (lambda.empty()) {
            lambda.resize(n);
            for (unsigned i = 0; i < n; ++i) lambda[i] = i + 1;
        }
        if (phi.empty()) phi.assign(n, 1);
        if (psi.empty()) psi.assign(n, 1);
        if (lambda.size() != n || phi.size() != n || psi.size() != n)
            throw InvalidParams("lambda, phi, psi must each have N entries");
        GrsCode gs = storage_generator(lambda, phi, m, field);
        GrsCode gq = query_generator(lambda, psi, t, field);
        unsigned rows = n - m - t + 1;
        return SchemeParams{n, m, t, k, field, std::move(lambda), std::move(phi), std::move(psi),
                            rows, m * rows, rows / m, rows % m, std::move(gs), std::move(gq),
                            allow_single_file};
    }
};

// The K files as one (K * rows_per_file) x M matrix; file k owns a
// contiguous block of rows_per_file rows.
struct Database {
    FieldMatrix w;

    static Database zero(const SchemeParams& p) {
        return {FieldMatrix(std::size_t(p.files) * p.rows_per_file, p.storage_dim, p.field)};
    }

    static Database random(const SchemeParams& p, SplitMix64& rng) {
        Database db = zero(p);
        for (std::size_t r = 0; r < db.w.rows(); ++r)
            for (std::size_t c = 0; c < db.w.cols(); ++c)
                db.w.at(r, c) = rng.field_element(p.field);
        return db;
    }

    // rows_per_file x M block for file k (1-based).
    FieldMatrix file_block(const SchemeParams& p, unsigned k) const {
        FieldMatrix out(p.rows_per_file, p.storage_dim, p.field);
        std::size_t base = std::size_t(k - 1) * p.rows_per_file;
        for (std::size_t r = 0; r < p.rows_per_file; ++r)
            for (std::size_t c = 0; c < p.storage_dim; ++c)
                out.at(r, c) = w.at(base + r, c);
        return out;
    }
};

struct StorageMatrix {
    FieldMatrix d;  // column n is shard D_n

    std::vector<Felem> shard(unsigned node) const { return d.col(node - 1); }
};

struct CommonRandomness {
    FieldMatrix s;  // M rounds x (M+T-1) symbols

    static CommonRandomness draw(const SchemeParams& p, SplitMix64& rng) {
        FieldMatrix s(p.storage_dim, p.mask_len(), p.field);
        for (std::size_t r = 0; r < s.rows(); ++r)
            for (std::size_t c = 0; c < s.cols(); ++c)
                s.at(r, c) = rng.field_element(p.field);
        return {std::move(s)};
    }
};

struct QueryPlan {
    unsigned want = 0;                   // desired file index
    FieldMatrix selection;               // E, (M * query_len) x N
    std::vector<FieldMatrix> user_rand;  // U^(r), query_len x T per round
    FieldMatrix queries;                 // Q = stacked U^(r) * G_Q + E

    // Query vector sent to `node` (1-based) at `round` (1-based).
    std::vector<Felem> query_vec(const SchemeParams& p, unsigned node, unsigned round) const {
        std::vector<Felem> out(p.query_len());
        std::size_t base = std::size_t(round - 1) * p.query_len();
        for (std::size_t l = 0; l < out.size(); ++l) out[l] = queries.at(base + l, node - 1);
        return out;
    }
};

struct DecodeResult {
    FieldMatrix file;         // rows_per_file x M, the retrieved file block
    FieldMatrix masked_sums;  // M x (M+T-1): per round, the solved X_j + S_j values
};

inline StorageMatrix encode_storage(const Database& db, const SchemeParams& p) {
    if (db.w.rows() != std::size_t(p.files) * p.rows_per_file || db.w.cols() != p.storage_dim)
        throw DimensionMismatch("database must be (K * rows_per_file) x M");
    return {mat_mul(db.w, p.storage_code.generator)};
}

namespace detail {

// Unit index (within the round block) carried by node `n` at `round`,
// both 0-based, before shifting into the desired file's row block.
// Case 1 (rows_per_file <= M): one cyclic ladder over the first M columns.
// Case 2 (rows_per_file > M): a ladder_width-wide ladder on the first M
// columns plus full_groups always-active groups of M columns.
inline std::optional<unsigned> selection_slot(const SchemeParams& p, unsigned round, unsigned n) {
    const unsigned m = p.storage_dim;
    if (p.rows_per_file <= m) {
        if (n >= m) return std::nullopt;
        unsigned s = (round + m - n) % m;
        return s < p.rows_per_file ? std::optional<unsigned>(s) : std::nullopt;
    }
    if (n < m) {
        unsigned s = (round + m - n) % m;
        return s < p.ladder_width ? std::optional<unsigned>(s) : std::nullopt;
    }
    unsigned g = (n - m) / m;
    if (g >= p.full_groups) return std::nullopt;
    unsigned c = (n - m) % m;
    return p.ladder_width + g * m + (round + m - c) % m;
}

}  // namespace detail

// Checks the selection-matrix contract for file k:
//  (1) every per-round column is zero or a unit vector inside file k's block;
//  (2) every round has exactly rows_per_file active columns;
//  (3) every file row is selected at exactly M distinct nodes over the M rounds;
//  (4) the resulting L x L recovery system is invertible.
inline void validate_selection(const SchemeParams& p, unsigned k, const FieldMatrix& e) {
    const unsigned m = p.storage_dim;
    const unsigned qlen = p.query_len();
    const unsigned rows = p.rows_per_file;
    if (e.rows() != std::size_t(m) * qlen || e.cols() != p.servers)
        throw SelectionInvalid("E must be (M * query_len) x N");
    const std::size_t base = std::size_t(k - 1) * rows;

    std::vector<std::vector<unsigned>> nodes_for_slot(rows);
    FieldMatrix recovery(p.file_len, p.file_len, p.field);
    std::size_t eq = 0;
    for (unsigned r = 0; r < m; ++r) {
        unsigned active = 0;
        for (unsigned n = 0; n < p.servers; ++n) {
            std::optional<unsigned> slot;
            for (unsigned l = 0; l < qlen; ++l) {
                Felem v = e.at(std::size_t(r) * qlen + l, n);
                if (v == 0) continue;
                if (v != 1 || slot.has_value())
                    throw SelectionInvalid("column block is neither zero nor a unit vector");
                if (l < base || l >= base + rows)
                    throw SelectionInvalid("unit index outside the desired file's block");
                slot = unsigned(l - base);
            }
            if (!slot) continue;
            ++active;
            nodes_for_slot[*slot].push_back(n);
            for (unsigned c = 0; c < m; ++c)
                recovery.at(eq, std::size_t(*slot) * m + c) =
                    p.field.mul(p.phi[n], fp_pow(p.points[n], c, p.field));
            ++eq;
        }
        if (active != rows)
            throw SelectionInvalid("round must have exactly rows_per_file active columns");
    }
    for (unsigned s = 0; s < rows; ++s) {
        auto& nodes = nodes_for_slot[s];
        std::vector<unsigned> uniq = nodes;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        if (nodes.size() != m || uniq.size() != m)
            throw SelectionInvalid("file row must be selected at exactly M distinct nodes");
    }
    if (mat_rank(recovery) != p.file_len)
        throw SelectionInvalid("recovery system is singular");
}

inline FieldMatrix build_selection_matrix(const SchemeParams& p, unsigned k) {
    if (k < 1 || k > p.files) throw InvalidParams("desired file index out of range");
    const unsigned qlen = p.query_len();
    FieldMatrix e(std::size_t(p.storage_dim) * qlen, p.servers, p.field);
    const std::size_t base = std::size_t(k - 1) * p.rows_per_file;
    for (unsigned r = 0; r < p.storage_dim; ++r)
        for (unsigned n = 0; n < p.servers; ++n)
            if (auto slot = detail::selection_slot(p, r, n))
                e.at(std::size_t(r) * qlen + base + *slot, n) = 1;
    validate_selection(p, k, e);
    return e;
}

// Assembles Q from explicit per-round randomness: round block r of Q equals
// U^(r) * G_Q plus the matching block of E. Zero randomness gives Q = E,
// which is the no_randomization mutant and a convenient test hook.
inline QueryPlan build_queries_with(const SchemeParams& p, unsigned k,
                                    std::vector<FieldMatrix> user_rand) {
    if (user_rand.size() != p.storage_dim)
        throw DimensionMismatch("need one randomness matrix per round");
    for (const auto& u : user_rand)
        if (u.rows() != p.query_len() || u.cols() != p.collusion)
            throw DimensionMismatch("round randomness must be query_len x T");
    FieldMatrix e = build_selection_matrix(p, k);
    FieldMatrix q = e;
    for (unsigned r = 0; r < p.storage_dim; ++r) {
        FieldMatrix masked = mat_mul(user_rand[r], p.query_code.generator);
        std::size_t base = std::size_t(r) * p.query_len();
        for (std::size_t l = 0; l < p.query_len(); ++l)
            for (unsigned n = 0; n < p.servers; ++n)
                q.at(base + l, n) = p.field.add(q.at(base + l, n), masked.at(l, n));
    }
    return {k, std::move(e), std::move(user_rand), std::move(q)};
}

inline std::vector<FieldMatrix> draw_user_randomness(const SchemeParams& p, SplitMix64& rng) {
    std::vector<FieldMatrix> u;
    u.reserve(p.storage_dim);
    for (unsigned r = 0; r < p.storage_dim; ++r) {
        FieldMatrix m(p.query_len(), p.collusion, p.field);
        for (std::size_t l = 0; l < m.rows(); ++l)
            for (std::size_t t = 0; t < m.cols(); ++t)
                m.at(l, t) = rng.field_element(p.field);
        u.push_back(std::move(m));
    }
    return u;
}

inline QueryPlan build_queries(const SchemeParams& p, unsigned k, std::uint64_t seed) {
    SplitMix64 rng(seed);
    return build_queries_with(p, k, draw_user_randomness(p, rng));
}

inline unsigned mask_terms(const SchemeParams& p, Mutant mutant) {
    switch (mutant) {
        case Mutant::no_mask: return 0;
        case Mutant::short_mask: return p.mask_len() - 1;
        default: return p.mask_len();
    }
}

// Answer of node `node` (1-based) for one round: <query, shard> plus the
// node's share of the round mask, phi_n psi_n sum_j S_j lambda_n^(j-1).
// `terms` truncates the mask sum (mutants only).
inline Felem node_answer_with_mask_terms(const std::vector<Felem>& q_vec,
                                         const std::vector<Felem>& shard,
                                         const std::vector<Felem>& s_row, unsigned node,
                                         const SchemeParams& p, unsigned terms) {
    if (q_vec.size() != p.query_len() || shard.size() != p.query_len())
        throw DimensionMismatch("query and shard must have query_len entries");
    if (s_row.size() != p.mask_len())
        throw DimensionMismatch("common randomness row must have M+T-1 entries");
    if (node < 1 || node > p.servers) throw DimensionMismatch("node index out of range");
    const PrimeField& f = p.field;
    Felem acc = dot(q_vec, shard, f);
    Felem coeff = f.mul(p.phi[node - 1], p.psi[node - 1]);
    Felem lam_pow = 1;
    for (unsigned j = 0; j < terms; ++j) {
        acc = f.add(acc, f.mul(coeff, f.mul(s_row[j], lam_pow)));
        lam_pow = f.mul(lam_pow, p.points[node - 1]);
    }
    return acc;
}

inline Felem node_answer(const std::vector<Felem>& q_vec, const std::vector<Felem>& shard,
                         const std::vector<Felem>& s_row, unsigned node, const SchemeParams& p) {
    return node_answer_with_mask_terms(q_vec, shard, s_row, node, p, p.mask_len());
}

// Per-round interference sums X_j^(r) = sum_{t+m=j+1} <U_t^(r), W_m>.
// Used as the independent oracle for what stage-1 decoding recovers.
inline FieldMatrix compute_masked_unknowns(const std::vector<FieldMatrix>& user_rand,
                                           const Database& db, const SchemeParams& p) {
    if (user_rand.size() != p.storage_dim)
        throw DimensionMismatch("need one randomness matrix per round");
    FieldMatrix x(p.storage_dim, p.mask_len(), p.field);
    for (unsigned r = 0; r < p.storage_dim; ++r) {
        const FieldMatrix& u = user_rand[r];
        if (u.rows() != p.query_len() || u.cols() != p.collusion)
            throw DimensionMismatch("round randomness must be query_len x T");
        if (db.w.rows() != u.rows() || db.w.cols() != p.storage_dim)
            throw DimensionMismatch("database shape");
        for (unsigned t = 0; t < p.collusion; ++t)
            for (unsigned m = 0; m < p.storage_dim; ++m) {
                Felem s = 0;
                for (std::size_t l = 0; l < u.rows(); ++l)
                    s = p.field.add(s, p.field.mul(u.at(l, t), db.w.at(l, m)));
                x.at(r, t + m) = p.field.add(x.at(r, t + m), s);
            }
    }
    return x;
}

// Two-stage decoder. Stage 1 solves, per round, the N x N system whose
// unknowns are the M+T-1 masked sums plus one <E_n, D_n> value per active
// node; stage 2 stacks all L recovered values into an L x L system over the
// desired file's symbols.
inline DecodeResult decode(const FieldMatrix& answers, const QueryPlan& plan,
                           const SchemeParams& p) {
    if (answers.rows() != p.servers || answers.cols() != p.storage_dim)
        throw DimensionMismatch("answers must be N x M (node per row, round per column)");
    const PrimeField& f = p.field;
    const unsigned mask = p.mask_len();
    const std::size_t base = std::size_t(plan.want - 1) * p.rows_per_file;

    FieldMatrix masked_sums(p.storage_dim, mask, f);
    // (slot, node, value) triples feeding stage 2
    std::vector<std::tuple<unsigned, unsigned, Felem>> recovered;
    recovered.reserve(p.file_len);

    for (unsigned r = 0; r < p.storage_dim; ++r) {
        std::vector<std::pair<unsigned, unsigned>> active;  // node -> slot
        for (unsigned n = 0; n < p.servers; ++n)
            for (unsigned l = 0; l < p.query_len(); ++l)
                if (plan.selection.at(std::size_t(r) * p.query_len() + l, n) != 0)
                    active.emplace_back(n, unsigned(l - base));
        FieldMatrix sys(p.servers, p.servers, f);
        std::vector<Felem> rhs(p.servers);
        for (unsigned n = 0; n < p.servers; ++n) {
            Felem coeff = f.mul(p.phi[n], p.psi[n]);
            Felem lam_pow = 1;
            for (unsigned j = 0; j < mask; ++j) {
                sys.at(n, j) = f.mul(coeff, lam_pow);
                lam_pow = f.mul(lam_pow, p.points[n]);
            }
            rhs[n] = answers.at(n, r);
        }
        for (std::size_t i = 0; i < active.size(); ++i) sys.at(active[i].first, mask + i) = 1;
        std::vector<Felem> x = mat_solve(std::move(sys), std::move(rhs));
        for (unsigned j = 0; j < mask; ++j) masked_sums.at(r, j) = x[j];
        for (std::size_t i = 0; i < active.size(); ++i)
            recovered.emplace_back(active[i].second, active[i].first, x[mask + i]);
    }

    FieldMatrix sys(p.file_len, p.file_len, f);
    std::vector<Felem> rhs(p.file_len);
    for (std::size_t eq = 0; eq < recovered.size(); ++eq) {
        auto [slot, n, v] = recovered[eq];
        for (unsigned c = 0; c < p.storage_dim; ++c)
            sys.at(eq, std::size_t(slot) * p.storage_dim + c) =
                f.mul(p.phi[n], fp_pow(p.points[n], c, f));
        rhs[eq] = v;
    }
    std::vector<Felem> x = mat_solve(std::move(sys), std::move(rhs));
    FieldMatrix file(p.rows_per_file, p.storage_dim, f);
    for (unsigned s = 0; s < p.rows_per_file; ++s)
        for (unsigned c = 0; c < p.storage_dim; ++c)
            file.at(s, c) = x[std::size_t(s) * p.storage_dim + c];
    return {std::move(file), std::move(masked_sums)};
}

}  // namespace tspir
