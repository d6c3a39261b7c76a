#pragma once

// Exact information-theoretic audits. Every verdict comes from exhaustive
// enumeration of the protocol's randomness with rational or integer-count
// arithmetic; floating point appears only in human-readable reporting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tspir/grs.hpp"
#include "tspir/rational.hpp"
#include "tspir/scheme.hpp"

namespace tspir {

using Outcome = std::vector<Felem>;

struct DistTable {
    std::map<Outcome, Rational> outcomes;

    Rational total() const {
        Rational t(0);
        for (const auto& [o, pr] : outcomes) t += pr;
        return t;
    }
};

struct IndependenceResult {
    bool independent = true;
    double mi_bits = 0.0;  // display only; the verdict is exact
    std::optional<std::pair<Outcome, Outcome>> witness;
};

struct PrivacyReport {
    bool pass = true;
    std::string detail;
    std::optional<std::pair<Outcome, Outcome>> witness;
    double mutual_information_bits = 0.0;  // display only
    std::uint64_t enumeration_size = 0;    // elementary events visited
};

enum class AuditMode { exhaustive, structural };

inline std::uint64_t default_enum_ceiling() {
    if (const char* env = std::getenv("TSPIR_ENUM_CEILING")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return v;
    }
    return 10'000'000;
}

namespace detail {

// Which protocol randomness varies during an enumeration. Mutants pin parts
// of it: no_randomization zeroes U, and S columns a mutant never adds to
// answers are skipped when S itself is not part of the observed view.
struct FreeSpace {
    bool vary_w = false;
    bool vary_u = false;
    unsigned s_cols = 0;

    unsigned symbols(const SchemeParams& p) const {
        unsigned n = 0;
        if (vary_w) n += p.query_len() * p.storage_dim;
        if (vary_u) n += p.storage_dim * p.query_len() * p.collusion;
        n += p.storage_dim * s_cols;
        return n;
    }
};

using u128 = unsigned __int128;

inline bool events_within(std::uint64_t q, unsigned symbols, std::uint64_t ceiling,
                          std::uint64_t& events) {
    u128 v = 1;
    for (unsigned i = 0; i < symbols; ++i) {
        v *= q;
        if (v > ceiling) return false;
    }
    events = std::uint64_t(v);
    return true;
}

inline std::string space_too_large(const std::string& what, std::uint64_t q, unsigned symbols,
                                   std::uint64_t ceiling) {
    std::ostringstream os;
    os << what << " has " << q << "^" << symbols << " = " << std::setprecision(4)
       << std::pow(double(q), double(symbols)) << " elementary events; ceiling is " << ceiling;
    return os.str();
}

struct EventVars {
    FieldMatrix w;                // query_len x M
    std::vector<FieldMatrix> u;   // per round, query_len x T
    FieldMatrix s;                // M x (M+T-1)

    static EventVars zero(const SchemeParams& p) {
        EventVars ev{FieldMatrix(p.query_len(), p.storage_dim, p.field),
                     {},
                     FieldMatrix(p.storage_dim, p.mask_len(), p.field)};
        for (unsigned r = 0; r < p.storage_dim; ++r)
            ev.u.emplace_back(p.query_len(), p.collusion, p.field);
        return ev;
    }
};

// Visits every assignment of the varied randomness exactly once (an odometer
// over the free symbols); pinned symbols stay zero.
template <class Fn>
void for_each_event(const SchemeParams& p, const FreeSpace& fs, Fn&& fn) {
    EventVars ev = EventVars::zero(p);
    std::vector<Felem*> slots;
    if (fs.vary_w)
        for (std::size_t r = 0; r < ev.w.rows(); ++r)
            for (std::size_t c = 0; c < ev.w.cols(); ++c) slots.push_back(&ev.w.at(r, c));
    if (fs.vary_u)
        for (auto& u : ev.u)
            for (std::size_t l = 0; l < u.rows(); ++l)
                for (std::size_t t = 0; t < u.cols(); ++t) slots.push_back(&u.at(l, t));
    for (std::size_t r = 0; r < ev.s.rows(); ++r)
        for (unsigned j = 0; j < fs.s_cols; ++j) slots.push_back(&ev.s.at(r, j));
    const Felem q = Felem(p.field.modulus());
    const EventVars& cev = ev;
    for (;;) {
        fn(cev);
        std::size_t i = 0;
        while (i < slots.size()) {
            if (++*slots[i] < q) break;
            *slots[i] = 0;
            ++i;
        }
        if (i == slots.size()) break;
    }
}

// What one enumeration emits per event, in emission order: W rows (all, or
// all outside the desired file), queries, answers, shards, common randomness.
struct ViewSpec {
    std::vector<unsigned> nodes;  // observed servers, 1-based ascending
    bool queries = true;
    bool answers = false;
    bool shards = false;
    bool common_rand = false;
    bool other_files = false;
    bool all_files = false;
    unsigned want = 1;
    unsigned terms = 0;  // mask terms the servers actually add
};

class ViewBuilder {
public:
    ViewBuilder(const SchemeParams& p, ViewSpec spec)
        : p_(&p), spec_(std::move(spec)), e_(build_selection_matrix(p, spec_.want)) {
        for (unsigned node : spec_.nodes) {
            unsigned n = node - 1;
            gs_.push_back(p.storage_code.generator.col(n));
            gq_.push_back(p.query_code.generator.col(n));
            coeff_.push_back(p.field.mul(p.phi[n], p.psi[n]));
            std::vector<Felem> pows(p.mask_len());
            Felem lp = 1;
            for (unsigned j = 0; j < p.mask_len(); ++j) {
                pows[j] = lp;
                lp = p.field.mul(lp, p.points[n]);
            }
            lam_.push_back(std::move(pows));
        }
        qbuf_.resize(std::size_t(p.storage_dim) * spec_.nodes.size() * p.query_len());
        dbuf_.resize(spec_.nodes.size() * p.query_len());
    }

    std::size_t view_len() const {
        const SchemeParams& p = *p_;
        std::size_t w_all = std::size_t(p.query_len()) * p.storage_dim;
        std::size_t n = 0;
        if (spec_.all_files) n += w_all;
        else if (spec_.other_files) n += w_all - std::size_t(p.rows_per_file) * p.storage_dim;
        if (spec_.queries) n += std::size_t(p.storage_dim) * spec_.nodes.size() * p.query_len();
        if (spec_.answers) n += spec_.nodes.size() * p.storage_dim;
        if (spec_.shards) n += spec_.nodes.size() * p.query_len();
        if (spec_.common_rand) n += std::size_t(p.storage_dim) * p.mask_len();
        return n;
    }

    void operator()(const EventVars& ev, Outcome& out) {
        const SchemeParams& p = *p_;
        const PrimeField& f = p.field;
        const std::size_t qlen = p.query_len();
        const std::size_t nn = spec_.nodes.size();
        out.clear();
        if (spec_.all_files || spec_.other_files) {
            std::size_t lo = std::size_t(spec_.want - 1) * p.rows_per_file;
            std::size_t hi = lo + p.rows_per_file;
            for (std::size_t r = 0; r < ev.w.rows(); ++r) {
                if (!spec_.all_files && r >= lo && r < hi) continue;
                for (std::size_t c = 0; c < ev.w.cols(); ++c) out.push_back(ev.w.at(r, c));
            }
        }
        if (spec_.answers || spec_.shards)
            for (std::size_t ni = 0; ni < nn; ++ni)
                for (std::size_t l = 0; l < qlen; ++l) {
                    Felem v = 0;
                    for (unsigned m = 0; m < p.storage_dim; ++m)
                        v = f.add(v, f.mul(ev.w.at(l, m), gs_[ni][m]));
                    dbuf_[ni * qlen + l] = v;
                }
        for (unsigned r = 0; r < p.storage_dim; ++r)
            for (std::size_t ni = 0; ni < nn; ++ni) {
                unsigned n = spec_.nodes[ni] - 1;
                for (std::size_t l = 0; l < qlen; ++l) {
                    Felem v = e_.at(std::size_t(r) * qlen + l, n);
                    for (unsigned t = 0; t < p.collusion; ++t)
                        v = f.add(v, f.mul(ev.u[r].at(l, t), gq_[ni][t]));
                    qbuf_[(std::size_t(r) * nn + ni) * qlen + l] = v;
                }
            }
        if (spec_.queries) out.insert(out.end(), qbuf_.begin(), qbuf_.end());
        if (spec_.answers)
            for (std::size_t ni = 0; ni < nn; ++ni)
                for (unsigned r = 0; r < p.storage_dim; ++r) {
                    const Felem* qv = &qbuf_[(std::size_t(r) * nn + ni) * qlen];
                    const Felem* dv = &dbuf_[ni * qlen];
                    Felem acc = 0;
                    for (std::size_t l = 0; l < qlen; ++l) acc = f.add(acc, f.mul(qv[l], dv[l]));
                    Felem mask = 0;
                    for (unsigned j = 0; j < spec_.terms; ++j)
                        mask = f.add(mask, f.mul(ev.s.at(r, j), lam_[ni][j]));
                    out.push_back(f.add(acc, f.mul(coeff_[ni], mask)));
                }
        if (spec_.shards) out.insert(out.end(), dbuf_.begin(), dbuf_.end());
        if (spec_.common_rand)
            for (std::size_t r = 0; r < ev.s.rows(); ++r)
                for (std::size_t j = 0; j < ev.s.cols(); ++j) out.push_back(ev.s.at(r, j));
    }

private:
    const SchemeParams* p_;
    ViewSpec spec_;
    FieldMatrix e_;
    std::vector<std::vector<Felem>> gs_, gq_, lam_;
    std::vector<Felem> coeff_;
    std::vector<Felem> qbuf_, dbuf_;
};

// A contiguous digit range of a view tuple.
struct Chunk {
    std::size_t offset, len;
};

// Outcomes packed into one u64 as little-endian base-q digits; usable when
// q^view_len fits comfortably.
struct PackedCodec {
    using Key = std::uint64_t;
    std::uint64_t q;
    std::vector<std::uint64_t> pow;  // pow[i] = q^i

    static std::optional<PackedCodec> make(std::uint64_t q, std::size_t view_len) {
        u128 v = 1;
        std::vector<std::uint64_t> pow{1};
        for (std::size_t i = 0; i < view_len; ++i) {
            v *= q;
            if (v > (u128(1) << 62)) return std::nullopt;
            pow.push_back(std::uint64_t(v));
        }
        return PackedCodec{q, std::move(pow)};
    }

    Key encode(const Outcome& o) const {
        std::uint64_t v = 0;
        for (std::size_t i = o.size(); i-- > 0;) v = v * q + o[i];
        return v;
    }

    Outcome decode(Key k, std::size_t len) const {
        Outcome o(len);
        for (std::size_t i = 0; i < len; ++i) {
            o[i] = Felem(k % q);
            k /= q;
        }
        return o;
    }

    Key project(Key k, const std::vector<Chunk>& chunks) const {
        std::uint64_t v = 0, shift = 1;
        for (const Chunk& c : chunks) {
            v += ((k / pow[c.offset]) % pow[c.len]) * shift;
            shift *= pow[c.len];
        }
        return v;
    }

    std::size_t chunks_len(const std::vector<Chunk>& chunks) const {
        std::size_t n = 0;
        for (const Chunk& c : chunks) n += c.len;
        return n;
    }
};

struct RawCodec {
    using Key = Outcome;

    Key encode(const Outcome& o) const { return o; }
    Outcome decode(const Key& k, std::size_t) const { return k; }

    Key project(const Key& k, const std::vector<Chunk>& chunks) const {
        Outcome out;
        for (const Chunk& c : chunks)
            out.insert(out.end(), k.begin() + long(c.offset), k.begin() + long(c.offset + c.len));
        return out;
    }
};

// Sorted multiset of view outcomes with multiplicities; total is the event
// count, so probability(key) = count / total exactly.
template <class Key>
struct Runs {
    std::vector<std::pair<Key, std::uint64_t>> items;
    std::uint64_t total = 0;
};

template <class Key>
Runs<Key> to_runs(std::vector<Key>&& keys) {
    std::sort(keys.begin(), keys.end());
    Runs<Key> r;
    r.total = keys.size();
    for (std::size_t i = 0; i < keys.size();) {
        std::size_t j = i + 1;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        r.items.emplace_back(std::move(keys[i]), j - i);
        i = j;
    }
    return r;
}

template <class Codec>
Runs<typename Codec::Key> enumerate_runs(const SchemeParams& p, const FreeSpace& fs,
                                         ViewBuilder& vb, const Codec& codec,
                                         std::uint64_t expected_events) {
    std::vector<typename Codec::Key> keys;
    keys.reserve(expected_events);
    Outcome out;
    out.reserve(vb.view_len());
    for_each_event(p, fs, [&](const EventVars& ev) {
        vb(ev, out);
        keys.push_back(codec.encode(out));
    });
    return to_runs(std::move(keys));
}

template <class Key>
bool runs_equal(const Runs<Key>& a, const Runs<Key>& b) {
    return a.total == b.total && a.items == b.items;
}

// First outcome whose multiplicity differs between two sorted tables.
template <class Codec>
std::pair<Outcome, Outcome> first_divergence(const Runs<typename Codec::Key>& a,
                                             const Runs<typename Codec::Key>& b,
                                             const Codec& codec, std::size_t len) {
    std::size_t i = 0, j = 0;
    while (i < a.items.size() && j < b.items.size()) {
        if (a.items[i] == b.items[j]) {
            ++i;
            ++j;
            continue;
        }
        return {codec.decode(a.items[i].first, len), codec.decode(b.items[j].first, len)};
    }
    if (i < a.items.size())
        return {codec.decode(a.items[i].first, len), codec.decode(a.items[i].first, len)};
    return {codec.decode(b.items[j].first, len), codec.decode(b.items[j].first, len)};
}

// I(view; index) in bits for an index uniform over the two tables; this is
// reporting sugar, never part of a verdict.
template <class Key>
double mi_between(const Runs<Key>& a, const Runs<Key>& b) {
    double mi = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.items.size() || j < b.items.size()) {
        int cmp;
        if (i >= a.items.size()) cmp = 1;
        else if (j >= b.items.size()) cmp = -1;
        else if (a.items[i].first < b.items[j].first) cmp = -1;
        else if (b.items[j].first < a.items[i].first) cmp = 1;
        else cmp = 0;
        double pa = 0.0, pb = 0.0;
        if (cmp <= 0) pa = double(a.items[i++].second) / double(a.total);
        if (cmp >= 0) pb = double(b.items[j++].second) / double(b.total);
        double avg = (pa + pb) / 2.0;
        if (pa > 0) mi += 0.5 * pa * std::log2(pa / avg);
        if (pb > 0) mi += 0.5 * pb * std::log2(pb / avg);
    }
    return mi < 0 ? 0.0 : mi;
}

// Exact independence of the first x_len digits against the rest. Checking
// the product rule on the joint support alone is complete: if it holds
// everywhere on the support, summing it forces every off-support (x, y)
// pair to have a zero marginal product as well.
template <class Codec>
IndependenceResult independence_from_runs(const Runs<typename Codec::Key>& joint,
                                          const Codec& codec, std::size_t x_len,
                                          std::size_t full_len) {
    using Key = typename Codec::Key;
    const std::vector<Chunk> xr{{0, x_len}}, yr{{x_len, full_len - x_len}};
    std::map<Key, std::uint64_t> cx, cy;
    for (const auto& [k, c] : joint.items) {
        cx[codec.project(k, xr)] += c;
        cy[codec.project(k, yr)] += c;
    }
    IndependenceResult res;
    double mi = 0.0;
    for (const auto& [k, c] : joint.items) {
        Key kx = codec.project(k, xr), ky = codec.project(k, yr);
        std::uint64_t mx = cx[kx], my = cy[ky];
        if (u128(c) * joint.total != u128(mx) * my) {
            if (res.independent) {
                res.independent = false;
                res.witness = {codec.decode(kx, x_len), codec.decode(ky, full_len - x_len)};
            }
        }
        mi += (double(c) / double(joint.total)) *
              std::log2(double(c) * double(joint.total) / (double(mx) * double(my)));
    }
    res.mi_bits = res.independent ? 0.0 : (mi < 0 ? 0.0 : mi);
    return res;
}

// Shannon entropy of a run table in natural-log form with exact rational
// coefficients: H = ln(total) - (1/total) sum_o count_o ln(count_o).
template <class Key>
LogReal entropy_of(const Runs<Key>& r) {
    LogReal h = LogReal::log_of(r.total, Rational(1));
    for (const auto& [k, c] : r.items)
        h -= LogReal::log_of(c, Rational(std::int64_t(c), std::int64_t(r.total)));
    return h;
}

template <class Codec>
Runs<typename Codec::Key> project_runs(const Runs<typename Codec::Key>& full, const Codec& codec,
                                       const std::vector<Chunk>& chunks) {
    std::map<typename Codec::Key, std::uint64_t> m;
    for (const auto& [k, c] : full.items) m[codec.project(k, chunks)] += c;
    Runs<typename Codec::Key> out;
    out.total = full.total;
    out.items.assign(m.begin(), m.end());
    return out;
}

inline std::string node_list(const std::vector<unsigned>& nodes) {
    std::string s = "{";
    for (std::size_t i = 0; i < nodes.size(); ++i)
        s += (i ? "," : "") + std::to_string(nodes[i]);
    return s + "}";
}

template <class Codec>
PrivacyReport user_privacy_exhaustive(const SchemeParams& p, Mutant mutant, const FreeSpace& fs,
                                      bool full_view, std::uint64_t per_table, const Codec& codec) {
    PrivacyReport rep;
    unsigned subsets = 0;
    std::vector<std::size_t> idx(p.collusion);
    std::iota(idx.begin(), idx.end(), 0);
    do {
        ++subsets;
        std::vector<unsigned> nodes;
        for (std::size_t i : idx) nodes.push_back(unsigned(i) + 1);
        std::vector<Runs<typename Codec::Key>> tables;
        std::size_t len = 0;
        for (unsigned k = 1; k <= p.files; ++k) {
            ViewSpec spec{nodes, true, full_view, full_view, full_view,
                          false, false, k, mask_terms(p, mutant)};
            ViewBuilder vb(p, spec);
            len = vb.view_len();
            tables.push_back(enumerate_runs(p, fs, vb, codec, per_table));
            rep.enumeration_size += tables.back().total;
        }
        for (unsigned k = 0; k < p.files; ++k)
            for (unsigned k2 = k + 1; k2 < p.files; ++k2)
                if (!runs_equal(tables[k], tables[k2])) {
                    rep.pass = false;
                    rep.witness = first_divergence(tables[k], tables[k2], codec, len);
                    rep.mutual_information_bits = mi_between(tables[k], tables[k2]);
                    std::ostringstream os;
                    os << "colluding set " << node_list(nodes) << " can distinguish index "
                       << k + 1 << " from " << k2 + 1 << " ("
                       << (full_view ? "full-view" : "query-marginal") << " tables differ)";
                    rep.detail = os.str();
                    return rep;
                }
    } while (next_subset(idx, p.servers));
    std::ostringstream os;
    os << "exhaustive " << (full_view ? "full-view" : "query-marginal") << " audit: " << subsets
       << " colluding sets x " << p.files << " indexes x " << per_table << " events, all view "
       << "distributions identical";
    rep.detail = os.str();
    return rep;
}

template <class Codec>
PrivacyReport database_privacy_exhaustive(const SchemeParams& p, Mutant mutant,
                                          const FreeSpace& fs, std::uint64_t per_table,
                                          const Codec& codec) {
    PrivacyReport rep;
    std::vector<unsigned> all(p.servers);
    std::iota(all.begin(), all.end(), 1);
    const std::size_t x_len = std::size_t(p.files - 1) * p.rows_per_file * p.storage_dim;
    for (unsigned k = 1; k <= p.files; ++k) {
        ViewSpec spec{all, true, true, false, false, true, false, k, mask_terms(p, mutant)};
        ViewBuilder vb(p, spec);
        Runs<typename Codec::Key> joint = enumerate_runs(p, fs, vb, codec, per_table);
        rep.enumeration_size += joint.total;
        IndependenceResult res = independence_from_runs(joint, codec, x_len, vb.view_len());
        if (!res.independent) {
            rep.pass = false;
            rep.witness = res.witness;
            rep.mutual_information_bits = res.mi_bits;
            std::ostringstream os;
            os << "retrieving index " << k << " leaks other files: I(unrequested content; view) = "
               << res.mi_bits << " bits";
            rep.detail = os.str();
            return rep;
        }
    }
    std::ostringstream os;
    os << "exhaustive audit: for each of " << p.files << " desired indexes ("
       << per_table << " events each), the unrequested file content is exactly independent of "
       << "the user's view";
    rep.detail = os.str();
    return rep;
}

template <class Codec>
PrivacyReport entropy_symmetry_impl(const SchemeParams& p, unsigned set_size,
                                    const FreeSpace& fs, std::uint64_t per_table,
                                    const Codec& codec) {
    PrivacyReport rep;
    const std::size_t file_syms = std::size_t(p.rows_per_file) * p.storage_dim;
    const std::size_t w_all = std::size_t(p.query_len()) * p.storage_dim;
    const std::size_t q_syms = std::size_t(p.storage_dim) * set_size * p.query_len();
    const std::size_t a_syms = std::size_t(set_size) * p.storage_dim;
    const std::vector<Chunk> q_chunk{{w_all, q_syms}};
    const std::vector<Chunk> qa_chunk{{w_all, q_syms + a_syms}};

    std::vector<std::size_t> idx(set_size);
    std::iota(idx.begin(), idx.end(), 0);
    std::ostringstream sample;
    do {
        std::vector<unsigned> nodes;
        for (std::size_t i : idx) nodes.push_back(unsigned(i) + 1);
        std::vector<LogReal> h_aq(p.files);
        std::vector<std::vector<LogReal>> h_awq(p.files, std::vector<LogReal>(p.files));
        for (unsigned k = 1; k <= p.files; ++k) {
            ViewSpec spec{nodes, true, true, false, false, false, true, k, p.mask_len()};
            ViewBuilder vb(p, spec);
            Runs<typename Codec::Key> full = enumerate_runs(p, fs, vb, codec, per_table);
            rep.enumeration_size += full.total;
            h_aq[k - 1] = entropy_of(project_runs(full, codec, qa_chunk));
            h_aq[k - 1] -= entropy_of(project_runs(full, codec, q_chunk));
            for (unsigned c = 1; c <= p.files; ++c) {
                Chunk wc{std::size_t(c - 1) * file_syms, file_syms};
                LogReal h = entropy_of(project_runs(full, codec, {wc, qa_chunk[0]}));
                h -= entropy_of(project_runs(full, codec, {wc, q_chunk[0]}));
                h_awq[k - 1][c - 1] = h;
            }
        }
        for (unsigned k = 2; k <= p.files; ++k) {
            if (h_aq[k - 1] != h_aq[0]) {
                rep.pass = false;
                std::ostringstream os;
                os << "H(answers | queries) over nodes " << node_list(nodes)
                   << " differs between desired indexes 1 and " << k << ": "
                   << h_aq[0].in_base(double(p.field.modulus())) << " vs "
                   << h_aq[k - 1].in_base(double(p.field.modulus())) << " (log-q units)";
                rep.detail = os.str();
                return rep;
            }
            for (unsigned c = 1; c <= p.files; ++c)
                if (h_awq[k - 1][c - 1] != h_awq[0][c - 1]) {
                    rep.pass = false;
                    std::ostringstream os;
                    os << "H(answers | file " << c << ", queries) over nodes " << node_list(nodes)
                       << " differs between desired indexes 1 and " << k;
                    rep.detail = os.str();
                    return rep;
                }
        }
        if (sample.str().empty())
            sample << "H(answers | queries) = "
                   << h_aq[0].in_base(double(p.field.modulus())) << " log-q units on nodes "
                   << node_list(nodes);
    } while (next_subset(idx, p.servers));
    std::ostringstream os;
    os << "answer entropies are symmetric across all desired indexes for every node set of size "
       << set_size << "; " << sample.str();
    rep.detail = os.str();
    return rep;
}

}  // namespace detail

// Exact joint distribution of what a server subset observes when file k is
// retrieved: queries alone, or the full view (queries, answers, shards,
// common randomness).
inline DistTable enumerate_views(const SchemeParams& p, unsigned k, std::vector<unsigned> subset,
                                 bool include_answers,
                                 std::uint64_t ceiling = default_enum_ceiling()) {
    if (k < 1 || k > p.files) throw InvalidParams("desired file index out of range");
    std::sort(subset.begin(), subset.end());
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (subset[i] < 1 || subset[i] > p.servers)
            throw InvalidParams("subset entries must be server ids in [1, N]");
        if (i > 0 && subset[i] == subset[i - 1])
            throw InvalidParams("subset entries must be distinct");
    }
    if (subset.empty()) {
        DistTable dt;
        dt.outcomes.emplace(Outcome{}, Rational(1));
        return dt;
    }
    detail::FreeSpace fs = include_answers ? detail::FreeSpace{true, true, p.mask_len()}
                                           : detail::FreeSpace{false, true, 0};
    std::uint64_t events = 0;
    if (!detail::events_within(p.field.modulus(), fs.symbols(p), ceiling, events))
        throw EnumerationTooLarge(
            detail::space_too_large("view space", p.field.modulus(), fs.symbols(p), ceiling));
    detail::ViewSpec spec{subset, true, include_answers, include_answers, include_answers,
                          false, false, k, p.mask_len()};
    detail::ViewBuilder vb(p, spec);
    DistTable dt;
    auto fill = [&](const auto& codec) {
        auto runs = detail::enumerate_runs(p, fs, vb, codec, events);
        for (const auto& [key, c] : runs.items)
            dt.outcomes.emplace(codec.decode(key, vb.view_len()),
                                Rational(std::int64_t(c), std::int64_t(runs.total)));
    };
    if (auto pc = detail::PackedCodec::make(p.field.modulus(), vb.view_len()))
        fill(*pc);
    else
        fill(detail::RawCodec{});
    return dt;
}

// Exact test of p(x, y) = p(x) p(y) over a joint table whose outcomes are
// the concatenation of an x part (first x_len symbols) and a y part.
inline IndependenceResult independence_verdict(const DistTable& joint, std::size_t x_len) {
    std::map<Outcome, Rational> px, py;
    for (const auto& [o, pr] : joint.outcomes) {
        px[Outcome(o.begin(), o.begin() + long(x_len))] += pr;
        py[Outcome(o.begin() + long(x_len), o.end())] += pr;
    }
    IndependenceResult res;
    double mi = 0.0;
    for (const auto& [o, pr] : joint.outcomes) {
        Outcome x(o.begin(), o.begin() + long(x_len));
        Outcome y(o.begin() + long(x_len), o.end());
        Rational prod = px[x] * py[y];
        if (pr != prod && res.independent) {
            res.independent = false;
            res.witness = {x, y};
        }
        mi += pr.to_double() * std::log2(pr.to_double() / prod.to_double());
    }
    res.mi_bits = res.independent ? 0.0 : (mi < 0 ? 0.0 : mi);
    return res;
}

// No colluding set of T servers learns anything about the desired index.
// Exhaustive mode compares the exact view distribution under every pair of
// indexes. When the joint (W, U, S) space exceeds the ceiling it compares
// query marginals instead, which is exactly equivalent: answers are a fixed
// index-independent function of (queries, shards, S), and queries, shards,
// and S are mutually independent with only the query factor depending on
// the index. Structural mode proves uniformity of the queries from the MDS
// property of the query code.
inline PrivacyReport verify_user_privacy(const SchemeParams& p, AuditMode mode,
                                         Mutant mutant = Mutant::none,
                                         std::uint64_t ceiling = default_enum_ceiling()) {
    if (mode == AuditMode::structural) {
        PrivacyReport rep;
        rep.pass = check_mds(p.query_code);
        rep.detail = rep.pass
                         ? "every TxT submatrix of the query code generator is invertible, so the "
                           "round queries seen by any T servers are uniform whatever the index"
                         : "query code generator has a singular TxT submatrix";
        return rep;
    }
    const std::uint64_t q = p.field.modulus();
    const bool vary_u = mutant != Mutant::no_randomization;
    detail::FreeSpace full{true, vary_u, p.mask_len()};
    detail::FreeSpace marginal{false, vary_u, 0};
    std::uint64_t events = 0;
    if (detail::events_within(q, full.symbols(p), ceiling, events)) {
        std::size_t len = std::size_t(p.storage_dim) * p.collusion * p.query_len() +
                          std::size_t(p.collusion) * p.storage_dim +
                          std::size_t(p.collusion) * p.query_len() +
                          std::size_t(p.storage_dim) * p.mask_len();
        if (auto pc = detail::PackedCodec::make(q, len))
            return detail::user_privacy_exhaustive(p, mutant, full, true, events, *pc);
        return detail::user_privacy_exhaustive(p, mutant, full, true, events, detail::RawCodec{});
    }
    if (detail::events_within(q, marginal.symbols(p), ceiling, events)) {
        std::size_t len = std::size_t(p.storage_dim) * p.collusion * p.query_len();
        if (auto pc = detail::PackedCodec::make(q, len))
            return detail::user_privacy_exhaustive(p, mutant, marginal, false, events, *pc);
        return detail::user_privacy_exhaustive(p, mutant, marginal, false, events,
                                               detail::RawCodec{});
    }
    throw EnumerationTooLarge(
        detail::space_too_large("user-privacy query space", q, marginal.symbols(p), ceiling));
}

// The user learns nothing about files other than the requested one: for each
// desired index, the unrequested rows of W are exactly independent of the
// user's complete view (all queries and all answers).
inline PrivacyReport verify_database_privacy(const SchemeParams& p, Mutant mutant = Mutant::none,
                                             std::uint64_t ceiling = default_enum_ceiling()) {
    if (p.files == 1) {
        PrivacyReport rep;
        rep.detail = "single-file configuration: there is no unrequested content (vacuous pass)";
        return rep;
    }
    const std::uint64_t q = p.field.modulus();
    detail::FreeSpace fs{true, mutant != Mutant::no_randomization, mask_terms(p, mutant)};
    std::uint64_t events = 0;
    if (!detail::events_within(q, fs.symbols(p), ceiling, events))
        throw EnumerationTooLarge(
            detail::space_too_large("database-privacy space", q, fs.symbols(p), ceiling));
    std::size_t len = std::size_t(p.files - 1) * p.rows_per_file * p.storage_dim +
                      std::size_t(p.storage_dim) * p.servers * p.query_len() +
                      std::size_t(p.servers) * p.storage_dim;
    if (auto pc = detail::PackedCodec::make(q, len))
        return detail::database_privacy_exhaustive(p, mutant, fs, events, *pc);
    return detail::database_privacy_exhaustive(p, mutant, fs, events, detail::RawCodec{});
}

// The conditional answer entropies H(answers | queries) and
// H(answers | one file, queries) over every node set of the given size are
// identical whichever index is being retrieved. Entropies are compared as
// exact sums of rational multiples of logarithms of primes.
inline PrivacyReport entropy_symmetry_check(const SchemeParams& p, unsigned set_size = 0,
                                            std::uint64_t ceiling = default_enum_ceiling()) {
    if (set_size == 0) set_size = p.mask_len();
    if (set_size < 1 || set_size > p.servers)
        throw InvalidParams("entropy check needs a node-set size in [1, N]");
    if (p.files == 1) {
        PrivacyReport rep;
        rep.detail = "single file index: symmetry is trivial";
        return rep;
    }
    const std::uint64_t q = p.field.modulus();
    detail::FreeSpace fs{true, true, p.mask_len()};
    std::uint64_t events = 0;
    if (!detail::events_within(q, fs.symbols(p), ceiling, events))
        throw EnumerationTooLarge(
            detail::space_too_large("entropy-symmetry space", q, fs.symbols(p), ceiling));
    std::size_t len = std::size_t(p.query_len()) * p.storage_dim +
                      std::size_t(p.storage_dim) * set_size * p.query_len() +
                      std::size_t(set_size) * p.storage_dim;
    if (auto pc = detail::PackedCodec::make(q, len))
        return detail::entropy_symmetry_impl(p, set_size, fs, events, *pc);
    return detail::entropy_symmetry_impl(p, set_size, fs, events, detail::RawCodec{});
}

}  // namespace tspir
