#pragma once

// Multi-party execution of the retrieval protocol: a storage origin, a
// trusted randomness dealer, N server state machines, and the user, talking
// through a byte-exact wire codec over a pluggable in-memory transport.
// Every frame is recorded in a replayable transcript.

#include <chrono>
#include <cstdint>
#include <deque>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tspir/scheme.hpp"

namespace tspir {

enum class WireKind : std::uint8_t {
    store = 1,   // origin -> server: the server's shard column
    rand = 2,    // dealer -> server: the full common-randomness matrix
    query = 3,   // user -> server: one round's query vector
    answer = 4,  // server -> user: one round's answer symbol
};

inline const char* wire_kind_name(WireKind k) {
    switch (k) {
        case WireKind::store: return "STORE";
        case WireKind::rand: return "RAND";
        case WireKind::query: return "QUERY";
        case WireKind::answer: return "ANSWER";
    }
    return "?";
}

struct WireMessage {
    WireKind kind;
    std::uint32_t modulus = 0;
    std::uint16_t node = 0;
    std::uint16_t round = 0;
    std::vector<Felem> payload;

    bool operator==(const WireMessage&) const = default;
};

namespace detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(std::uint8_t(v & 0xff));
    out.push_back(std::uint8_t(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t((v >> (8 * i)) & 0xff));
}

inline std::uint16_t get_u16(const std::vector<std::uint8_t>& b, std::size_t at) {
    return std::uint16_t(b[at] | (std::uint16_t(b[at + 1]) << 8));
}

inline std::uint32_t get_u32(const std::vector<std::uint8_t>& b, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[at + std::size_t(i)];
    return v;
}

}  // namespace detail

// Frame layout, all integers little-endian:
//   u32 length of everything after this field (14 + 4 * count)
//   u8 kind, u8 version (=1), u32 modulus, u16 node, u16 round,
//   u32 count, then count u32 elements, each a canonical residue.
inline constexpr std::uint8_t wire_version = 1;
inline constexpr std::size_t wire_header_len = 14;

inline std::vector<std::uint8_t> encode_message(const WireMessage& m) {
    for (Felem e : m.payload)
        if (e >= m.modulus) throw ElementOutOfRange();
    std::vector<std::uint8_t> out;
    out.reserve(4 + wire_header_len + 4 * m.payload.size());
    detail::put_u32(out, std::uint32_t(wire_header_len + 4 * m.payload.size()));
    out.push_back(std::uint8_t(m.kind));
    out.push_back(wire_version);
    detail::put_u32(out, m.modulus);
    detail::put_u16(out, m.node);
    detail::put_u16(out, m.round);
    detail::put_u32(out, std::uint32_t(m.payload.size()));
    for (Felem e : m.payload) detail::put_u32(out, e);
    return out;
}

inline WireMessage decode_message(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4) throw MalformedFrame("shorter than the length field");
    std::uint32_t len = detail::get_u32(bytes, 0);
    if (bytes.size() != 4 + std::size_t(len)) throw MalformedFrame("length field disagrees with frame size");
    if (len < wire_header_len) throw MalformedFrame("header truncated");
    std::uint8_t tag = bytes[4];
    if (tag < 1 || tag > 4) throw UnknownKind();
    if (bytes[5] != wire_version) throw MalformedFrame("unsupported protocol version");
    WireMessage m;
    m.kind = WireKind(tag);
    m.modulus = detail::get_u32(bytes, 6);
    m.node = detail::get_u16(bytes, 10);
    m.round = detail::get_u16(bytes, 12);
    std::uint32_t count = detail::get_u32(bytes, 14);
    if (len != wire_header_len + 4 * std::uint64_t(count)) throw MalformedFrame("element count disagrees with length");
    m.payload.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint32_t e = detail::get_u32(bytes, 18 + 4 * std::size_t(i));
        if (e >= m.modulus) throw ElementOutOfRange();
        m.payload[i] = e;
    }
    return m;
}

// One storage server. It only ever sees its own shard, the shared common
// randomness, and queries addressed to it; never the desired index, the raw
// database, or another server's traffic.
class ServerNode {
public:
    ServerNode(const SchemeParams& params, unsigned id, Mutant mutant = Mutant::none)
        : p_(params), id_(id), mutant_(mutant), answered_(params.storage_dim, false) {}

    unsigned id() const { return id_; }
    bool provisioned() const { return !shard_.empty() && !masks_.empty(); }
    const std::vector<bool>& answered() const { return answered_; }

    // Handles one inbound frame; returns the reply frame for QUERY, nothing
    // for the provisioning kinds.
    std::optional<std::vector<std::uint8_t>> handle(const std::vector<std::uint8_t>& frame) {
        WireMessage m = decode_message(frame);
        if (m.modulus != p_.field.modulus()) throw MalformedFrame("modulus differs from the configured field");
        if (m.node != id_) throw MalformedFrame("frame routed to the wrong server");
        switch (m.kind) {
            case WireKind::store:
                if (m.payload.size() != p_.query_len()) throw MalformedFrame("shard length");
                shard_ = m.payload;
                return std::nullopt;
            case WireKind::rand: {
                if (m.payload.size() != std::size_t(p_.storage_dim) * p_.mask_len())
                    throw MalformedFrame("common randomness length");
                // Precompute this node's mask per round: phi psi sum_j S_j lambda^(j-1).
                masks_.assign(p_.storage_dim, 0);
                const PrimeField& f = p_.field;
                Felem coeff = f.mul(p_.phi[id_ - 1], p_.psi[id_ - 1]);
                unsigned terms = mask_terms(p_, mutant_);
                for (unsigned r = 0; r < p_.storage_dim; ++r) {
                    Felem lam_pow = 1, acc = 0;
                    for (unsigned j = 0; j < terms; ++j) {
                        acc = f.add(acc, f.mul(m.payload[std::size_t(r) * p_.mask_len() + j], lam_pow));
                        lam_pow = f.mul(lam_pow, p_.points[id_ - 1]);
                    }
                    masks_[r] = f.mul(coeff, acc);
                }
                std::fill(answered_.begin(), answered_.end(), false);
                return std::nullopt;
            }
            case WireKind::query: {
                if (!provisioned()) throw TransportFailure("server queried before provisioning");
                if (m.round < 1 || m.round > p_.storage_dim) throw MalformedFrame("round out of range");
                if (m.payload.size() != p_.query_len()) throw MalformedFrame("query length");
                Felem a = p_.field.add(dot(m.payload, shard_, p_.field), masks_[m.round - 1]);
                answered_[m.round - 1] = true;
                return encode_message(
                    {WireKind::answer, p_.field.modulus(), std::uint16_t(id_), m.round, {a}});
            }
            case WireKind::answer:
                throw MalformedFrame("servers do not accept answer frames");
        }
        throw UnknownKind();
    }

private:
    SchemeParams p_;
    unsigned id_;
    Mutant mutant_;
    std::vector<Felem> shard_;
    std::vector<Felem> masks_;  // one mask symbol per round
    std::vector<bool> answered_;
};

// Synchronous in-memory transport. Queries are non-adaptive, so callers may
// post every frame first and collect replies later.
class LoopbackTransport {
public:
    explicit LoopbackTransport(const SchemeParams& params, Mutant mutant = Mutant::none)
        : replies_(params.servers), down_(params.servers, false) {
        servers_.reserve(params.servers);
        for (unsigned n = 1; n <= params.servers; ++n) servers_.emplace_back(params, n, mutant);
    }

    unsigned size() const { return unsigned(servers_.size()); }
    ServerNode& server(unsigned node) { return servers_.at(node - 1); }

    void set_unreachable(unsigned node, bool down = true) { down_.at(node - 1) = down; }

    void post(unsigned node, const std::vector<std::uint8_t>& frame) {
        check_up(node);
        if (auto reply = servers_.at(node - 1).handle(frame)) replies_[node - 1].push_back(std::move(*reply));
    }

    std::vector<std::uint8_t> collect(unsigned node) {
        check_up(node);
        auto& q = replies_.at(node - 1);
        if (q.empty()) throw TransportFailure("no pending reply from server " + std::to_string(node));
        std::vector<std::uint8_t> out = std::move(q.front());
        q.pop_front();
        return out;
    }

    std::vector<std::uint8_t> exchange(unsigned node, const std::vector<std::uint8_t>& frame) {
        post(node, frame);
        return collect(node);
    }

private:
    void check_up(unsigned node) const {
        if (node < 1 || node > servers_.size()) throw TransportFailure("no such server " + std::to_string(node));
        if (down_[node - 1]) throw TransportFailure("server " + std::to_string(node) + " unreachable");
    }

    std::vector<ServerNode> servers_;
    std::vector<std::deque<std::vector<std::uint8_t>>> replies_;
    std::vector<bool> down_;
};

struct TranscriptEntry {
    std::string from;
    std::string to;
    unsigned node = 0;  // server involved
    WireKind kind;
    std::vector<std::uint8_t> frame;
};

struct Transcript {
    unsigned servers = 0, storage_dim = 0, collusion = 0, files = 0;
    std::uint32_t modulus = 0;
    unsigned want = 0;
    std::uint64_t seed = 0;
    std::vector<TranscriptEntry> messages;
    std::vector<Felem> decoded_file;  // row-major rows_per_file x M
    std::uint64_t elapsed_ns = 0;     // timing only; excluded from format()

    std::uint64_t downloaded_symbols() const {
        std::uint64_t total = 0;
        for (const auto& e : messages)
            if (e.kind == WireKind::answer && e.to == "user") total += decode_message(e.frame).payload.size();
        return total;
    }

    // Header line with the session parameters, then one line per message:
    // "<from>-><to> <node> <KIND> <hex frame>".
    std::string format() const {
        std::ostringstream os;
        os << "session n=" << servers << " m=" << storage_dim << " t=" << collusion
           << " k-files=" << files << " q=" << modulus << " want=" << want << " seed=" << seed
           << "\n";
        static const char* hexdig = "0123456789abcdef";
        for (const auto& e : messages) {
            os << e.from << "->" << e.to << " " << e.node << " " << wire_kind_name(e.kind) << " ";
            for (std::uint8_t b : e.frame) os << hexdig[b >> 4] << hexdig[b & 0xf];
            os << "\n";
        }
        return os.str();
    }
};

inline void save_transcript(const Transcript& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open transcript file: " + path);
    out << t.format();
}

inline CommonRandomness dealer_draw(const SchemeParams& p, SplitMix64& rng) {
    return CommonRandomness::draw(p, rng);
}

// Every server receives the identical full S; the user never does.
inline std::vector<WireMessage> dealer_messages(const SchemeParams& p, const CommonRandomness& cr) {
    std::vector<WireMessage> out;
    out.reserve(p.servers);
    for (unsigned n = 1; n <= p.servers; ++n)
        out.push_back({WireKind::rand, p.field.modulus(), std::uint16_t(n), 0, cr.s.entries()});
    return out;
}

namespace detail {

// Stream labels for forking the session seed.
inline constexpr std::uint64_t dealer_stream = 1;
inline constexpr std::uint64_t user_stream = 2;
inline constexpr std::uint64_t block_stream = 3;

inline Transcript transcript_shell(const SchemeParams& p, unsigned k, std::uint64_t seed) {
    Transcript t;
    t.servers = p.servers;
    t.storage_dim = p.storage_dim;
    t.collusion = p.collusion;
    t.files = p.files;
    t.modulus = p.field.modulus();
    t.want = k;
    t.seed = seed;
    return t;
}

inline void record(Transcript& t, std::string from, std::string to, unsigned node, WireKind kind,
                   std::vector<std::uint8_t> frame) {
    t.messages.push_back({std::move(from), std::move(to), node, kind, std::move(frame)});
}

}  // namespace detail

// Sends each server its shard column. Shards come from the storage origin,
// which is neither the user nor the dealer.
inline void load_storage(const SchemeParams& p, const Database& db, LoopbackTransport& tp,
                         Transcript* record = nullptr) {
    StorageMatrix sm = encode_storage(db, p);
    for (unsigned n = 1; n <= p.servers; ++n) {
        auto frame = encode_message({WireKind::store, p.field.modulus(), std::uint16_t(n), 0, sm.shard(n)});
        if (record)
            detail::record(*record, "origin", "server" + std::to_string(n), n, WireKind::store, frame);
        tp.post(n, frame);
    }
}

// One retrieval session against already-provisioned storage: the dealer
// distributes fresh S, the user posts all M rounds of queries (they are
// non-adaptive), collects the N*M answers, and decodes.
inline Transcript run_session(const SchemeParams& p, unsigned k, std::uint64_t seed,
                              LoopbackTransport& tp, Transcript* shell = nullptr) {
    auto t0 = std::chrono::steady_clock::now();
    Transcript local = detail::transcript_shell(p, k, seed);
    Transcript& t = shell ? *shell : local;

    SplitMix64 root(seed);
    SplitMix64 dealer_rng = root.fork(detail::dealer_stream);
    SplitMix64 user_rng = root.fork(detail::user_stream);

    CommonRandomness cr = dealer_draw(p, dealer_rng);
    for (const WireMessage& m : dealer_messages(p, cr)) {
        auto frame = encode_message(m);
        detail::record(t, "dealer", "server" + std::to_string(m.node), m.node, WireKind::rand, frame);
        tp.post(m.node, frame);
    }

    QueryPlan plan = build_queries_with(p, k, draw_user_randomness(p, user_rng));
    for (unsigned r = 1; r <= p.storage_dim; ++r)
        for (unsigned n = 1; n <= p.servers; ++n) {
            auto frame = encode_message({WireKind::query, p.field.modulus(), std::uint16_t(n),
                                         std::uint16_t(r), plan.query_vec(p, n, r)});
            detail::record(t, "user", "server" + std::to_string(n), n, WireKind::query, frame);
            tp.post(n, frame);
        }

    FieldMatrix answers(p.servers, p.storage_dim, p.field);
    for (unsigned r = 1; r <= p.storage_dim; ++r)
        for (unsigned n = 1; n <= p.servers; ++n) {
            auto frame = tp.collect(n);
            WireMessage m = decode_message(frame);
            if (m.kind != WireKind::answer || m.round != r || m.payload.size() != 1)
                throw MalformedFrame("unexpected reply while awaiting an answer");
            detail::record(t, "server" + std::to_string(n), "user", n, WireKind::answer, frame);
            answers.at(n - 1, r - 1) = m.payload[0];
        }

    DecodeResult res = [&] {
        try {
            return decode(answers, plan, p);
        } catch (const SingularMatrix& e) {
            throw DecodeFailure(e.what());
        }
    }();
    t.decoded_file = res.file.entries();
    t.elapsed_ns = std::uint64_t(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0)
            .count());
    return shell ? std::move(*shell) : std::move(local);
}

// Full protocol from a bare database: provision storage, then run a session.
inline Transcript run_full_session(const SchemeParams& p, const Database& db, unsigned k,
                                   std::uint64_t seed, Mutant mutant = Mutant::none) {
    LoopbackTransport tp(p, mutant);
    Transcript t = detail::transcript_shell(p, k, seed);
    load_storage(p, db, tp, &t);
    return run_session(p, k, seed, tp, &t);
}

// Files longer than L symbols are retrieved block by block; each block is an
// independent session with fresh common randomness.
inline std::vector<Transcript> run_blocks(const SchemeParams& p, const std::vector<Database>& blocks,
                                          unsigned k, std::uint64_t seed) {
    SplitMix64 root(seed);
    std::vector<Transcript> out;
    out.reserve(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        SplitMix64 child = root.fork(detail::block_stream + b);
        out.push_back(run_full_session(p, blocks[b], k, child.next()));
    }
    return out;
}

}  // namespace tspir
