#pragma once

// Reference rate formulas and measurement of what a recorded session
// actually achieved. All verdicts are exact rationals; floating point never
// decides anything here.

#include "tspir/rational.hpp"
#include "tspir/scheme.hpp"
#include "tspir/sim.hpp"

namespace tspir {

// Best possible ratio of retrieved to downloaded symbols for a linear
// scheme: 1 - (M+T-1)/N, or 0 when no positive-rate scheme exists.
inline Rational capacity(unsigned n, unsigned m, unsigned t) {
    if (n < 1 || m < 1 || t < 1) throw InvalidParams("N, M, T must be positive");
    if (n < m + t) return Rational(0);
    return Rational(1) - Rational(std::int64_t(m) + t - 1, std::int64_t(n));
}

// Minimum common randomness per file symbol that any capacity-achieving
// scheme must share among the servers: (M+T-1)/(N-M-T+1).
inline Rational secrecy_lower_bound(unsigned n, unsigned m, unsigned t) {
    if (n < 1 || m < 1 || t < 1) throw InvalidParams("N, M, T must be positive");
    if (n < m + t) throw InvalidRegime();
    return Rational(std::int64_t(m) + t - 1, std::int64_t(n) - m - t + 1);
}

// Retrieved file symbols per downloaded answer symbol, counted from the
// recorded frames. A complete session downloads exactly N*M symbols.
inline Rational measure_rate(const Transcript& t) {
    if (t.messages.empty()) throw IncompleteTranscript("no messages recorded");
    if (t.servers == 0 || t.storage_dim == 0) throw IncompleteTranscript("missing session parameters");
    std::uint64_t downloaded = t.downloaded_symbols();
    std::uint64_t expected = std::uint64_t(t.servers) * t.storage_dim;
    if (downloaded != expected)
        throw IncompleteTranscript("expected " + std::to_string(expected) + " answer symbols, saw " +
                                   std::to_string(downloaded));
    std::uint64_t rows = t.servers - t.storage_dim - t.collusion + 1;
    std::uint64_t file_len = std::uint64_t(t.storage_dim) * rows;
    return Rational(std::int64_t(file_len), std::int64_t(downloaded));
}

// Common-randomness symbols per file symbol for the implemented scheme:
// M(M+T-1) mask symbols for an L-symbol file.
inline Rational measure_secrecy_rate(const SchemeParams& p) {
    return Rational(std::int64_t(p.storage_dim) * p.mask_len(), std::int64_t(p.file_len));
}

struct RateReport {
    Rational capacity;
    Rational achieved_rate;
    Rational secrecy_bound;
    Rational achieved_secrecy;

    // Information-theoretic limits cap what any scheme can achieve; a report
    // violating them means the measurement or the construction is broken.
    static RateReport make(const SchemeParams& p, const Transcript& t) {
        RateReport r{tspir::capacity(p.servers, p.storage_dim, p.collusion), measure_rate(t),
                     secrecy_lower_bound(p.servers, p.storage_dim, p.collusion),
                     measure_secrecy_rate(p)};
        if (r.achieved_rate > r.capacity)
            throw Error("measured rate exceeds capacity: " + r.achieved_rate.str() + " > " +
                        r.capacity.str());
        if (r.achieved_secrecy < r.secrecy_bound)
            throw Error("measured secrecy rate below the lower bound: " + r.achieved_secrecy.str() +
                        " < " + r.secrecy_bound.str());
        return r;
    }
};

}  // namespace tspir
