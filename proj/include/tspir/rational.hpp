#pragma once

// Exact rational arithmetic plus an exact representation for entropies.
// All privacy verdicts and rate identities are decided here, never in
// floating point.

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>

#include "tspir/errors.hpp"

namespace tspir {

class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
        if (den_ == 0) throw Error("rational with zero denominator");
        normalize();
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    Rational operator+(const Rational& r) const {
        return make(__int128(num_) * r.den_ + __int128(r.num_) * den_, __int128(den_) * r.den_);
    }
    Rational operator-(const Rational& r) const {
        return make(__int128(num_) * r.den_ - __int128(r.num_) * den_, __int128(den_) * r.den_);
    }
    Rational operator*(const Rational& r) const {
        return make(__int128(num_) * r.num_, __int128(den_) * r.den_);
    }
    Rational operator/(const Rational& r) const {
        if (r.num_ == 0) throw Error("rational division by zero");
        return make(__int128(num_) * r.den_, __int128(den_) * r.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }

    Rational& operator+=(const Rational& r) { return *this = *this + r; }
    Rational& operator-=(const Rational& r) { return *this = *this - r; }
    Rational& operator*=(const Rational& r) { return *this = *this * r; }

    bool operator==(const Rational& r) const { return num_ == r.num_ && den_ == r.den_; }
    bool operator!=(const Rational& r) const { return !(*this == r); }
    bool operator<(const Rational& r) const {
        return __int128(num_) * r.den_ < __int128(r.num_) * den_;
    }
    bool operator<=(const Rational& r) const { return *this < r || *this == r; }
    bool operator>(const Rational& r) const { return r < *this; }
    bool operator>=(const Rational& r) const { return r <= *this; }

    double to_double() const { return double(num_) / double(den_); }

    // "3/4", or just "3" when the denominator is 1.
    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    static Rational make(__int128 n, __int128 d) {
        if (d < 0) { n = -n; d = -d; }
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw Error("rational overflow");
        Rational r;
        r.num_ = std::int64_t(n);
        r.den_ = std::int64_t(d);
        return r;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        return a < 0 ? -a : a;
    }

    void normalize() {
        *this = make(num_, den_);
    }

    std::int64_t num_, den_;
};

// A real number of the form sum_p c_p * ln(p) over primes p with rational
// coefficients. By unique factorization such a sum is zero only when every
// coefficient is zero, so equality of entropies is exactly decidable.
class LogReal {
public:
    LogReal() = default;

    // coeff * ln(n) for a positive integer n, expanded over n's prime factors.
    static LogReal log_of(std::uint64_t n, const Rational& coeff) {
        if (n == 0) throw Error("log of zero");
        LogReal out;
        std::uint64_t m = n;
        for (std::uint64_t d = 2; d * d <= m; ++d) {
            while (m % d == 0) {
                out.c_[d] += coeff;
                m /= d;
            }
        }
        if (m > 1) out.c_[m] += coeff;
        out.prune();
        return out;
    }

    LogReal& operator+=(const LogReal& r) {
        for (const auto& [p, c] : r.c_) c_[p] += c;
        prune();
        return *this;
    }
    LogReal& operator-=(const LogReal& r) {
        for (const auto& [p, c] : r.c_) c_[p] -= c;
        prune();
        return *this;
    }

    bool operator==(const LogReal& r) const { return c_ == r.c_; }
    bool operator!=(const LogReal& r) const { return !(*this == r); }

    bool is_zero() const { return c_.empty(); }

    // Value scaled to a chosen log base (display only).
    double in_base(double base) const {
        double acc = 0.0;
        for (const auto& [p, c] : c_) acc += c.to_double() * std::log(double(p));
        return acc / std::log(base);
    }

private:
    void prune() {
        for (auto it = c_.begin(); it != c_.end();)
            it = (it->second == Rational(0)) ? c_.erase(it) : std::next(it);
    }

    std::map<std::uint64_t, Rational> c_;
};

}  // namespace tspir
