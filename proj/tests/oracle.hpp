#pragma once

// Test-only reference implementation: literal formulas evaluated on cpp_int,
// sharing no code with the library's compact fast paths or the macro-step
// identity. Expected values in the test suites are frozen from this oracle.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using big = boost::multiprecision::cpp_int;

inline big pow_big(std::uint64_t base, unsigned exp) {
    big r = 1;
    for (unsigned i = 0; i < exp; ++i) r *= base;
    return r;
}

inline big f(const big& n, std::uint64_t b, unsigned m) {
    if (n % b == 0) return n / b;
    const big modulus = pow_big(b, m);
    return (modulus + 1) * n + modulus - (n % modulus);
}

// The algebraic rewrite of the expand rule; valid for n not divisible by b.
inline big f_identity(const big& n, std::uint64_t b, unsigned m) {
    const big modulus = pow_big(b, m);
    return modulus * (n + 1 + n / modulus);
}

inline std::vector<big> trajectory(big s0, std::uint64_t b, unsigned m, std::size_t count) {
    std::vector<big> out;
    out.reserve(count);
    big n = std::move(s0);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(n);
        n = f(n, b, m);
    }
    return out;
}

inline std::optional<std::uint64_t> stopping_time(big n, std::uint64_t b, unsigned m,
                                                  std::uint64_t cap) {
    std::uint64_t k = 0;
    while (n != 1) {
        if (k >= cap) return std::nullopt;
        n = f(n, b, m);
        ++k;
    }
    return k;
}

// First subsequent value not divisible by b, with the elementary step count.
inline std::pair<big, std::uint64_t> macro(const big& n, std::uint64_t b, unsigned m) {
    big x = f(n, b, m);
    std::uint64_t steps = 1;
    while (x % b == 0) {
        x /= b;
        ++steps;
    }
    return {x, steps};
}

// Cycle eventually entered from s0, in canonical rotation (minimum first).
inline std::vector<big> cycle_from(big s0, std::uint64_t b, unsigned m,
                                   std::size_t cap = 1'000'000) {
    std::map<big, std::size_t> seen;
    std::vector<big> seq;
    big n = std::move(s0);
    for (std::size_t i = 0; i < cap; ++i) {
        auto it = seen.find(n);
        if (it != seen.end()) {
            std::vector<big> cyc(seq.begin() + static_cast<std::ptrdiff_t>(it->second), seq.end());
            auto mn = std::min_element(cyc.begin(), cyc.end());
            std::rotate(cyc.begin(), mn, cyc.end());
            return cyc;
        }
        seen.emplace(n, i);
        seq.push_back(n);
        n = f(n, b, m);
    }
    throw std::runtime_error("oracle::cycle_from hit its cap");
}

// Deterministic generator for property tests (same published constants the
// library uses; validated against reference outputs in the scan suite).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t below(std::uint64_t bound) { return next() % bound; }

    std::uint64_t in(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

    big bits(unsigned n) {  // uniform-ish value with at most n bits, never 0
        big v = 0;
        for (unsigned got = 0; got < n; got += 64) {
            v <<= 64;
            v += next();
        }
        v %= (big(1) << n);
        if (v == 0) v = 1;
        return v;
    }

private:
    std::uint64_t state_;
};

}  // namespace oracle
