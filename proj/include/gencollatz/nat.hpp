#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cassert>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>

#include "gencollatz/errors.hpp"

namespace gencollatz {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline constexpr u64 kU64Max = std::numeric_limits<std::uint64_t>::max();
inline constexpr u128 kU128Max = ~u128{0};

namespace detail {

inline unsigned bits_u64(u64 x) {
    return x == 0 ? 0u : 64u - static_cast<unsigned>(__builtin_clzll(x));
}

inline unsigned bits_u128(u128 x) {
    const u64 hi = static_cast<u64>(x >> 64);
    return hi != 0 ? 64u + bits_u64(hi) : bits_u64(static_cast<u64>(x));
}

inline unsigned trailing_zero_bits_u128(u128 x) {
    assert(x != 0);
    const u64 lo = static_cast<u64>(x);
    if (lo != 0) return static_cast<unsigned>(__builtin_ctzll(lo));
    return 64u + static_cast<unsigned>(__builtin_ctzll(static_cast<u64>(x >> 64)));
}

// Exact bit length of a*b even when the product exceeds 128 bits.
inline unsigned product_bits(u128 a, u128 b) {
    const u64 a0 = static_cast<u64>(a), a1 = static_cast<u64>(a >> 64);
    const u64 b0 = static_cast<u64>(b), b1 = static_cast<u64>(b >> 64);
    const u128 p00 = static_cast<u128>(a0) * b0;
    const u128 p01 = static_cast<u128>(a0) * b1;
    const u128 p10 = static_cast<u128>(a1) * b0;
    const u128 p11 = static_cast<u128>(a1) * b1;
    const u128 mid = (p00 >> 64) + static_cast<u64>(p01) + static_cast<u64>(p10);
    const u128 hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    if (hi != 0) return 128u + bits_u128(hi);
    const u128 lo = (mid << 64) | static_cast<u64>(p00);
    return bits_u128(lo);
}

// Divides out every factor b from t, returning the number of divisions.
// Drops to 64-bit hardware division as soon as the value fits.
inline u64 strip_factor(u128& t, u64 b) {
    u64 v = 0;
    while ((t >> 64) != 0) {
        if (t % b != 0) return v;
        t /= b;
        ++v;
    }
    u64 s = static_cast<u64>(t);
    while (s % b == 0) {
        s /= b;
        ++v;
    }
    t = s;
    return v;
}

}  // namespace detail

// Exact non-negative integer of unbounded magnitude. Values up to 2^128-1 are
// held in a machine double-word; arithmetic promotes exactly to an unbounded
// representation on overflow and demotes back when the result fits, so a value
// representable in the compact form is always stored in the compact form.
class Nat {
public:
    using big_int = boost::multiprecision::cpp_int;

    Nat() : v_(u128{0}) {}

    template <typename T,
              std::enable_if_t<std::is_integral_v<T> || std::is_same_v<T, u128> ||
                                   std::is_same_v<T, __int128>,
                               int> = 0>
    Nat(T value) {  // NOLINT(google-explicit-constructor)
        if constexpr (std::is_signed_v<T> || std::is_same_v<T, __int128>) {
            assert(value >= 0);
        }
        v_ = static_cast<u128>(value);
    }

    explicit Nat(const big_int& value) : v_(value) {
        assert(value.sign() >= 0);
        normalize();
    }
    explicit Nat(big_int&& value) : v_(std::move(value)) {
        normalize();
    }

    static Nat from_string(std::string_view dec);
    std::string to_string() const;

    bool is_compact() const { return v_.index() == 0; }
    bool is_zero() const { return is_compact() && std::get<0>(v_) == 0; }
    bool is_one() const { return is_compact() && std::get<0>(v_) == 1; }

    bool fits_u64() const { return is_compact() && std::get<0>(v_) <= kU64Max; }
    bool fits_u128() const { return is_compact(); }

    u64 to_u64() const {
        assert(fits_u64());
        return static_cast<u64>(std::get<0>(v_));
    }
    u128 to_u128() const {
        assert(is_compact());
        return std::get<0>(v_);
    }
    big_int to_big() const {
        if (is_compact()) return big_int(std::get<0>(v_));
        return std::get<1>(v_);
    }

    unsigned bit_length() const {
        if (is_compact()) return detail::bits_u128(std::get<0>(v_));
        return static_cast<unsigned>(boost::multiprecision::msb(std::get<1>(v_))) + 1u;
    }

    friend bool operator==(const Nat& a, const Nat& b) {
        if (a.v_.index() != b.v_.index()) return false;
        if (a.is_compact()) return std::get<0>(a.v_) == std::get<0>(b.v_);
        return std::get<1>(a.v_) == std::get<1>(b.v_);
    }

    friend std::strong_ordering operator<=>(const Nat& a, const Nat& b) {
        const int c = cmp(a, b);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend Nat operator+(const Nat& a, const Nat& b) {
        if (a.is_compact() && b.is_compact()) {
            u128 r;
            if (!__builtin_add_overflow(std::get<0>(a.v_), std::get<0>(b.v_), &r)) return Nat(r);
        }
        return Nat(a.to_big() + b.to_big());
    }

    // Requires a >= b.
    friend Nat operator-(const Nat& a, const Nat& b) {
        if (a.is_compact() && b.is_compact()) {
            const u128 x = std::get<0>(a.v_), y = std::get<0>(b.v_);
            if (x < y) throw std::logic_error("Nat: subtraction underflow");
            return Nat(x - y);
        }
        big_int r = a.to_big() - b.to_big();
        if (r.sign() < 0) throw std::logic_error("Nat: subtraction underflow");
        return Nat(std::move(r));
    }

    friend Nat operator*(const Nat& a, const Nat& b) {
        if (a.is_compact() && b.is_compact()) {
            u128 r;
            if (!__builtin_mul_overflow(std::get<0>(a.v_), std::get<0>(b.v_), &r)) return Nat(r);
        }
        return Nat(a.to_big() * b.to_big());
    }

    friend Nat operator/(const Nat& a, const Nat& b) { return divmod(a, b).first; }
    friend Nat operator%(const Nat& a, const Nat& b) { return divmod(a, b).second; }

    static std::pair<Nat, Nat> divmod(const Nat& a, const Nat& b) {
        if (b.is_zero()) throw std::logic_error("Nat: division by zero");
        if (a.is_compact() && b.is_compact()) {
            const u128 x = std::get<0>(a.v_), y = std::get<0>(b.v_);
            return {Nat(x / y), Nat(x % y)};
        }
        if (a.is_compact()) return {Nat(u128{0}), a};  // b is big, so a < b
        big_int q, r;
        boost::multiprecision::divide_qr(std::get<1>(a.v_), b.to_big(), q, r);
        return {Nat(std::move(q)), Nat(std::move(r))};
    }

    Nat& operator+=(const Nat& o) { return *this = *this + o; }
    Nat& operator-=(const Nat& o) { return *this = *this - o; }
    Nat& operator*=(const Nat& o) { return *this = *this * o; }

    u64 mod_u64(u64 d) const {
        assert(d != 0);
        if (is_compact()) return static_cast<u64>(std::get<0>(v_) % d);
        return (std::get<1>(v_) % d).convert_to<u64>();
    }

    bool divisible_by(u64 d) const { return mod_u64(d) == 0; }

    Nat div_u64(u64 d) const {
        assert(d != 0);
        if (is_compact()) return Nat(std::get<0>(v_) / d);
        return Nat(big_int(std::get<1>(v_) / d));
    }

    // Exact base^exp.
    static Nat pow(u64 base, u32 exp) {
        u128 acc = 1;
        for (u32 i = 0; i < exp; ++i) {
            if (__builtin_mul_overflow(acc, static_cast<u128>(base), &acc)) {
                return Nat(boost::multiprecision::pow(big_int(base), exp));
            }
        }
        return Nat(acc);
    }

private:
    std::variant<u128, big_int> v_;

    static int cmp(const Nat& a, const Nat& b) {
        // Canonical form: the big representation always holds a value > 2^128-1.
        if (a.is_compact() != b.is_compact()) return a.is_compact() ? -1 : 1;
        if (a.is_compact()) {
            const u128 x = std::get<0>(a.v_), y = std::get<0>(b.v_);
            return x < y ? -1 : (x > y ? 1 : 0);
        }
        const auto& x = std::get<1>(a.v_);
        const auto& y = std::get<1>(b.v_);
        return x < y ? -1 : (x > y ? 1 : 0);
    }

    void normalize() {
        if (is_compact()) return;
        const auto& b = std::get<1>(v_);
        if (b.is_zero()) {
            v_ = u128{0};
            return;
        }
        if (boost::multiprecision::msb(b) < 128) {
            v_ = static_cast<u128>(b);
        }
    }
};

}  // namespace gencollatz
