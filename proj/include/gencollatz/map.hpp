#pragma once

#include <optional>
#include <utility>

#include "gencollatz/errors.hpp"
#include "gencollatz/nat.hpp"

namespace gencollatz {

// One map instance f(n, b, m):
//   n / b                                  if n == 0 (mod b)
//   (b^m + 1) n + b^m - (n mod b^m)        otherwise
struct MapParams {
    u64 base = 2;       // b >= 2
    u32 exponent = 1;   // m >= 1
    Nat modulus;        // b^m, cached exactly
};

// Throws InvalidParams unless b >= 2 and m >= 1.
MapParams make_params(u64 base, u32 exponent);

enum class StepKind { Divide, Expand };

inline StepKind step_kind(const MapParams& params, const Nat& n) {
    if (n.is_zero()) throw ZeroInput("step_kind: n = 0");
    return n.divisible_by(params.base) ? StepKind::Divide : StepKind::Expand;
}

// One elementary application of the map, via the literal expand formula.
inline Nat step(const MapParams& params, const Nat& n) {
    if (n.is_zero()) throw ZeroInput("step: n = 0");
    if (n.divisible_by(params.base)) return n.div_u64(params.base);
    return (params.modulus + Nat(1)) * n + params.modulus - (n % params.modulus);
}

struct Valuation {
    u64 exponent;  // largest v with b^v | n
    Nat reduced;   // n / b^v, not divisible by b
};

// b-adic valuation; batches the repeated applications of the division rule.
Valuation valuation(const Nat& n, u64 base);

// Iteration budget. Bounded iteration is a first-class outcome: divergence of
// the map has never been observed but is not excluded.
struct Budget {
    u64 max_steps = 100'000'000;  // elementary map applications
    unsigned max_bits = 16384;    // ceiling on the bit length of any value
};

inline void validate_budget(const Budget& budget) {
    if (budget.max_steps < 1 || budget.max_bits < 8) {
        throw InvalidParams("budget: require max_steps >= 1 and max_bits >= 8");
    }
}

struct MacroStep {
    Nat next;              // first subsequent value not divisible by b
    u64 elementary_steps;  // 1 + m + v elementary applications covered
};

namespace detail {

struct MacroResult {
    Nat next;
    u64 cost;
    unsigned expand_bits;  // exact bit length of the expanded value, the peak of this step
};

// One expand fused with all immediately following divisions, via the identity
// f(n) = b^m * (n + 1 + floor(n / b^m)) for n not divisible by b.
// Pre: n >= 1 and n not divisible by base (callers enforce).
inline MacroResult macro_step_full(const MapParams& params, const Nat& n) {
    if (n.fits_u64() && params.modulus.fits_u64()) {
        const u64 x = n.to_u64();
        const u64 big_b = params.modulus.to_u64();
        const u64 q = x >= big_b ? x / big_b : u64{0};
        u64 t;
        if (!__builtin_add_overflow(x, q + 1, &t)) {  // q < x, so q + 1 cannot wrap
            const unsigned expand_bits =
                bits_u128(static_cast<u128>(big_b) * static_cast<u128>(t));
            u64 v = 0;
            while (t % params.base == 0) {
                t /= params.base;
                ++v;
            }
            return {Nat(t), 1 + params.exponent + v, expand_bits};
        }
    }
    if (n.fits_u128() && params.modulus.fits_u128()) {
        const u128 x = n.to_u128();
        const u128 big_b = params.modulus.to_u128();
        const u128 q = x >= big_b ? x / big_b : u128{0};
        u128 t;
        if (!__builtin_add_overflow(x, q + 1, &t)) {  // q + 1 <= x + 1 cannot overflow here
            const unsigned expand_bits = product_bits(big_b, t);
            const u64 v = strip_factor(t, params.base);
            return {Nat(t), 1 + params.exponent + v, expand_bits};
        }
    }
    using big_int = Nat::big_int;
    const big_int x = n.to_big();
    const big_int modulus = params.modulus.to_big();
    big_int t = x + 1 + x / modulus;
    const big_int expanded = modulus * t;
    const auto expand_bits = static_cast<unsigned>(boost::multiprecision::msb(expanded)) + 1u;
    u64 v = 0;
    big_int q, r;
    for (;;) {
        boost::multiprecision::divide_qr(t, big_int(params.base), q, r);
        if (!r.is_zero()) break;
        t = q;
        ++v;
    }
    return {Nat(std::move(t)), 1 + params.exponent + v, expand_bits};
}

}  // namespace detail

// Accelerated macro-step; refuses divisible input so the identity-based fast
// path stays auditable against the naive elementary sequence.
inline MacroStep macro_step(const MapParams& params, const Nat& n) {
    if (n.is_zero()) throw ZeroInput("macro_step: n = 0");
    if (n.divisible_by(params.base)) {
        throw DivisibleInput("macro_step: n divisible by base " + std::to_string(params.base));
    }
    auto r = detail::macro_step_full(params, n);
    return {std::move(r.next), r.cost};
}

// Lazy hailstone stream: yields s0, then successive map values. Produces at
// most max_steps successors and stops before yielding a value whose bit
// length exceeds max_bits.
class Trajectory {
public:
    enum class StopReason { None, MaxSteps, MaxBits };

    Trajectory(MapParams params, Nat s0, Budget budget)
        : params_(std::move(params)), cur_(std::move(s0)), budget_(budget) {}

    std::optional<Nat> next() {
        if (stop_ != StopReason::None) return std::nullopt;
        if (first_) {
            first_ = false;
            if (cur_.bit_length() > budget_.max_bits) {
                stop_ = StopReason::MaxBits;
                return std::nullopt;
            }
            return cur_;
        }
        if (applied_ >= budget_.max_steps) {
            stop_ = StopReason::MaxSteps;
            return std::nullopt;
        }
        Nat nxt = step(params_, cur_);
        if (nxt.bit_length() > budget_.max_bits) {
            stop_ = StopReason::MaxBits;
            return std::nullopt;
        }
        ++applied_;
        cur_ = std::move(nxt);
        return cur_;
    }

    StopReason stop_reason() const { return stop_; }

private:
    MapParams params_;
    Nat cur_;
    Budget budget_;
    u64 applied_ = 0;
    bool first_ = true;
    StopReason stop_ = StopReason::None;
};

inline Trajectory trajectory(const MapParams& params, const Nat& s0, const Budget& budget) {
    if (s0.is_zero()) throw ZeroInput("trajectory: s0 = 0");
    validate_budget(budget);
    return Trajectory(params, s0, budget);
}

}  // namespace gencollatz
