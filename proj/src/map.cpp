#include "gencollatz/map.hpp"

namespace gencollatz {

MapParams make_params(u64 base, u32 exponent) {
    if (base < 2 || exponent < 1) {
        throw InvalidParams("map params: require b >= 2 and m >= 1 (got b=" +
                            std::to_string(base) + ", m=" + std::to_string(exponent) + ")");
    }
    return MapParams{base, exponent, Nat::pow(base, exponent)};
}

Valuation valuation(const Nat& n, u64 base) {
    if (base < 2) throw InvalidParams("valuation: base must be >= 2");
    if (n.is_zero()) throw ZeroInput("valuation: n = 0");

    if ((base & (base - 1)) == 0) {
        // base = 2^k: read the answer off the trailing zero bits
        const auto k = static_cast<unsigned>(__builtin_ctzll(base));
        if (n.fits_u128()) {
            const u128 x = n.to_u128();
            const u64 v = detail::trailing_zero_bits_u128(x) / k;
            return {v, Nat(x >> (v * k))};
        }
        auto big = n.to_big();
        const u64 v = boost::multiprecision::lsb(big) / k;
        big >>= v * k;
        return {v, Nat(std::move(big))};
    }

    if (n.fits_u128()) {
        u128 x = n.to_u128();
        const u64 v = detail::strip_factor(x, base);
        return {v, Nat(x)};
    }

    auto big = n.to_big();
    u64 v = 0;
    Nat::big_int q, r;
    for (;;) {
        boost::multiprecision::divide_qr(big, Nat::big_int(base), q, r);
        if (!r.is_zero()) break;
        big = q;
        ++v;
    }
    return {v, Nat(std::move(big))};
}

}  // namespace gencollatz
