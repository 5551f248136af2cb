#include "gencollatz/nat.hpp"

namespace gencollatz {

Nat Nat::from_string(std::string_view dec) {
    if (dec.empty()) throw InvalidParams("empty decimal literal");
    for (char c : dec) {
        if (c < '0' || c > '9') {
            throw InvalidParams("invalid decimal literal: '" + std::string(dec) + "'");
        }
    }
    return Nat(big_int(std::string(dec)));
}

std::string Nat::to_string() const {
    return to_big().str();
}

}  // namespace gencollatz
