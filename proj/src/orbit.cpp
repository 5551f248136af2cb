#include "gencollatz/orbit.hpp"

#include <algorithm>
#include <stdexcept>

namespace gencollatz {

CycleRecord canonical_cycle(const MapParams& params, const std::vector<Nat>& values) {
    if (values.empty()) throw EmptyCycle("canonical_cycle: empty element list");

    auto min_it = std::min_element(values.begin(), values.end());
    {
        std::vector<Nat> sorted(values);
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw NotClosed("canonical_cycle: repeated value in cycle listing");
        }
    }

    CycleRecord rec;
    rec.elements.reserve(values.size());
    rec.elements.insert(rec.elements.end(), min_it, values.end());
    rec.elements.insert(rec.elements.end(), values.begin(), min_it);
    rec.length = rec.elements.size();
    rec.min_element = rec.elements.front();
    rec.is_principal = rec.min_element.is_one();

    // Confirmation re-traversal: each element must map to its successor.
    for (u64 i = 0; i < rec.length; ++i) {
        const Nat& from = rec.elements[i];
        const Nat& to = rec.elements[(i + 1) % rec.length];
        if (!(step(params, from) == to)) {
            throw NotClosed("canonical_cycle: step(" + from.to_string() + ") != " +
                            to.to_string());
        }
    }
    return rec;
}

namespace {

// The explicit pattern of the principal cycle: 1, then for each k in [2, b-1]
// the segment k*b^m, k*b^(m-1), ..., k*b followed by k, then the closing
// segment b^(m+1), b^m, ..., b.
std::vector<Nat> principal_cycle_pattern(const MapParams& params) {
    std::vector<Nat> out;
    out.emplace_back(1);
    for (u64 k = 2; k + 1 <= params.base; ++k) {
        for (u32 j = params.exponent; j >= 1; --j) {
            out.push_back(Nat(k) * Nat::pow(params.base, j));
        }
        out.emplace_back(k);
    }
    for (u32 j = params.exponent + 1; j >= 1; --j) {
        out.push_back(Nat::pow(params.base, j));
    }
    return out;
}

}  // namespace

CycleRecord principal_cycle(const MapParams& params) {
    // Simulate from 1 until 1 recurs; the orbit provably closes after
    // (b-1)(m+1)+1 steps.
    const u64 expected_length =
        (params.base - 1) * (static_cast<u64>(params.exponent) + 1) + 1;
    std::vector<Nat> elements;
    elements.reserve(expected_length);
    Nat cur(1);
    do {
        elements.push_back(cur);
        cur = step(params, cur);
        if (elements.size() > expected_length) {
            throw std::logic_error("principal_cycle: orbit of 1 did not close");
        }
    } while (!cur.is_one());

    CycleRecord rec = canonical_cycle(params, elements);
    if (rec.length != expected_length) {
        throw std::logic_error("principal_cycle: unexpected length");
    }
    if (params.base > 2 && rec.elements != principal_cycle_pattern(params)) {
        throw std::logic_error("principal_cycle: simulation disagrees with explicit pattern");
    }
    return rec;
}

StartClass classify_start(const MapParams& params, const Nat& s0) {
    if (s0.is_zero()) throw ZeroInput("classify_start: s0 = 0");
    auto [v, reduced] = valuation(s0, params.base);
    const bool trivial = reduced < params.modulus;
    return {trivial, std::move(reduced), v};
}

TrajectoryOutcome detect_outcome(const MapParams& params, const Nat& s0, const Budget& budget) {
    return detail::detect_impl(params, s0, budget, detail::NoProbe{});
}

std::optional<u64> stopping_time(const MapParams& params, const Nat& s0, const Budget& budget) {
    if (s0.is_zero()) throw ZeroInput("stopping_time: s0 = 0");
    auto out = detect_outcome(params, s0, budget);
    switch (out.kind) {
        case OutcomeKind::ReachedOne:
            return out.steps_to_one;
        case OutcomeKind::EnteredCycle:
            throw NonConvergent("stopping_time: start " + s0.to_string() +
                                " enters a cycle with minimum " +
                                out.cycle->min_element.to_string());
        case OutcomeKind::BudgetExceeded:
        default:
            return std::nullopt;
    }
}

PropositionReport proposition_check(const MapParams& params, const Budget& budget) {
    validate_budget(budget);
    constexpr u64 kEnumerationGuard = 100'000'000;
    if (Nat(kEnumerationGuard) < params.modulus) {
        throw TooLarge("proposition_check: b^m exceeds the enumeration guard of 10^8");
    }
    const u64 domain = params.modulus.to_u64();
    const u64 base = params.base;

    // The macro map restricted to [1, b^m) is a self-map (t = s + 1 <= b^m),
    // so one memo table over the whole domain classifies every start.
    constexpr u64 kUnknown = ~u64{0};
    constexpr u64 kOnPath = ~u64{0} - 1;
    constexpr u64 kCyclic = ~u64{0} - 2;
    std::vector<u64> steps(domain, kUnknown);
    std::vector<u32> peaks(domain, 0);
    steps[1] = 0;
    peaks[1] = 1;

    struct Frame {
        u64 value;
        u64 cost;
        u32 local_peak;
    };
    std::vector<Frame> path;

    PropositionReport report;
    report.starts_checked = domain - 1;
    report.pass = true;

    for (u64 s = 1; s < domain; ++s) {
        u64 x = s;
        path.clear();
        bool cyclic = false;
        for (;;) {
            if (steps[x] == kOnPath) {
                cyclic = true;
                break;
            }
            if (steps[x] != kUnknown) break;
            u64 nxt, cost;
            u32 local_peak;
            if (x % base == 0) {
                nxt = x / base;
                cost = 1;
                local_peak = detail::bits_u64(x);
            } else {
                u64 t = x + 1;  // floor(x / b^m) = 0 on this domain
                local_peak = detail::bits_u128(static_cast<u128>(domain) * t);
                u64 v = 0;
                while (t % base == 0) {
                    t /= base;
                    ++v;
                }
                nxt = t;
                cost = 1 + params.exponent + v;
            }
            steps[x] = kOnPath;
            path.push_back({x, cost, local_peak});
            x = nxt;
        }

        if (cyclic || steps[x] == kCyclic) {
            for (const Frame& f : path) steps[f.value] = kCyclic;
            report.pass = false;
            if (!report.first_failure) report.first_failure = Nat(s);
            continue;
        }

        u64 acc = steps[x];
        u32 pk = peaks[x];
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            acc += it->cost;
            pk = std::max(pk, it->local_peak);
            steps[it->value] = acc;
            peaks[it->value] = pk;
        }

        report.max_stopping_time = std::max(report.max_stopping_time, steps[s]);
        report.max_peak_bits = std::max(report.max_peak_bits, peaks[s]);
        if (steps[s] > budget.max_steps || peaks[s] > budget.max_bits) {
            // detect_outcome under this budget would report BudgetExceeded
            report.pass = false;
            if (!report.first_failure) report.first_failure = Nat(s);
        }
    }
    return report;
}

}  // namespace gencollatz
