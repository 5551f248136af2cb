#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gencollatz/map.hpp"

namespace gencollatz {

// A limit cycle in canonical rotation: the strictly smallest element first.
struct CycleRecord {
    std::vector<Nat> elements;
    u64 length = 0;    // == elements.size()
    Nat min_element;   // == elements.front()
    bool is_principal = false;  // true iff min_element == 1

    friend bool operator==(const CycleRecord&, const CycleRecord&) = default;
};

enum class OutcomeKind { ReachedOne, EnteredCycle, BudgetExceeded };

// Terminal classification of a trajectory.
//
// steps_to_one is exact: the elementary index of the first 1 (ReachedOne only).
// steps_consumed: ReachedOne -> steps_to_one; EnteredCycle -> elementary steps
// until the engine confirmed a value lying on the cycle (at least the true
// entry index); BudgetExceeded -> the step budget, or the index of the first
// value whose bit length broke the bits budget.
// peak_bits is the exact bit length of the largest value over the traversed
// portion (for EnteredCycle: the tail plus one full period).
struct TrajectoryOutcome {
    OutcomeKind kind = OutcomeKind::BudgetExceeded;
    std::optional<u64> steps_to_one;
    std::optional<CycleRecord> cycle;
    u64 steps_consumed = 0;
    unsigned peak_bits = 0;
};

// Classification of a start as s0 = s * b^N with s not divisible by b;
// trivial iff s < b^m (such starts provably reach 1).
struct StartClass {
    bool trivial = false;
    Nat residue;  // s
    u64 power = 0;  // N
};

CycleRecord canonical_cycle(const MapParams& params, const std::vector<Nat>& values);
CycleRecord principal_cycle(const MapParams& params);
StartClass classify_start(const MapParams& params, const Nat& s0);

TrajectoryOutcome detect_outcome(const MapParams& params, const Nat& s0, const Budget& budget);

// Exact count of elementary applications until 1 first appears; nullopt when
// the budget is exhausted first. Throws NonConvergent if the start enters a
// non-principal cycle (its stopping time is undefined).
std::optional<u64> stopping_time(const MapParams& params, const Nat& s0, const Budget& budget);

struct PropositionReport {
    u64 starts_checked = 0;
    bool pass = false;
    u64 max_stopping_time = 0;
    unsigned max_peak_bits = 0;
    std::optional<Nat> first_failure;
};

// Sweeps every 1 <= s0 < b^m and reports whether all of them reach 1.
// Throws TooLarge when b^m exceeds the 10^8 enumeration guard.
PropositionReport proposition_check(const MapParams& params, const Budget& budget);

namespace detail {

// A memoized stopping time for a start below the current scan frontier.
// Only reached-one outcomes are memo hits: their composition along a
// trajectory is exact in every field (first-hit index and peak alike), so a
// cached scan produces records byte-identical to an uncached one under any
// budget. Cycle-entering and budget-capped starts walk the full engine.
struct MemoHit {
    u64 steps_to_one;    // stopping time of the memoized start
    unsigned peak_bits;  // peak over its full traversal to 1
};

struct NoProbe {
    std::optional<MemoHit> operator()(const Nat&) const { return std::nullopt; }
};

// Core engine: Brent cycle finding over macro-steps with exact elementary-step
// accounting, a first-hit check for 1 at every macro point, and an optional
// memo probe for range scans.
template <typename Probe>
TrajectoryOutcome detect_impl(const MapParams& params, const Nat& s0, const Budget& budget,
                              Probe&& probe) {
    if (s0.is_zero()) throw ZeroInput("detect_outcome: s0 = 0");
    validate_budget(budget);

    unsigned peak = s0.bit_length();
    if (peak > budget.max_bits) {
        return {OutcomeKind::BudgetExceeded, std::nullopt, std::nullopt, 0, peak};
    }

    auto [v0, start] = valuation(s0, params.base);
    if (v0 > budget.max_steps) {
        return {OutcomeKind::BudgetExceeded, std::nullopt, std::nullopt, budget.max_steps, peak};
    }
    if (start.is_one()) {
        return {OutcomeKind::ReachedOne, v0, std::nullopt, v0, peak};
    }
    if (auto hit = probe(start)) {
        const u64 total = v0 + hit->steps_to_one;
        if (total <= budget.max_steps) {  // beyond the budget the walk below decides
            return {OutcomeKind::ReachedOne, total, std::nullopt, total,
                    std::max(peak, hit->peak_bits)};
        }
    }

    // Brent: the hare walks every macro point in trajectory order; the
    // tortoise pins doubling positions. lam counts macro steps since the pin.
    Nat tortoise = start;
    u64 tortoise_elem = v0;
    Nat hare = start;
    u64 hare_elem = v0;
    u64 power = 1;
    u64 lam = 0;

    for (;;) {
        if (hare_elem >= budget.max_steps) {
            return {OutcomeKind::BudgetExceeded, std::nullopt, std::nullopt, budget.max_steps,
                    peak};
        }
        auto ms = macro_step_full(params, hare);
        if (ms.expand_bits > budget.max_bits) {
            return {OutcomeKind::BudgetExceeded, std::nullopt, std::nullopt, hare_elem + 1,
                    std::max(peak, ms.expand_bits)};
        }
        peak = std::max(peak, ms.expand_bits);
        if (hare_elem + ms.cost > budget.max_steps) {
            return {OutcomeKind::BudgetExceeded, std::nullopt, std::nullopt, budget.max_steps,
                    peak};
        }
        hare = std::move(ms.next);
        hare_elem += ms.cost;
        ++lam;

        if (hare.is_one()) {
            return {OutcomeKind::ReachedOne, hare_elem, std::nullopt, hare_elem, peak};
        }
        if (auto hit = probe(hare)) {
            const u64 total = hare_elem + hit->steps_to_one;
            if (total <= budget.max_steps) {
                return {OutcomeKind::ReachedOne, total, std::nullopt, total,
                        std::max(peak, hit->peak_bits)};
            }
        }
        if (hare == tortoise) break;
        if (lam == power) {
            tortoise = hare;
            tortoise_elem = hare_elem;
            power <<= 1;
            lam = 0;
        }
    }

    // hare == tortoise: the pinned value lies on a cycle of macro period lam.
    // Expand the full elementary cycle: each macro point, its expanded value,
    // and every division intermediate.
    std::vector<Nat> elements;
    Nat cur = hare;
    for (u64 i = 0; i < lam; ++i) {
        elements.push_back(cur);
        Nat e = step(params, cur);
        while (e.divisible_by(params.base)) {
            elements.push_back(e);
            e = e.div_u64(params.base);
        }
        cur = std::move(e);
    }

    CycleRecord record = canonical_cycle(params, elements);
    if (record.is_principal) {
        // cannot happen: the hare tests every macro point for 1 before any
        // repeat can fire, and 1 only occurs at macro points
        throw std::logic_error("detect: principal cycle surfaced as EnteredCycle");
    }
    return {OutcomeKind::EnteredCycle, std::nullopt, std::move(record), tortoise_elem, peak};
}

}  // namespace detail

}  // namespace gencollatz
