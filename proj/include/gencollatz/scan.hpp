#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "gencollatz/orbit.hpp"

namespace gencollatz {

// splitmix64 with the widely published increment/mix constants; one stream per
// seed, one draw per sampled component (plus rejection redraws).
class SplitMix64 {
public:
    explicit SplitMix64(u64 seed) : state_(seed) {}

    u64 next() {
        u64 z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform draw from [lo, hi] inclusive, bias-free via rejection sampling.
    u64 next_in(u64 lo, u64 hi) {
        const u64 span = hi - lo + 1;  // 0 means the full 2^64 range
        if (span == 0) return lo + next();
        const u64 limit = kU64Max - kU64Max % span;
        u64 draw;
        do {
            draw = next();
        } while (draw >= limit);
        return lo + draw % span;
    }

private:
    u64 state_;
};

struct ScanSpec {
    MapParams params;
    Nat from_start;  // inclusive, >= 1
    Nat to_start;    // exclusive, > from_start
    bool skip_trivial = true;
    Budget budget{};
    unsigned workers = 1;
    bool fail_fast = false;
    bool use_memo = true;
};

struct ScanRecord {
    u64 b = 0;
    u32 m = 0;
    Nat s0;
    OutcomeKind outcome = OutcomeKind::BudgetExceeded;
    u64 steps_consumed = 0;
    std::optional<u64> steps_to_one;   // ReachedOne only
    std::optional<Nat> cycle_min;      // EnteredCycle only
    std::optional<u64> cycle_length;   // EnteredCycle only
    unsigned peak_bits = 0;
};

struct FoundCycle {
    u64 b = 0;
    u32 m = 0;
    CycleRecord cycle;

    friend bool operator==(const FoundCycle&, const FoundCycle&) = default;
};

struct ScanCounts {
    u64 scanned = 0;  // == reached_one + entered_cycle + budget_exceeded
    u64 skipped_trivial = 0;
    u64 reached_one = 0;
    u64 entered_cycle = 0;
    u64 budget_exceeded = 0;

    friend bool operator==(const ScanCounts&, const ScanCounts&) = default;
};

enum class ScanMode { Range, Random, Conjecture };

struct RangeEcho {
    u64 b = 0;
    u32 m = 0;
    Nat from;
    Nat to;
    bool skip_trivial = true;
    bool use_memo = true;

    friend bool operator==(const RangeEcho&, const RangeEcho&) = default;
};

struct RandomEcho {
    u64 b_min = 0, b_max = 0;
    u32 m_min = 0, m_max = 0;
    u64 s0_min = 0, s0_max = 0;
    u64 count = 0;
    u64 seed = 0;

    friend bool operator==(const RandomEcho&, const RandomEcho&) = default;
};

struct ConjectureEcho {
    u64 b_max = 0;
    Nat s0_max;
    bool skip_trivial = true;

    friend bool operator==(const ConjectureEcho&, const ConjectureEcho&) = default;
};

// Aggregated scan summary. wall_seconds and workers_used are runtime
// diagnostics: they are not serialized, so report files are byte-identical
// across worker counts and machines.
struct ScanReport {
    ScanMode mode = ScanMode::Range;
    std::variant<RangeEcho, RandomEcho, ConjectureEcho> echo;
    Budget budget{};
    ScanCounts counts;
    std::vector<FoundCycle> cycles;  // deduplicated, sorted by (b, m, min)
    std::optional<u64> max_stopping_time;
    double wall_seconds = 0.0;
    unsigned workers_used = 1;
};

struct ScanHooks {
    // Called once per chunk with that chunk's records in ascending start order.
    std::function<void(std::span<const ScanRecord>)> sink;
    // Called at chunk boundaries with the next unscanned start and the partial
    // report; return false to stop scanning (the partial report is returned).
    std::function<bool(const Nat& next_start, const ScanReport& partial)> on_chunk;
};

struct ResumePoint {
    Nat next_start;
    ScanReport partial;
};

ScanReport scan_range(const ScanSpec& spec);
ScanReport scan_range(const ScanSpec& spec, const ScanHooks& hooks,
                      const ResumePoint* resume = nullptr);

struct RandomScanSpec {
    u64 b_min = 2, b_max = 2;
    u32 m_min = 1, m_max = 1;
    u64 s0_min = 1, s0_max = 1'000'000;
    u64 count = 1;
    u64 seed = 0;
    Budget budget{};
    unsigned workers = 1;
};

// Reproducible random (b, m, s0) sampling: per triple one splitmix64 draw for
// b, then m, then s0, each rejection-sampled into its inclusive range.
ScanReport random_scan(const RandomScanSpec& spec);
ScanReport random_scan(const RandomScanSpec& spec, const ScanHooks& hooks);

// For each b in [2, b_max] scans m = b-1 over [1, s0_max); any non-principal
// cycle in the report is a counter-example to the m = b-1 conjecture.
ScanReport conjecture_scan(u64 b_max, const Nat& s0_max, const Budget& budget,
                           unsigned workers = 1);
ScanReport conjecture_scan(u64 b_max, const Nat& s0_max, const Budget& budget, unsigned workers,
                           const ScanHooks& hooks);

// Associative, commutative combination of two range reports from the same
// spec family (same map, budget and flags). Ranges combine as the convex
// hull; an empty range acts as the identity.
ScanReport merge_reports(const ScanReport& a, const ScanReport& b);

}  // namespace gencollatz
