#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gencollatz/scan.hpp"

#include <map>

#include "gencollatz/io.hpp"
#include "oracle.hpp"

using namespace gencollatz;

namespace {

ScanSpec range_spec(u64 b, u32 m, u64 from, u64 to) {
    ScanSpec spec;
    spec.params = make_params(b, m);
    spec.from_start = Nat(from);
    spec.to_start = Nat(to);
    spec.skip_trivial = false;
    spec.workers = 2;
    return spec;
}

std::vector<ScanRecord> collect_records(const ScanSpec& spec) {
    std::vector<ScanRecord> records;
    ScanHooks hooks;
    hooks.sink = [&](std::span<const ScanRecord> chunk) {
        records.insert(records.end(), chunk.begin(), chunk.end());
    };
    scan_range(spec, hooks);
    return records;
}

}  // namespace

TEST_CASE("splitmix64 matches the published reference outputs") {
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xE220A8397B1DCDAFull);
    CHECK(rng.next() == 0x6E789E6AA1B965F4ull);
    CHECK(rng.next() == 0x06C45D188009454Full);
    CHECK(rng.next() == 0xF88BB8A8724C81ECull);

    SplitMix64 rng2(0x123456789ABCDEFull);
    CHECK(rng2.next() == 0x157A3807A48FAA9Dull);
    CHECK(rng2.next() == 0xD573529B34A1D093ull);
    CHECK(rng2.next() == 0x2F90B72E996DCCBEull);
}

TEST_CASE("next_in stays inside its range and is deterministic") {
    SplitMix64 a(99), b(99);
    for (int i = 0; i < 10'000; ++i) {
        const u64 lo = 5, hi = 11;
        const u64 x = a.next_in(lo, hi);
        CHECK(x >= lo);
        CHECK(x <= hi);
        CHECK(b.next_in(lo, hi) == x);
    }
    SplitMix64 c(1);
    CHECK(c.next_in(42, 42) == 42);
}

TEST_CASE("scan finds the b=3 counter-example cycle") {
    const auto report = scan_range(range_spec(3, 1, 1, 100));
    CHECK(report.counts.scanned == 99);
    CHECK(report.counts.scanned == report.counts.reached_one + report.counts.entered_cycle +
                                       report.counts.budget_exceeded);
    REQUIRE(report.cycles.size() == 1);
    CHECK(report.cycles[0].cycle.min_element == Nat(7));
    CHECK(report.cycles[0].cycle.length == 16);
    CHECK(report.counts.entered_cycle > 0);
}

TEST_CASE("scan confirms convergence families") {
    auto report = scan_range(range_spec(5, 1, 1, 10'000));
    CHECK(report.cycles.empty());
    CHECK(report.counts.entered_cycle == 0);

    report = scan_range(range_spec(2, 1, 1, 10'000));
    CHECK(report.counts.reached_one == 9999);
    CHECK(report.counts.scanned == 9999);
}

TEST_CASE("skip_trivial only skips provably convergent starts") {
    auto spec = range_spec(3, 1, 1, 100);
    spec.skip_trivial = true;
    const auto report = scan_range(spec);
    // trivial starts below 100 for b=3: 1,2,3,6,9,18,27,54,81
    CHECK(report.counts.skipped_trivial == 9);
    CHECK(report.counts.scanned == 90);
}

TEST_CASE("reports are byte-identical across worker counts") {
    std::string reference;
    for (unsigned workers : {1u, 2u, 8u}) {
        auto spec = range_spec(3, 1, 1, 10'000);
        spec.skip_trivial = true;
        spec.workers = workers;
        const auto serialized = report_to_string(scan_range(spec));
        if (reference.empty()) {
            reference = serialized;
        } else {
            CHECK(serialized == reference);
        }
    }
    CHECK_FALSE(reference.empty());
}

TEST_CASE("memoization never changes any record field") {
    for (const u64 max_steps : {u64{100'000'000}, u64{40}}) {  // generous and starved
        auto spec = range_spec(4, 1, 1, 20'000);
        spec.budget.max_steps = max_steps;
        spec.use_memo = true;
        const auto with_memo = collect_records(spec);
        spec.use_memo = false;
        const auto without_memo = collect_records(spec);

        REQUIRE(with_memo.size() == without_memo.size());
        for (std::size_t i = 0; i < with_memo.size(); ++i) {
            const auto& a = with_memo[i];
            const auto& b = without_memo[i];
            CAPTURE(max_steps);
            CAPTURE(a.s0.to_string());
            CHECK(a.s0 == b.s0);
            CHECK(a.outcome == b.outcome);
            CHECK(a.steps_consumed == b.steps_consumed);
            CHECK(a.steps_to_one == b.steps_to_one);
            CHECK(a.cycle_min == b.cycle_min);
            CHECK(a.cycle_length == b.cycle_length);
            CHECK(a.peak_bits == b.peak_bits);
        }
    }
}

TEST_CASE("fail_fast stops at the lowest counter-example start") {
    auto spec = range_spec(3, 1, 1, 100);
    spec.fail_fast = true;
    std::vector<ScanRecord> records;
    ScanHooks hooks;
    hooks.sink = [&](std::span<const ScanRecord> chunk) {
        records.insert(records.end(), chunk.begin(), chunk.end());
    };
    const auto report = scan_range(spec, hooks);
    CHECK(report.counts.entered_cycle == 1);
    REQUIRE_FALSE(records.empty());
    CHECK(records.back().s0 == Nat(5));  // 1..4 all reach 1; 5 is the first hit
    CHECK(records.back().outcome == OutcomeKind::EnteredCycle);
}

TEST_CASE("scan validates its spec") {
    CHECK_THROWS_AS(scan_range(range_spec(3, 1, 0, 10)), InvalidParams);
    CHECK_THROWS_AS(scan_range(range_spec(3, 1, 10, 10)), InvalidParams);
    CHECK_THROWS_AS(scan_range(range_spec(3, 1, 10, 5)), InvalidParams);
    auto spec = range_spec(3, 1, 1, 10);
    spec.workers = 0;
    CHECK_THROWS_AS(scan_range(spec), InvalidParams);
    spec = range_spec(3, 1, 1, 10);
    spec.budget.max_steps = 0;
    CHECK_THROWS_AS(scan_range(spec), InvalidParams);

    // bounds beyond 64 bits are not scannable (values are still unbounded)
    spec = range_spec(3, 1, 1, 10);
    spec.from_start = Nat::pow(2, 70);
    spec.to_start = Nat::pow(2, 71);
    CHECK_THROWS_AS(scan_range(spec), InvalidParams);
}

TEST_CASE("every reported cycle is closed under step") {
    const auto report = scan_range(range_spec(6, 1, 1, 200));
    REQUIRE_FALSE(report.cycles.empty());
    for (const auto& fc : report.cycles) {
        const auto params = make_params(fc.b, fc.m);
        const auto rec = canonical_cycle(params, fc.cycle.elements);  // throws if not closed
        CHECK(rec == fc.cycle);
    }
}

TEST_CASE("random_scan is reproducible and validates ranges") {
    RandomScanSpec spec;
    spec.b_min = 2;
    spec.b_max = 9;
    spec.m_min = 1;
    spec.m_max = 3;
    spec.s0_min = 1;
    spec.s0_max = 100'000;
    spec.count = 1000;
    spec.seed = 42;
    spec.workers = 4;
    const auto first = report_to_string(random_scan(spec));
    const auto second = report_to_string(random_scan(spec));
    CHECK(first == second);

    spec.workers = 1;
    CHECK(report_to_string(random_scan(spec)) == first);

    RandomScanSpec bad = spec;
    bad.b_min = 1;
    CHECK_THROWS_AS(random_scan(bad), InvalidParams);
    bad = spec;
    bad.count = 0;
    CHECK_THROWS_AS(random_scan(bad), InvalidParams);
    bad = spec;
    bad.m_max = 0;
    CHECK_THROWS_AS(random_scan(bad), InvalidParams);
    bad = spec;
    bad.s0_min = 0;
    CHECK_THROWS_AS(random_scan(bad), InvalidParams);
}

TEST_CASE("random_scan on b=2, m=1 never finds a cycle") {
    RandomScanSpec spec;
    spec.b_min = spec.b_max = 2;
    spec.m_min = spec.m_max = 1;
    spec.s0_min = 1;
    spec.s0_max = 1'000'000;
    spec.count = 100;
    spec.seed = 7;
    const auto report = random_scan(spec);
    CHECK(report.counts.entered_cycle == 0);
    CHECK(report.counts.scanned == 100);
}

TEST_CASE("random_scan agrees with an exhaustive scan of the same pool") {
    // ground truth from the exhaustive range scan
    std::map<u64, OutcomeKind> truth;
    for (const auto& rec : collect_records(range_spec(3, 1, 1, 1000))) {
        truth[rec.s0.to_u64()] = rec.outcome;
    }

    RandomScanSpec spec;
    spec.b_min = spec.b_max = 3;
    spec.m_min = spec.m_max = 1;
    spec.s0_min = 1;
    spec.s0_max = 999;
    spec.count = 1000;
    spec.seed = 1;
    spec.workers = 2;
    std::vector<ScanRecord> records;
    ScanHooks hooks;
    hooks.sink = [&](std::span<const ScanRecord> chunk) {
        records.insert(records.end(), chunk.begin(), chunk.end());
    };
    const auto report = random_scan(spec, hooks);
    CHECK(report.counts.entered_cycle > 0);  // the min-7 basin is dense below 1000
    REQUIRE(records.size() == 1000);
    for (const auto& rec : records) {
        CHECK(rec.outcome == truth.at(rec.s0.to_u64()));
    }
}

TEST_CASE("conjecture_scan covers the m = b-1 family") {
    auto report = conjecture_scan(3, Nat(500), Budget{}, 2);
    CHECK(report.counts.entered_cycle == 0);
    CHECK(report.cycles.empty());
    CHECK(report.counts.scanned + report.counts.skipped_trivial == 2 * 499);

    // b_max = 2 is the classic map; verified convergent at this scale
    report = conjecture_scan(2, Nat(100'000), Budget{}, 4);
    CHECK(report.counts.reached_one == report.counts.scanned);
    CHECK(report.counts.entered_cycle == 0);
    CHECK(report.counts.budget_exceeded == 0);

    report = conjecture_scan(2, Nat(2), Budget{}, 1);  // only s0 = 1
    CHECK(report.counts.scanned + report.counts.skipped_trivial == 1);
    CHECK(report.counts.entered_cycle == 0);

    CHECK_THROWS_AS(conjecture_scan(1, Nat(100), Budget{}, 1), InvalidParams);
    CHECK_THROWS_AS(conjecture_scan(3, Nat(1), Budget{}, 1), InvalidParams);
}

TEST_CASE("merge_reports is an identity-bearing commutative fold") {
    auto spec = range_spec(3, 1, 1, 1000);
    spec.skip_trivial = true;
    const auto whole = scan_range(spec);

    // identity element: an empty range from the same family
    ScanReport empty;
    empty.mode = ScanMode::Range;
    empty.echo = RangeEcho{3, 1, Nat(1), Nat(1), true, true};
    empty.budget = spec.budget;
    CHECK(report_to_string(merge_reports(whole, empty)) == report_to_string(whole));
    CHECK(report_to_string(merge_reports(empty, whole)) == report_to_string(whole));

    // four chunks, merged in two different orders
    const u64 bounds[] = {1, 250, 500, 750, 1000};
    std::vector<ScanReport> parts;
    for (int i = 0; i < 4; ++i) {
        auto part = spec;
        part.from_start = Nat(bounds[i]);
        part.to_start = Nat(bounds[i + 1]);
        parts.push_back(scan_range(part));
    }
    auto forward = merge_reports(merge_reports(parts[0], parts[1]),
                                 merge_reports(parts[2], parts[3]));
    auto backward = merge_reports(merge_reports(parts[3], parts[2]),
                                  merge_reports(parts[1], parts[0]));
    CHECK(report_to_string(forward) == report_to_string(backward));
    CHECK(report_to_string(forward) == report_to_string(whole));

    auto other = scan_range(range_spec(4, 1, 1, 100));
    CHECK_THROWS_AS(merge_reports(whole, other), SpecMismatch);
}
