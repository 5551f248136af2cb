#include "gencollatz/scan.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <map>
#include <tuple>

namespace gencollatz {

namespace {

// Fixed chunk size: per-start results depend only on the memo snapshot at the
// chunk boundary, which makes reports independent of the worker count.
constexpr u64 kChunk = 4096;
// Cap on the dense memo window above from_start (16 bytes per entry).
constexpr u64 kMemoCapEntries = u64{1} << 26;

struct MemoEntry {
    u64 steps_to_one = 0;
    u32 peak_bits = 0;
    bool reached_one = false;  // only reached-one entries are ever probed
};

struct PerStart {
    bool skipped = false;
    TrajectoryOutcome outcome;
};

void validate_workers(unsigned workers) {
    if (workers < 1) throw InvalidParams("scan: workers must be >= 1");
}

u64 to_u64_start(const Nat& n, const char* what) {
    if (!n.fits_u64()) {
        throw InvalidParams(std::string("scan: ") + what + " must fit in 64 bits");
    }
    return n.to_u64();
}

bool cycle_order(const FoundCycle& a, const FoundCycle& b) {
    return std::tie(a.b, a.m) < std::tie(b.b, b.m) ||
           (std::tie(a.b, a.m) == std::tie(b.b, b.m) &&
            a.cycle.min_element < b.cycle.min_element);
}

ScanRecord make_record(const MapParams& params, Nat s0, const TrajectoryOutcome& out,
                       const CycleRecord* cycle) {
    ScanRecord r;
    r.b = params.base;
    r.m = params.exponent;
    r.s0 = std::move(s0);
    r.outcome = out.kind;
    r.steps_consumed = out.steps_consumed;
    r.peak_bits = out.peak_bits;
    if (out.kind == OutcomeKind::ReachedOne) r.steps_to_one = out.steps_to_one;
    if (out.kind == OutcomeKind::EnteredCycle) {
        r.cycle_min = cycle->min_element;
        r.cycle_length = cycle->length;
    }
    return r;
}

// Runs fn over [lo, hi) split into `workers` contiguous slices.
template <typename Fn>
void run_sliced(u64 lo, u64 hi, unsigned workers, Fn&& fn) {
    const u64 size = hi - lo;
    if (workers <= 1 || size < 2) {
        fn(lo, hi);
        return;
    }
    const u64 used = std::min<u64>(workers, size);
    std::vector<std::future<void>> futures;
    futures.reserve(used - 1);
    for (u64 w = 1; w < used; ++w) {
        const u64 beg = lo + size * w / used;
        const u64 end = lo + size * (w + 1) / used;
        futures.push_back(std::async(std::launch::async, [&fn, beg, end] { fn(beg, end); }));
    }
    fn(lo, lo + size / used);
    for (auto& f : futures) f.get();
}

class Census {
public:
    void seed(const std::vector<FoundCycle>& cycles) {
        for (const auto& fc : cycles) add(fc.b, fc.m, fc.cycle);
    }

    u32 add(u64 b, u32 m, const CycleRecord& cycle) {
        const Key key{b, m, cycle.min_element};
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        const u32 idx = static_cast<u32>(cycles_.size());
        cycles_.push_back(FoundCycle{b, m, cycle});
        index_.emplace(key, idx);
        return idx;
    }

    const CycleRecord& at(u32 idx) const { return cycles_[idx].cycle; }

    std::vector<FoundCycle> sorted() const {
        std::vector<FoundCycle> out = cycles_;
        std::sort(out.begin(), out.end(), cycle_order);
        return out;
    }

private:
    struct Key {
        u64 b;
        u32 m;
        Nat min;
        bool operator<(const Key& o) const {
            if (b != o.b) return b < o.b;
            if (m != o.m) return m < o.m;
            return min < o.min;
        }
    };
    std::vector<FoundCycle> cycles_;
    std::map<Key, u32> index_;
};

struct Aggregate {
    ScanCounts counts;
    std::optional<u64> max_stopping_time;
    Census census;

    void note(const ScanRecord& rec) {
        ++counts.scanned;
        switch (rec.outcome) {
            case OutcomeKind::ReachedOne:
                ++counts.reached_one;
                if (!max_stopping_time || *rec.steps_to_one > *max_stopping_time) {
                    max_stopping_time = *rec.steps_to_one;
                }
                break;
            case OutcomeKind::EnteredCycle:
                ++counts.entered_cycle;
                break;
            case OutcomeKind::BudgetExceeded:
                ++counts.budget_exceeded;
                break;
        }
    }
};

}  // namespace

ScanReport scan_range(const ScanSpec& spec) {
    return scan_range(spec, ScanHooks{}, nullptr);
}

ScanReport scan_range(const ScanSpec& spec, const ScanHooks& hooks, const ResumePoint* resume) {
    validate_budget(spec.budget);
    validate_workers(spec.workers);
    if (spec.from_start.is_zero()) throw InvalidParams("scan: from_start must be >= 1");
    if (!(spec.from_start < spec.to_start)) {
        throw InvalidParams("scan: to_start must exceed from_start");
    }
    const u64 lo = to_u64_start(spec.from_start, "from_start");
    const u64 hi = to_u64_start(spec.to_start, "to_start");

    const RangeEcho echo{spec.params.base, spec.params.exponent, spec.from_start, spec.to_start,
                         spec.skip_trivial, spec.use_memo};

    Aggregate agg;
    u64 next = lo;
    if (resume != nullptr) {
        const auto* prev = std::get_if<RangeEcho>(&resume->partial.echo);
        if (prev == nullptr || !(*prev == echo)) {
            throw SpecMismatch("scan resume: checkpoint does not match the requested scan");
        }
        next = to_u64_start(resume->next_start, "resume next_start");
        if (next < lo || next > hi || (next - lo) % kChunk != 0) {
            throw SpecMismatch("scan resume: next_start is not a chunk boundary of this scan");
        }
        agg.counts = resume->partial.counts;
        agg.max_stopping_time = resume->partial.max_stopping_time;
        agg.census.seed(resume->partial.cycles);
    }

    std::vector<MemoEntry> memo;
    if (spec.use_memo) {
        memo.resize(std::min(hi - lo, kMemoCapEntries));
    }

    const auto t0 = std::chrono::steady_clock::now();
    const auto build_report = [&](bool final_report) {
        ScanReport r;
        r.mode = ScanMode::Range;
        r.echo = echo;
        r.budget = spec.budget;
        r.counts = agg.counts;
        r.cycles = agg.census.sorted();
        r.max_stopping_time = agg.max_stopping_time;
        r.workers_used = spec.workers;
        if (final_report) {
            r.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        return r;
    };

    std::vector<PerStart> results;
    std::vector<ScanRecord> chunk_records;
    bool stopped = false;

    for (u64 chunk_lo = next; chunk_lo < hi && !stopped; chunk_lo += kChunk) {
        const u64 chunk_hi = std::min(chunk_lo + kChunk, hi);
        results.assign(chunk_hi - chunk_lo, PerStart{});

        const auto probe = [&, chunk_lo](const Nat& v) -> std::optional<detail::MemoHit> {
            if (memo.empty() || !v.fits_u64()) return std::nullopt;
            const u64 x = v.to_u64();
            if (x < lo || x >= chunk_lo) return std::nullopt;
            const u64 off = x - lo;
            if (off >= memo.size() || !memo[off].reached_one) return std::nullopt;
            return detail::MemoHit{memo[off].steps_to_one, memo[off].peak_bits};
        };

        run_sliced(chunk_lo, chunk_hi, spec.workers, [&](u64 beg, u64 end) {
            for (u64 s = beg; s < end; ++s) {
                PerStart& slot = results[s - chunk_lo];
                const Nat sn(s);
                if (spec.skip_trivial && classify_start(spec.params, sn).trivial) {
                    slot.skipped = true;
                    continue;
                }
                slot.outcome = detail::detect_impl(spec.params, sn, spec.budget, probe);
            }
        });

        // Sequential fold in start order: records, counts, census, memo.
        chunk_records.clear();
        for (u64 s = chunk_lo; s < chunk_hi; ++s) {
            PerStart& slot = results[s - chunk_lo];
            if (slot.skipped) {
                ++agg.counts.skipped_trivial;
                continue;
            }
            const TrajectoryOutcome& out = slot.outcome;
            const CycleRecord* cycle = nullptr;
            if (out.kind == OutcomeKind::EnteredCycle) {
                const u32 idx = agg.census.add(spec.params.base, spec.params.exponent, *out.cycle);
                cycle = &agg.census.at(idx);
            }
            ScanRecord rec = make_record(spec.params, Nat(s), out, cycle);
            agg.note(rec);
            if (out.kind == OutcomeKind::ReachedOne && spec.use_memo && s - lo < memo.size()) {
                memo[s - lo] = MemoEntry{*out.steps_to_one, out.peak_bits, true};
            }
            chunk_records.push_back(std::move(rec));
            if (spec.fail_fast && out.kind == OutcomeKind::EnteredCycle) {
                stopped = true;  // lowest qualifying start wins
                break;
            }
        }

        if (hooks.sink && !chunk_records.empty()) hooks.sink(chunk_records);
        if (!stopped && hooks.on_chunk) {
            if (!hooks.on_chunk(Nat(chunk_hi), build_report(false))) {
                return build_report(true);
            }
        }
    }
    return build_report(true);
}

ScanReport random_scan(const RandomScanSpec& spec) {
    return random_scan(spec, ScanHooks{});
}

ScanReport random_scan(const RandomScanSpec& spec, const ScanHooks& hooks) {
    validate_budget(spec.budget);
    validate_workers(spec.workers);
    if (spec.b_min < 2 || spec.b_max < spec.b_min) {
        throw InvalidParams("random_scan: need 2 <= b_min <= b_max");
    }
    if (spec.m_min < 1 || spec.m_max < spec.m_min) {
        throw InvalidParams("random_scan: need 1 <= m_min <= m_max");
    }
    if (spec.s0_min < 1 || spec.s0_max < spec.s0_min) {
        throw InvalidParams("random_scan: need 1 <= s0_min <= s0_max");
    }
    if (spec.count < 1) throw InvalidParams("random_scan: count must be >= 1");

    const auto t0 = std::chrono::steady_clock::now();

    struct Triple {
        u64 b;
        u32 m;
        u64 s0;
    };
    std::vector<Triple> triples;
    triples.reserve(spec.count);
    SplitMix64 rng(spec.seed);
    std::map<std::pair<u64, u32>, MapParams> params_cache;
    for (u64 i = 0; i < spec.count; ++i) {
        Triple t{};
        t.b = rng.next_in(spec.b_min, spec.b_max);
        t.m = static_cast<u32>(rng.next_in(spec.m_min, spec.m_max));
        t.s0 = rng.next_in(spec.s0_min, spec.s0_max);
        params_cache.try_emplace({t.b, t.m}, MapParams{});
        triples.push_back(t);
    }
    for (auto& [key, params] : params_cache) params = make_params(key.first, key.second);

    std::vector<TrajectoryOutcome> results(spec.count);
    run_sliced(0, spec.count, spec.workers, [&](u64 beg, u64 end) {
        for (u64 i = beg; i < end; ++i) {
            const Triple& t = triples[i];
            const MapParams& params = params_cache.at({t.b, t.m});
            results[i] = detail::detect_impl(params, Nat(t.s0), spec.budget, detail::NoProbe{});
        }
    });

    Aggregate agg;
    std::vector<ScanRecord> records;
    if (hooks.sink) records.reserve(spec.count);
    for (u64 i = 0; i < spec.count; ++i) {
        const Triple& t = triples[i];
        const MapParams& params = params_cache.at({t.b, t.m});
        const TrajectoryOutcome& out = results[i];
        const CycleRecord* cycle = nullptr;
        if (out.kind == OutcomeKind::EnteredCycle) {
            cycle = &agg.census.at(agg.census.add(t.b, t.m, *out.cycle));
        }
        ScanRecord rec = make_record(params, Nat(t.s0), out, cycle);
        agg.note(rec);
        if (hooks.sink) records.push_back(std::move(rec));
    }
    if (hooks.sink && !records.empty()) hooks.sink(records);

    ScanReport r;
    r.mode = ScanMode::Random;
    r.echo = RandomEcho{spec.b_min, spec.b_max, spec.m_min, spec.m_max,
                        spec.s0_min, spec.s0_max, spec.count, spec.seed};
    r.budget = spec.budget;
    r.counts = agg.counts;
    r.cycles = agg.census.sorted();
    r.max_stopping_time = agg.max_stopping_time;
    r.workers_used = spec.workers;
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

ScanReport conjecture_scan(u64 b_max, const Nat& s0_max, const Budget& budget, unsigned workers) {
    return conjecture_scan(b_max, s0_max, budget, workers, ScanHooks{});
}

ScanReport conjecture_scan(u64 b_max, const Nat& s0_max, const Budget& budget, unsigned workers,
                           const ScanHooks& hooks) {
    if (b_max < 2) throw InvalidParams("conjecture_scan: b_max must be >= 2");
    if (!(Nat(1) < s0_max)) throw InvalidParams("conjecture_scan: s0_max must exceed 1");
    const auto t0 = std::chrono::steady_clock::now();

    ScanReport r;
    r.mode = ScanMode::Conjecture;
    r.echo = ConjectureEcho{b_max, s0_max, true};
    r.budget = budget;
    r.workers_used = workers;

    Census census;
    ScanHooks sub_hooks;
    sub_hooks.sink = hooks.sink;
    for (u64 b = 2; b <= b_max; ++b) {
        ScanSpec sub;
        sub.params = make_params(b, static_cast<u32>(b - 1));
        sub.from_start = Nat(1);
        sub.to_start = s0_max;
        sub.skip_trivial = true;
        sub.budget = budget;
        sub.workers = workers;
        ScanReport part = scan_range(sub, sub_hooks, nullptr);
        r.counts.scanned += part.counts.scanned;
        r.counts.skipped_trivial += part.counts.skipped_trivial;
        r.counts.reached_one += part.counts.reached_one;
        r.counts.entered_cycle += part.counts.entered_cycle;
        r.counts.budget_exceeded += part.counts.budget_exceeded;
        if (part.max_stopping_time &&
            (!r.max_stopping_time || *part.max_stopping_time > *r.max_stopping_time)) {
            r.max_stopping_time = part.max_stopping_time;
        }
        for (const auto& fc : part.cycles) census.add(fc.b, fc.m, fc.cycle);
    }
    r.cycles = census.sorted();
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

ScanReport merge_reports(const ScanReport& a, const ScanReport& b) {
    const auto* ea = std::get_if<RangeEcho>(&a.echo);
    const auto* eb = std::get_if<RangeEcho>(&b.echo);
    if (ea == nullptr || eb == nullptr) {
        throw SpecMismatch("merge_reports: only range reports can be merged");
    }
    const bool same_family = ea->b == eb->b && ea->m == eb->m &&
                             ea->skip_trivial == eb->skip_trivial &&
                             ea->use_memo == eb->use_memo &&
                             a.budget.max_steps == b.budget.max_steps &&
                             a.budget.max_bits == b.budget.max_bits;
    if (!same_family) throw SpecMismatch("merge_reports: reports are from different spec families");

    ScanReport out;
    out.mode = ScanMode::Range;
    out.budget = a.budget;

    RangeEcho echo = *ea;
    const bool a_empty = ea->from == ea->to;
    const bool b_empty = eb->from == eb->to;
    if (a_empty) {
        echo.from = eb->from;
        echo.to = eb->to;
    } else if (!b_empty) {
        echo.from = std::min(ea->from, eb->from);
        echo.to = std::max(ea->to, eb->to);
    }
    out.echo = echo;

    out.counts.scanned = a.counts.scanned + b.counts.scanned;
    out.counts.skipped_trivial = a.counts.skipped_trivial + b.counts.skipped_trivial;
    out.counts.reached_one = a.counts.reached_one + b.counts.reached_one;
    out.counts.entered_cycle = a.counts.entered_cycle + b.counts.entered_cycle;
    out.counts.budget_exceeded = a.counts.budget_exceeded + b.counts.budget_exceeded;

    Census census;
    census.seed(a.cycles);
    census.seed(b.cycles);
    out.cycles = census.sorted();

    if (a.max_stopping_time) out.max_stopping_time = a.max_stopping_time;
    if (b.max_stopping_time &&
        (!out.max_stopping_time || *b.max_stopping_time > *out.max_stopping_time)) {
        out.max_stopping_time = b.max_stopping_time;
    }
    out.wall_seconds = a.wall_seconds + b.wall_seconds;
    out.workers_used = std::max(a.workers_used, b.workers_used);
    return out;
}

}  // namespace gencollatz
