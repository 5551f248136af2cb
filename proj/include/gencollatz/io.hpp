#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gencollatz/scan.hpp"

namespace gencollatz {

inline constexpr int kSchemaVersion = 1;

// Record stream: UTF-8, one JSON object per line. Every integer is a decimal
// string (trajectory values exceed any fixed-width numeric). Keys: b, m, s0,
// outcome, steps, steps_to_one?, cycle_min?, cycle_length?, peak_bits.
std::string record_to_json(const ScanRecord& record);
ScanRecord record_from_json(const std::string& line);

// Writes one line per record and flushes at the end of the block.
u64 write_records(std::ostream& sink, std::span<const ScanRecord> records);
std::vector<ScanRecord> read_records(std::istream& source);

// Canonical single-object report form; byte-identical for identical scans.
std::string report_to_string(const ScanReport& report);
ScanReport report_from_string(const std::string& text);
void save_report(const std::string& path, const ScanReport& report);
ScanReport load_report(const std::string& path);

// Exact resumption point for an interrupted range scan.
struct Checkpoint {
    int schema_version = kSchemaVersion;
    ScanSpec spec;
    Nat next_start;
    ScanReport partial;
};

// Atomic replace-on-write (temp file + rename).
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

// Every numeric result printed in the source material, frozen after
// simulation confirmed each listing.
struct PaperFixture {
    enum class Kind { Cycle, PrincipalCycle, StoppingTime };

    std::string id;
    u64 b = 0;
    u32 m = 0;
    Kind kind = Kind::Cycle;
    Nat s0;                          // start (Cycle, StoppingTime)
    std::vector<Nat> expected_cycle; // canonical rotation (Cycle, PrincipalCycle)
    u64 expected_stopping_time = 0;  // StoppingTime
    bool long_running = false;
    u64 recommended_max_steps = Budget{}.max_steps;
};

const std::vector<PaperFixture>& paper_fixtures();

}  // namespace gencollatz
