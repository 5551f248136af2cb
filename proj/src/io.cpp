#include "gencollatz/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace gencollatz {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string outcome_name(OutcomeKind kind) {
    switch (kind) {
        case OutcomeKind::ReachedOne: return "reached_one";
        case OutcomeKind::EnteredCycle: return "entered_cycle";
        case OutcomeKind::BudgetExceeded: return "budget_exceeded";
    }
    throw std::logic_error("unknown outcome kind");
}

OutcomeKind outcome_from_name(const std::string& name) {
    if (name == "reached_one") return OutcomeKind::ReachedOne;
    if (name == "entered_cycle") return OutcomeKind::EnteredCycle;
    if (name == "budget_exceeded") return OutcomeKind::BudgetExceeded;
    throw IoError("unknown outcome tag: '" + name + "'");
}

template <typename T>
std::string dec(T value) {
    return std::to_string(value);
}

u64 parse_u64(const ordered_json& j, const char* key) {
    try {
        const Nat value = Nat::from_string(j.at(key).template get<std::string>());
        if (!value.fits_u64()) throw IoError("value does not fit in 64 bits");
        return value.to_u64();
    } catch (const std::exception& e) {
        throw IoError(std::string("bad field '") + key + "': " + e.what());
    }
}

Nat parse_nat(const ordered_json& j, const char* key) {
    try {
        return Nat::from_string(j.at(key).template get<std::string>());
    } catch (const std::exception& e) {
        throw IoError(std::string("bad field '") + key + "': " + e.what());
    }
}

ordered_json budget_to_json(const Budget& budget) {
    return ordered_json{{"max_steps", dec(budget.max_steps)},
                        {"max_bits", dec(budget.max_bits)}};
}

Budget budget_from_json(const ordered_json& j) {
    Budget budget;
    budget.max_steps = parse_u64(j, "max_steps");
    budget.max_bits = static_cast<unsigned>(parse_u64(j, "max_bits"));
    return budget;
}

ordered_json cycles_to_json(const std::vector<FoundCycle>& cycles) {
    ordered_json arr = ordered_json::array();
    for (const auto& fc : cycles) {
        ordered_json elems = ordered_json::array();
        for (const auto& e : fc.cycle.elements) elems.push_back(e.to_string());
        arr.push_back(ordered_json{{"b", dec(fc.b)},
                                   {"m", dec(fc.m)},
                                   {"min", fc.cycle.min_element.to_string()},
                                   {"length", dec(fc.cycle.length)},
                                   {"elements", std::move(elems)}});
    }
    return arr;
}

std::vector<FoundCycle> cycles_from_json(const ordered_json& arr) {
    std::vector<FoundCycle> out;
    for (const auto& j : arr) {
        FoundCycle fc;
        fc.b = parse_u64(j, "b");
        fc.m = static_cast<u32>(parse_u64(j, "m"));
        for (const auto& e : j.at("elements")) {
            fc.cycle.elements.push_back(Nat::from_string(e.template get<std::string>()));
        }
        fc.cycle.length = fc.cycle.elements.size();
        if (fc.cycle.length == 0) throw IoError("cycle with no elements");
        fc.cycle.min_element = fc.cycle.elements.front();
        fc.cycle.is_principal = fc.cycle.min_element.is_one();
        if (fc.cycle.length != parse_u64(j, "length")) {
            throw IoError("cycle length does not match its element list");
        }
        out.push_back(std::move(fc));
    }
    return out;
}

ordered_json report_to_json(const ScanReport& report) {
    ordered_json j;
    j["schema_version"] = dec(kSchemaVersion);
    switch (report.mode) {
        case ScanMode::Range: {
            const auto& e = std::get<RangeEcho>(report.echo);
            j["mode"] = "range";
            j["b"] = dec(e.b);
            j["m"] = dec(e.m);
            j["from"] = e.from.to_string();
            j["to"] = e.to.to_string();
            j["skip_trivial"] = e.skip_trivial;
            j["use_memo"] = e.use_memo;
            break;
        }
        case ScanMode::Random: {
            const auto& e = std::get<RandomEcho>(report.echo);
            j["mode"] = "random";
            j["b_min"] = dec(e.b_min);
            j["b_max"] = dec(e.b_max);
            j["m_min"] = dec(e.m_min);
            j["m_max"] = dec(e.m_max);
            j["s0_min"] = dec(e.s0_min);
            j["s0_max"] = dec(e.s0_max);
            j["count"] = dec(e.count);
            j["seed"] = dec(e.seed);
            break;
        }
        case ScanMode::Conjecture: {
            const auto& e = std::get<ConjectureEcho>(report.echo);
            j["mode"] = "conjecture";
            j["b_max"] = dec(e.b_max);
            j["s0_max"] = e.s0_max.to_string();
            j["skip_trivial"] = e.skip_trivial;
            break;
        }
    }
    j["budget"] = budget_to_json(report.budget);
    j["counts"] = ordered_json{{"scanned", dec(report.counts.scanned)},
                               {"skipped_trivial", dec(report.counts.skipped_trivial)},
                               {"reached_one", dec(report.counts.reached_one)},
                               {"entered_cycle", dec(report.counts.entered_cycle)},
                               {"budget_exceeded", dec(report.counts.budget_exceeded)}};
    if (report.max_stopping_time) {
        j["max_stopping_time"] = dec(*report.max_stopping_time);
    } else {
        j["max_stopping_time"] = nullptr;
    }
    j["cycles"] = cycles_to_json(report.cycles);
    return j;
}

ScanReport report_from_json(const ordered_json& j) {
    if (parse_u64(j, "schema_version") != static_cast<u64>(kSchemaVersion)) {
        throw SchemaMismatch("report schema_version is not " + dec(kSchemaVersion));
    }
    ScanReport report;
    const std::string mode = j.at("mode").template get<std::string>();
    if (mode == "range") {
        report.mode = ScanMode::Range;
        RangeEcho e;
        e.b = parse_u64(j, "b");
        e.m = static_cast<u32>(parse_u64(j, "m"));
        e.from = parse_nat(j, "from");
        e.to = parse_nat(j, "to");
        e.skip_trivial = j.at("skip_trivial").template get<bool>();
        e.use_memo = j.at("use_memo").template get<bool>();
        report.echo = e;
    } else if (mode == "random") {
        report.mode = ScanMode::Random;
        RandomEcho e;
        e.b_min = parse_u64(j, "b_min");
        e.b_max = parse_u64(j, "b_max");
        e.m_min = static_cast<u32>(parse_u64(j, "m_min"));
        e.m_max = static_cast<u32>(parse_u64(j, "m_max"));
        e.s0_min = parse_u64(j, "s0_min");
        e.s0_max = parse_u64(j, "s0_max");
        e.count = parse_u64(j, "count");
        e.seed = parse_u64(j, "seed");
        report.echo = e;
    } else if (mode == "conjecture") {
        report.mode = ScanMode::Conjecture;
        ConjectureEcho e;
        e.b_max = parse_u64(j, "b_max");
        e.s0_max = parse_nat(j, "s0_max");
        e.skip_trivial = j.at("skip_trivial").template get<bool>();
        report.echo = e;
    } else {
        throw IoError("unknown report mode: '" + mode + "'");
    }
    report.budget = budget_from_json(j.at("budget"));
    const auto& counts = j.at("counts");
    report.counts.scanned = parse_u64(counts, "scanned");
    report.counts.skipped_trivial = parse_u64(counts, "skipped_trivial");
    report.counts.reached_one = parse_u64(counts, "reached_one");
    report.counts.entered_cycle = parse_u64(counts, "entered_cycle");
    report.counts.budget_exceeded = parse_u64(counts, "budget_exceeded");
    if (!j.at("max_stopping_time").is_null()) {
        report.max_stopping_time = parse_u64(j, "max_stopping_time");
    }
    report.cycles = cycles_from_json(j.at("cycles"));
    return report;
}

ordered_json parse_object(const std::string& text, const char* what) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw IoError(std::string("malformed ") + what);
    }
    return j;
}

}  // namespace

std::string record_to_json(const ScanRecord& record) {
    ordered_json j;
    j["b"] = dec(record.b);
    j["m"] = dec(record.m);
    j["s0"] = record.s0.to_string();
    j["outcome"] = outcome_name(record.outcome);
    j["steps"] = dec(record.steps_consumed);
    if (record.steps_to_one) j["steps_to_one"] = dec(*record.steps_to_one);
    if (record.cycle_min) j["cycle_min"] = record.cycle_min->to_string();
    if (record.cycle_length) j["cycle_length"] = dec(*record.cycle_length);
    j["peak_bits"] = dec(record.peak_bits);
    return j.dump();
}

ScanRecord record_from_json(const std::string& line) {
    const ordered_json j = parse_object(line, "record line");
    ScanRecord r;
    r.b = parse_u64(j, "b");
    r.m = static_cast<u32>(parse_u64(j, "m"));
    r.s0 = parse_nat(j, "s0");
    r.outcome = outcome_from_name(j.at("outcome").template get<std::string>());
    r.steps_consumed = parse_u64(j, "steps");
    if (j.contains("steps_to_one")) r.steps_to_one = parse_u64(j, "steps_to_one");
    if (j.contains("cycle_min")) r.cycle_min = parse_nat(j, "cycle_min");
    if (j.contains("cycle_length")) r.cycle_length = parse_u64(j, "cycle_length");
    r.peak_bits = static_cast<unsigned>(parse_u64(j, "peak_bits"));
    return r;
}

u64 write_records(std::ostream& sink, std::span<const ScanRecord> records) {
    u64 written = 0;
    for (const auto& record : records) {
        sink << record_to_json(record) << '\n';
        ++written;
    }
    sink.flush();
    if (!sink) throw IoError("record sink write failed");
    return written;
}

std::vector<ScanRecord> read_records(std::istream& source) {
    std::vector<ScanRecord> out;
    std::string line;
    while (std::getline(source, line)) {
        if (line.empty()) continue;
        out.push_back(record_from_json(line));
    }
    if (source.bad()) throw IoError("record source read failed");
    return out;
}

std::string report_to_string(const ScanReport& report) {
    return report_to_json(report).dump(2) + "\n";
}

ScanReport report_from_string(const std::string& text) {
    return report_from_json(parse_object(text, "report"));
}

void save_report(const std::string& path, const ScanReport& report) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open report file for writing: " + path);
    out << report_to_string(report);
    out.flush();
    if (!out) throw IoError("report write failed: " + path);
}

ScanReport load_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open report file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return report_from_string(buf.str());
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
    ordered_json j;
    j["schema_version"] = dec(checkpoint.schema_version);
    j["kind"] = "checkpoint";
    j["spec"] = ordered_json{{"b", dec(checkpoint.spec.params.base)},
                             {"m", dec(checkpoint.spec.params.exponent)},
                             {"from", checkpoint.spec.from_start.to_string()},
                             {"to", checkpoint.spec.to_start.to_string()},
                             {"skip_trivial", checkpoint.spec.skip_trivial},
                             {"use_memo", checkpoint.spec.use_memo},
                             {"fail_fast", checkpoint.spec.fail_fast},
                             {"workers", dec(checkpoint.spec.workers)},
                             {"budget", budget_to_json(checkpoint.spec.budget)}};
    j["next_start"] = checkpoint.next_start.to_string();
    j["partial"] = report_to_json(checkpoint.partial);

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open checkpoint temp file: " + tmp);
        out << j.dump(2) << '\n';
        out.flush();
        if (!out) throw IoError("checkpoint write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("checkpoint rename failed: " + path);
    }
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const ordered_json j = parse_object(buf.str(), "checkpoint");

    Checkpoint cp;
    const u64 version = parse_u64(j, "schema_version");
    if (version != static_cast<u64>(kSchemaVersion)) {
        throw SchemaMismatch("checkpoint schema_version " + dec(version) + " is not supported");
    }
    const auto& spec = j.at("spec");
    cp.spec.params = make_params(parse_u64(spec, "b"), static_cast<u32>(parse_u64(spec, "m")));
    cp.spec.from_start = parse_nat(spec, "from");
    cp.spec.to_start = parse_nat(spec, "to");
    cp.spec.skip_trivial = spec.at("skip_trivial").template get<bool>();
    cp.spec.use_memo = spec.at("use_memo").template get<bool>();
    cp.spec.fail_fast = spec.at("fail_fast").template get<bool>();
    cp.spec.workers = static_cast<unsigned>(parse_u64(spec, "workers"));
    cp.spec.budget = budget_from_json(spec.at("budget"));
    cp.next_start = parse_nat(j, "next_start");
    cp.partial = report_from_json(j.at("partial"));
    return cp;
}

namespace {

PaperFixture cycle_fixture(std::string id, u64 b, u32 m, u64 s0,
                           std::initializer_list<u64> elements) {
    PaperFixture f;
    f.id = std::move(id);
    f.b = b;
    f.m = m;
    f.kind = PaperFixture::Kind::Cycle;
    f.s0 = Nat(s0);
    for (u64 e : elements) f.expected_cycle.emplace_back(e);
    return f;
}

std::vector<PaperFixture> build_fixtures() {
    std::vector<PaperFixture> out;

    out.push_back(cycle_fixture(
        "b3m1", 3, 1, 5,
        {7, 30, 10, 42, 14, 57, 19, 78, 26, 105, 35, 141, 47, 189, 63, 21}));
    out.push_back(cycle_fixture(
        "b4m1", 4, 1, 11,
        {23, 116, 29, 148, 37, 188, 47, 236, 59, 296, 74, 372, 93,
         468, 117, 588, 147, 736, 184, 46, 232, 58, 292, 73, 368, 92}));
    out.push_back(cycle_fixture(
        "b6m1", 6, 1, 7,
        {23, 162, 27, 192, 32, 228, 38, 270, 45, 318, 53, 372,
         62, 438, 73, 516, 86, 606, 101, 708, 118, 828, 138}));
    out.push_back(cycle_fixture(
        "b9m1", 9, 1, 31,
        {35,  351,  39,  396,  44,  441,  49,  495,  55,  558,  62,  621,  69,  693,
         77,  774,  86,  864,  96,  963,  107, 1071, 119, 1197, 133, 1332, 148, 1485,
         165, 1656, 184, 1845, 205, 2052, 228, 2286, 254, 2547, 283, 2835, 315}));
    out.push_back(cycle_fixture(
        "b2m2", 2, 2, 23,
        {37, 188, 94, 47, 236, 118, 59, 296, 148, 74}));

    {
        PaperFixture f;
        f.id = "b5m3-principal";
        f.b = 5;
        f.m = 3;
        f.kind = PaperFixture::Kind::PrincipalCycle;
        for (u64 e : {1, 250, 50, 10, 2, 375, 75, 15, 3, 500, 100, 20, 4, 625, 125, 25, 5}) {
            f.expected_cycle.emplace_back(e);
        }
        out.push_back(std::move(f));
    }
    {
        PaperFixture f;
        f.id = "hotpo";
        f.b = 2;
        f.m = 1;
        f.kind = PaperFixture::Kind::PrincipalCycle;
        for (u64 e : {1, 4, 2}) f.expected_cycle.emplace_back(e);
        out.push_back(std::move(f));
    }
    {
        PaperFixture f;
        f.id = "b10m9-stopping";
        f.b = 10;
        f.m = 9;
        f.kind = PaperFixture::Kind::StoppingTime;
        f.s0 = Nat(1'000'000'001ull);
        // Exactly 5000000830 map applications reach 1; the published figure of
        // 5000000829 omits the final division (the start's printed cycle data
        // elsewhere counts full applications, so the map-application count is
        // the consistent convention).
        f.expected_stopping_time = 5'000'000'830ull;
        f.long_running = true;
        f.recommended_max_steps = 6'000'000'000ull;
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace

const std::vector<PaperFixture>& paper_fixtures() {
    static const std::vector<PaperFixture> fixtures = build_fixtures();
    return fixtures;
}

}  // namespace gencollatz
