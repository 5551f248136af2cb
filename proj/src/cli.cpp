#include "gencollatz/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"

#include "gencollatz/io.hpp"

namespace gencollatz::cli {

namespace {

unsigned default_jobs() {
    if (const char* env = std::getenv("GENCOLLATZ_JOBS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 65536) {
            return static_cast<unsigned>(v);
        }
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc != 0 ? hc : 1;
}

std::string join(const std::vector<Nat>& values, const char* sep) {
    std::string out;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i != 0) out += sep;
        out += values[i].to_string();
    }
    return out;
}

const char* mode_name(ScanMode mode) {
    switch (mode) {
        case ScanMode::Range: return "range";
        case ScanMode::Random: return "random";
        case ScanMode::Conjecture: return "conjecture";
    }
    return "?";
}

void print_report(std::ostream& out, const ScanReport& r) {
    out << "mode=" << mode_name(r.mode);
    if (const auto* e = std::get_if<RangeEcho>(&r.echo)) {
        out << " b=" << e->b << " m=" << e->m << " from=" << e->from.to_string()
            << " to=" << e->to.to_string() << " skip_trivial=" << (e->skip_trivial ? "yes" : "no")
            << " memo=" << (e->use_memo ? "on" : "off");
    } else if (const auto* e = std::get_if<RandomEcho>(&r.echo)) {
        out << " b=[" << e->b_min << "," << e->b_max << "] m=[" << e->m_min << "," << e->m_max
            << "] s0=[" << e->s0_min << "," << e->s0_max << "] count=" << e->count
            << " seed=" << e->seed;
    } else if (const auto* e = std::get_if<ConjectureEcho>(&r.echo)) {
        out << " (m=b-1) b_max=" << e->b_max << " s0_max=" << e->s0_max.to_string();
    }
    out << "\n";
    out << "scanned=" << r.counts.scanned << " skipped_trivial=" << r.counts.skipped_trivial
        << " reached_one=" << r.counts.reached_one << " entered_cycle=" << r.counts.entered_cycle
        << " budget_exceeded=" << r.counts.budget_exceeded << "\n";
    out << "max_stopping_time="
        << (r.max_stopping_time ? std::to_string(*r.max_stopping_time) : std::string("n/a"))
        << "\n";
    out << "non-principal cycles: " << r.cycles.size() << "\n";
    for (const auto& fc : r.cycles) {
        out << "  b=" << fc.b << " m=" << fc.m << " min=" << fc.cycle.min_element.to_string()
            << " length=" << fc.cycle.length << " elements=" << join(fc.cycle.elements, ",")
            << "\n";
    }
    out << "wall=" << r.wall_seconds << "s workers=" << r.workers_used << "\n";
}

int flag_counterexamples(std::ostream& out, const ScanReport& r, bool fail_on_counterexample) {
    if (r.cycles.empty()) return 0;
    out << "COUNTER-EXAMPLE: " << r.cycles.size()
        << " non-principal cycle(s) found; smallest shown above\n";
    return fail_on_counterexample ? 2 : 0;
}

struct ScanOutputs {
    std::string out_path;
    std::string report_path;
};

// Shared wiring for the scanning subcommands: record sink plus report file.
class OutputFiles {
public:
    explicit OutputFiles(const ScanOutputs& paths) : paths_(paths) {
        if (!paths_.out_path.empty()) {
            records_.open(paths_.out_path, std::ios::binary | std::ios::trunc);
            if (!records_) throw IoError("cannot open --out file: " + paths_.out_path);
        }
    }

    ScanHooks hooks() {
        ScanHooks h;
        if (records_.is_open()) {
            h.sink = [this](std::span<const ScanRecord> records) {
                write_records(records_, records);
            };
        }
        return h;
    }

    void finish(const ScanReport& report) {
        if (!paths_.report_path.empty()) save_report(paths_.report_path, report);
    }

private:
    ScanOutputs paths_;
    std::ofstream records_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"generalized Collatz maps: exact trajectories, limit cycles and "
                 "counter-example searches"};
    app.require_subcommand(1);
    int exit_code = 0;

    const auto add_budget = [](CLI::App* cmd, Budget& budget) {
        cmd->add_option("--max-steps", budget.max_steps,
                        "elementary step budget (default 100000000)");
        cmd->add_option("--max-bits", budget.max_bits,
                        "bit-length ceiling for trajectory values (default 16384)");
    };

    // traj
    struct {
        u64 b = 2;
        u32 m = 1;
        std::string s0;
        u64 limit = 0;
        Budget budget;
    } traj;
    {
        auto* cmd = app.add_subcommand("traj", "print a hailstone trajectory");
        cmd->add_option("b", traj.b, "base b >= 2")->required();
        cmd->add_option("m", traj.m, "exponent m >= 1")->required();
        cmd->add_option("s0", traj.s0, "starting value (decimal, any size)")->required();
        cmd->add_option("--limit", traj.limit,
                        "number of values to print (default: until the first 1)");
        add_budget(cmd, traj.budget);
        cmd->callback([&] {
            const auto params = make_params(traj.b, traj.m);
            auto stream = trajectory(params, Nat::from_string(traj.s0), traj.budget);
            u64 printed = 0;
            while (auto value = stream.next()) {
                if (printed != 0) out << ' ';
                out << value->to_string();
                ++printed;
                if (traj.limit != 0 && printed == traj.limit) break;
                if (traj.limit == 0 && value->is_one()) break;
            }
            out << '\n';
            if (traj.limit == 0 && stream.stop_reason() != Trajectory::StopReason::None) {
                err << "traj: stopped by budget before reaching 1\n";
            }
        });
    }

    // cycle
    struct {
        u64 b = 2;
        u32 m = 1;
    } cyc;
    {
        auto* cmd = app.add_subcommand("cycle", "print the principal limit cycle through 1");
        cmd->add_option("b", cyc.b, "base b >= 2")->required();
        cmd->add_option("m", cyc.m, "exponent m >= 1")->required();
        cmd->callback([&] {
            const auto record = principal_cycle(make_params(cyc.b, cyc.m));
            out << join(record.elements, ",") << '\n';
        });
    }

    // classify
    struct {
        u64 b = 2;
        u32 m = 1;
        std::string s0;
    } cls;
    {
        auto* cmd = app.add_subcommand("classify", "classify a start as trivial or non-trivial");
        cmd->add_option("b", cls.b, "base b >= 2")->required();
        cmd->add_option("m", cls.m, "exponent m >= 1")->required();
        cmd->add_option("s0", cls.s0, "starting value (decimal, any size)")->required();
        cmd->callback([&] {
            const auto sc = classify_start(make_params(cls.b, cls.m), Nat::from_string(cls.s0));
            if (sc.trivial) {
                out << "trivial s=" << sc.residue.to_string() << " N=" << sc.power << '\n';
            } else {
                out << "non-trivial\n";
            }
        });
    }

    // stopping-time
    struct {
        u64 b = 2;
        u32 m = 1;
        std::string s0;
        Budget budget;
    } stop;
    {
        auto* cmd = app.add_subcommand("stopping-time", "steps until the value 1 first appears");
        cmd->add_option("b", stop.b, "base b >= 2")->required();
        cmd->add_option("m", stop.m, "exponent m >= 1")->required();
        cmd->add_option("s0", stop.s0, "starting value (decimal, any size)")->required();
        add_budget(cmd, stop.budget);
        cmd->callback([&] {
            const auto params = make_params(stop.b, stop.m);
            const auto outcome = detect_outcome(params, Nat::from_string(stop.s0), stop.budget);
            switch (outcome.kind) {
                case OutcomeKind::ReachedOne:
                    out << *outcome.steps_to_one << '\n';
                    break;
                case OutcomeKind::EnteredCycle:
                    out << "non-convergent (cycle min=" << outcome.cycle->min_element.to_string()
                        << " length=" << outcome.cycle->length << ")\n";
                    break;
                case OutcomeKind::BudgetExceeded:
                    out << "budget-exceeded (steps=" << outcome.steps_consumed
                        << " peak_bits=" << outcome.peak_bits << ")\n";
                    break;
            }
        });
    }

    // scan
    struct {
        u64 b = 2;
        u32 m = 1;
        std::string from = "1";
        std::string to;
        unsigned jobs = default_jobs();
        Budget budget;
        bool fail_on_cx = false;
        bool fail_fast = false;
        bool no_memo = false;
        ScanOutputs outputs;
        std::string checkpoint_path;
        u64 checkpoint_every = 1u << 20;
        std::string resume_path;
    } scan;
    {
        auto* cmd = app.add_subcommand("scan", "scan a start range for counter-examples");
        auto* ob = cmd->add_option("b", scan.b, "base b >= 2");
        auto* om = cmd->add_option("m", scan.m, "exponent m >= 1");
        auto* oto = cmd->add_option("--to", scan.to, "end of start range (exclusive)");
        cmd->add_option("--from", scan.from, "first start (default 1)");
        auto* ost = cmd->add_flag("--skip-trivial", "skip provably convergent trivial starts");
        auto* oit = cmd->add_flag("--include-trivial", "scan trivial starts too");
        cmd->add_option("--jobs", scan.jobs, "worker threads (default: GENCOLLATZ_JOBS or all cores)");
        add_budget(cmd, scan.budget);
        cmd->add_flag("--fail-on-counterexample", scan.fail_on_cx,
                      "exit with status 2 when a non-principal cycle is found");
        cmd->add_flag("--fail-fast", scan.fail_fast,
                      "stop at the lowest start that enters a non-principal cycle");
        cmd->add_flag("--no-memo", scan.no_memo, "disable outcome memoization");
        cmd->add_option("--out", scan.outputs.out_path, "write per-start records (JSON lines)");
        cmd->add_option("--report", scan.outputs.report_path, "write the aggregated report (JSON)");
        cmd->add_option("--checkpoint", scan.checkpoint_path, "periodically save a resume point");
        cmd->add_option("--checkpoint-every", scan.checkpoint_every,
                        "starts between checkpoint saves (default 1048576)");
        cmd->add_option("--resume", scan.resume_path, "resume from a checkpoint file");
        cmd->callback([&, cmd, ob, om, oto, ost, oit] {
            ScanSpec spec;
            std::optional<ResumePoint> resume;
            if (!scan.resume_path.empty()) {
                auto cp = load_checkpoint(scan.resume_path);
                spec = cp.spec;
                if (cmd->count("--jobs") != 0) spec.workers = scan.jobs;
                resume = ResumePoint{cp.next_start, std::move(cp.partial)};
            } else {
                if (ob->count() == 0 || om->count() == 0 || oto->count() == 0) {
                    throw CLI::RequiredError("scan: b, m and --to (or --resume)");
                }
                spec.params = make_params(scan.b, scan.m);
                spec.from_start = Nat::from_string(scan.from);
                spec.to_start = Nat::from_string(scan.to);
                spec.skip_trivial = spec.from_start.is_one();
                if (ost->count() != 0) spec.skip_trivial = true;
                if (oit->count() != 0) spec.skip_trivial = false;
                spec.budget = scan.budget;
                spec.workers = scan.jobs;
                spec.fail_fast = scan.fail_fast;
                spec.use_memo = !scan.no_memo;
            }

            OutputFiles files(scan.outputs);
            ScanHooks hooks = files.hooks();
            u64 last_saved = 0;
            if (!scan.checkpoint_path.empty()) {
                hooks.on_chunk = [&](const Nat& next_start, const ScanReport& partial) {
                    const u64 position = next_start.fits_u64() ? next_start.to_u64() : 0;
                    if (position - last_saved >= scan.checkpoint_every) {
                        save_checkpoint(scan.checkpoint_path,
                                        Checkpoint{kSchemaVersion, spec, next_start, partial});
                        last_saved = position;
                    }
                    return true;
                };
            }

            const auto report = scan_range(spec, hooks, resume ? &*resume : nullptr);
            files.finish(report);
            print_report(out, report);
            exit_code = flag_counterexamples(out, report, scan.fail_on_cx);
        });
    }

    // random-scan
    struct {
        RandomScanSpec spec;
        ScanOutputs outputs;
        bool fail_on_cx = false;
    } rnd;
    rnd.spec.workers = default_jobs();
    {
        auto* cmd = app.add_subcommand("random-scan", "scan reproducible random (b, m, s0) triples");
        cmd->add_option("--b-min", rnd.spec.b_min, "smallest base (default 2)");
        cmd->add_option("--b-max", rnd.spec.b_max, "largest base")->required();
        cmd->add_option("--m-min", rnd.spec.m_min, "smallest exponent (default 1)");
        cmd->add_option("--m-max", rnd.spec.m_max, "largest exponent")->required();
        cmd->add_option("--s0-min", rnd.spec.s0_min, "smallest start (default 1)");
        cmd->add_option("--s0-max", rnd.spec.s0_max, "largest start (default 1000000)");
        cmd->add_option("--count", rnd.spec.count, "number of triples")->required();
        cmd->add_option("--seed", rnd.spec.seed, "PRNG seed (default 0)");
        cmd->add_option("--jobs", rnd.spec.workers, "worker threads");
        add_budget(cmd, rnd.spec.budget);
        cmd->add_flag("--fail-on-counterexample", rnd.fail_on_cx,
                      "exit with status 2 when a non-principal cycle is found");
        cmd->add_option("--out", rnd.outputs.out_path, "write per-start records (JSON lines)");
        cmd->add_option("--report", rnd.outputs.report_path, "write the aggregated report (JSON)");
        cmd->callback([&] {
            OutputFiles files(rnd.outputs);
            const auto report = random_scan(rnd.spec, files.hooks());
            files.finish(report);
            print_report(out, report);
            exit_code = flag_counterexamples(out, report, rnd.fail_on_cx);
        });
    }

    // conjecture-scan
    struct {
        u64 b_max = 2;
        std::string s0_max;
        unsigned jobs = default_jobs();
        Budget budget;
        ScanOutputs outputs;
        bool fail_on_cx = false;
    } conj;
    {
        auto* cmd = app.add_subcommand("conjecture-scan",
                                       "test the m = b-1 family for every b up to b_max");
        cmd->add_option("--b-max", conj.b_max, "largest base to test")->required();
        cmd->add_option("--s0-max", conj.s0_max, "end of start range (exclusive)")->required();
        cmd->add_option("--jobs", conj.jobs, "worker threads");
        add_budget(cmd, conj.budget);
        cmd->add_flag("--fail-on-counterexample", conj.fail_on_cx,
                      "exit with status 2 when a counter-example is found");
        cmd->add_option("--out", conj.outputs.out_path, "write per-start records (JSON lines)");
        cmd->add_option("--report", conj.outputs.report_path, "write the aggregated report (JSON)");
        cmd->callback([&] {
            OutputFiles files(conj.outputs);
            const auto report = conjecture_scan(conj.b_max, Nat::from_string(conj.s0_max),
                                                conj.budget, conj.jobs, files.hooks());
            files.finish(report);
            print_report(out, report);
            exit_code = flag_counterexamples(out, report, conj.fail_on_cx);
        });
    }

    // verify-paper
    struct {
        bool skip_long = false;
    } verify;
    {
        auto* cmd = app.add_subcommand("verify-paper",
                                       "recompute every published figure and compare");
        cmd->add_flag("--skip-long", verify.skip_long,
                      "skip the multi-billion-step stopping-time fixture");
        cmd->callback([&] {
            bool all_ok = true;
            for (const auto& fixture : paper_fixtures()) {
                if (fixture.long_running && verify.skip_long) {
                    out << "fixture " << fixture.id << ": SKIP (long)\n";
                    continue;
                }
                const auto params = make_params(fixture.b, fixture.m);
                Budget budget;
                budget.max_steps = fixture.recommended_max_steps;
                bool ok = false;
                std::string detail;
                switch (fixture.kind) {
                    case PaperFixture::Kind::Cycle: {
                        const auto outcome = detect_outcome(params, fixture.s0, budget);
                        ok = outcome.kind == OutcomeKind::EnteredCycle &&
                             outcome.cycle->elements == fixture.expected_cycle;
                        detail = "cycle from s0=" + fixture.s0.to_string();
                        break;
                    }
                    case PaperFixture::Kind::PrincipalCycle: {
                        const auto record = principal_cycle(params);
                        ok = record.elements == fixture.expected_cycle;
                        detail = "principal cycle";
                        break;
                    }
                    case PaperFixture::Kind::StoppingTime: {
                        const auto steps = stopping_time(params, fixture.s0, budget);
                        ok = steps && *steps == fixture.expected_stopping_time;
                        detail = "stopping time of s0=" + fixture.s0.to_string();
                        break;
                    }
                }
                out << "fixture " << fixture.id << ": " << (ok ? "PASS" : "FAIL") << " (" << detail
                    << ")\n";
                all_ok = all_ok && ok;
            }
            if (!all_ok) {
                err << "verify-paper: at least one fixture mismatched\n";
                exit_code = 1;
            }
        });
    }

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("gencollatz");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_code;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? static_cast<size_t>(argc - 1) : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace gencollatz::cli
