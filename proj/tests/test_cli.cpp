#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gencollatz/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gencollatz/io.hpp"

using namespace gencollatz;

namespace {

struct CliResult {
    int status;
    std::string out;
    std::string err;
};

CliResult invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int status = cli::run(args, out, err);
    return {status, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path temp_path(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("usage errors exit with status 1") {
    CHECK(invoke({}).status == 1);
    CHECK(invoke({"no-such-command"}).status == 1);
    CHECK(invoke({"traj", "2"}).status == 1);
    CHECK(invoke({"traj", "2", "1", "6", "--bogus"}).status == 1);
    CHECK(invoke({"scan", "3", "1"}).status == 1);       // missing --to
    CHECK(invoke({"traj", "2", "1", "12x"}).status == 1);  // bad decimal
    CHECK(invoke({"traj", "1", "1", "5"}).status == 1);    // b below domain
    CHECK(invoke({"--help"}).status == 0);
}

TEST_CASE("traj prints the hailstone prefix") {
    auto r = invoke({"traj", "2", "1", "6", "--limit", "9"});
    CHECK(r.status == 0);
    CHECK(r.out == "6 3 10 5 16 8 4 2 1\n");
    r = invoke({"traj", "2", "1", "6"});  // default: up to the first 1
    CHECK(r.out == "6 3 10 5 16 8 4 2 1\n");
    r = invoke({"traj", "2", "1", "1", "--limit", "5"});
    CHECK(r.out == "1 4 2 1 4\n");
}

TEST_CASE("cycle prints the principal cycle") {
    const auto r = invoke({"cycle", "5", "3"});
    CHECK(r.status == 0);
    CHECK(r.out == "1,250,50,10,2,375,75,15,3,500,100,20,4,625,125,25,5\n");
}

TEST_CASE("classify and stopping-time report their findings") {
    CHECK(invoke({"classify", "10", "9", "1000000001"}).out == "non-trivial\n");
    CHECK(invoke({"classify", "2", "1", "8"}).out == "trivial s=1 N=3\n");
    CHECK(invoke({"stopping-time", "5", "3", "2"}).out == "13\n");
    CHECK(invoke({"stopping-time", "2", "1", "27"}).out == "111\n");
    const auto r = invoke({"stopping-time", "3", "1", "5"});
    CHECK(r.status == 0);
    CHECK(r.out.find("non-convergent") != std::string::npos);
    CHECK(r.out.find("min=7") != std::string::npos);
    const auto capped = invoke({"stopping-time", "2", "1", "27", "--max-steps", "10"});
    CHECK(capped.out.find("budget-exceeded") != std::string::npos);
}

TEST_CASE("scan flags counter-examples through the exit status") {
    const auto r = invoke({"scan", "3", "1", "--from", "1", "--to", "100",
                           "--fail-on-counterexample", "--jobs", "2"});
    CHECK(r.status == 2);
    CHECK(r.out.find("min=7") != std::string::npos);
    CHECK(r.out.find("COUNTER-EXAMPLE") != std::string::npos);

    const auto ok = invoke({"scan", "5", "1", "--from", "1", "--to", "1000",
                            "--fail-on-counterexample", "--jobs", "2"});
    CHECK(ok.status == 0);
}

TEST_CASE("identical argv produces byte-identical output files") {
    const auto out1 = temp_path("gencollatz_cli_out1.jsonl");
    const auto out2 = temp_path("gencollatz_cli_out2.jsonl");
    const auto rep1 = temp_path("gencollatz_cli_rep1.json");
    const auto rep2 = temp_path("gencollatz_cli_rep2.json");

    const std::vector<std::string> base{"scan", "3",      "1",          "--from", "1", "--to",
                                        "5000", "--jobs", "4"};
    auto args1 = base;
    args1.insert(args1.end(), {"--out", out1.string(), "--report", rep1.string()});
    auto args2 = base;
    args2[8] = "1";  // different worker count must not change the files
    args2.insert(args2.end(), {"--out", out2.string(), "--report", rep2.string()});

    CHECK(invoke(args1).status == 0);
    CHECK(invoke(args2).status == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK_FALSE(slurp(out1).empty());
    CHECK(slurp(rep1) == slurp(rep2));

    const auto report = load_report(rep1.string());
    CHECK(report.counts.scanned > 0);

    for (const auto& p : {out1, out2, rep1, rep2}) std::filesystem::remove(p);
}

TEST_CASE("checkpointed scans resume from the saved frontier") {
    const auto cp = temp_path("gencollatz_cli_cp.json");
    const auto rep_full = temp_path("gencollatz_cli_rep_full.json");
    const auto rep_resumed = temp_path("gencollatz_cli_rep_resumed.json");

    CHECK(invoke({"scan", "3", "1", "--from", "1", "--to", "20000", "--jobs", "2", "--report",
                  rep_full.string()})
              .status == 0);

    // run again, checkpointing every 4096 starts, then resume from the file
    CHECK(invoke({"scan", "3", "1", "--from", "1", "--to", "20000", "--jobs", "2",
                  "--checkpoint", cp.string(), "--checkpoint-every", "4096"})
              .status == 0);
    REQUIRE(std::filesystem::exists(cp));
    const auto resumed = invoke({"scan", "--resume", cp.string(), "--report",
                                 rep_resumed.string()});
    CHECK(resumed.status == 0);
    CHECK(slurp(rep_full) == slurp(rep_resumed));

    for (const auto& p : {cp, rep_full, rep_resumed}) std::filesystem::remove(p);
}

TEST_CASE("random-scan and conjecture-scan run end to end") {
    auto r = invoke({"random-scan", "--b-max", "9", "--m-max", "3", "--count", "200", "--seed",
                     "42", "--jobs", "2"});
    CHECK(r.status == 0);
    CHECK(r.out.find("scanned=200") != std::string::npos);

    r = invoke({"conjecture-scan", "--b-max", "3", "--s0-max", "300", "--jobs", "2",
                "--fail-on-counterexample"});
    CHECK(r.status == 0);
    CHECK(r.out.find("mode=conjecture") != std::string::npos);
}

TEST_CASE("verify-paper checks every fixture") {
    const auto r = invoke({"verify-paper", "--skip-long"});
    CHECK(r.status == 0);
    CHECK(r.out.find("fixture b3m1: PASS") != std::string::npos);
    CHECK(r.out.find("fixture b4m1: PASS") != std::string::npos);
    CHECK(r.out.find("fixture b6m1: PASS") != std::string::npos);
    CHECK(r.out.find("fixture b9m1: PASS") != std::string::npos);
    CHECK(r.out.find("fixture b2m2: PASS") != std::string::npos);
    CHECK(r.out.find("fixture b5m3-principal: PASS") != std::string::npos);
    CHECK(r.out.find("fixture hotpo: PASS") != std::string::npos);
    CHECK(r.out.find("fixture b10m9-stopping: SKIP (long)") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("GENCOLLATZ_JOBS provides the default worker count") {
    setenv("GENCOLLATZ_JOBS", "3", 1);
    const auto r = invoke({"scan", "3", "1", "--from", "1", "--to", "2000"});
    unsetenv("GENCOLLATZ_JOBS");
    CHECK(r.status == 0);
    CHECK(r.out.find("workers=3") != std::string::npos);
}

TEST_CASE("unwritable output paths exit with the I/O status") {
    const auto r = invoke({"scan", "3", "1", "--from", "1", "--to", "100", "--out",
                           "/nonexistent-dir/records.jsonl"});
    CHECK(r.status == 3);
}
