#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../tools/cli_app.hpp"

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = tspir::run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("retrieve reports rates and decodes") {
    CliRun r = run({"retrieve", "--n", "4", "--m", "2", "--t", "2"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "decoded file (1x2):"));
    CHECK(contains(r.out, "rate 1/4 (capacity 1/4)"));
    CHECK(contains(r.out, "secrecy 3 (bound 3)"));
    CHECK(contains(r.out, "server 4 query"));
}

TEST_CASE("retrieve writes a transcript file when asked") {
    std::string path = "cli_transcript_test.txt";
    CliRun r = run({"retrieve", "--n", "2", "--m", "1", "--t", "1", "--seed", "7",
                    "--transcript", path});
    CHECK(r.code == 0);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "session n=2 m=1 t=1 k-files=2 q=3 want=1 seed=7");
    in.close();
    std::remove(path.c_str());
}

TEST_CASE("invalid configurations exit with code 2") {
    CliRun bad_regime = run({"retrieve", "--n", "3", "--m", "2", "--t", "2"});
    CHECK(bad_regime.code == 2);
    CHECK(contains(bad_regime.err, "N must be"));

    CliRun bad_modulus = run({"retrieve", "--n", "4", "--m", "2", "--t", "2", "--q", "4"});
    CHECK(bad_modulus.code == 2);
    CHECK(contains(bad_modulus.err, "modulus must be prime > N"));

    CliRun small_modulus = run({"retrieve", "--n", "4", "--m", "2", "--t", "2", "--q", "3"});
    CHECK(small_modulus.code == 2);

    CliRun missing = run({"retrieve", "--n", "4", "--m", "2"});
    CHECK(missing.code == 2);

    CliRun unknown = run({"frobnicate"});
    CHECK(unknown.code == 2);

    CliRun bad_mode = run({"audit", "--n", "2", "--m", "1", "--t", "1", "--mode", "bogus"});
    CHECK(bad_mode.code == 2);

    CliRun bad_set = run({"audit", "--n", "4", "--m", "2", "--t", "2", "--mode", "entropy",
                          "--set-size", "9"});
    CHECK(bad_set.code == 2);
}

TEST_CASE("help exits cleanly") {
    CliRun r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "retrieve"));
    CHECK(contains(r.out, "audit"));
    CHECK(contains(r.out, "sweep"));
}

TEST_CASE("audits report pass and fail through exit codes") {
    CliRun db_ok = run({"audit", "--n", "2", "--m", "1", "--t", "1", "--mode", "db"});
    CHECK(db_ok.code == 0);
    CHECK(contains(db_ok.out, "database-privacy audit: PASS"));
    CHECK(contains(db_ok.out, "events enumerated: 486"));

    CliRun user_ok = run({"audit", "--n", "2", "--m", "1", "--t", "1", "--mode", "user"});
    CHECK(user_ok.code == 0);
    CHECK(contains(user_ok.out, "user-privacy audit: PASS"));
    CHECK(contains(user_ok.out, "events enumerated: 972"));

    CliRun structural = run({"audit", "--n", "8", "--m", "3", "--t", "2", "--mode", "user",
                             "--structural"});
    CHECK(structural.code == 0);
    CHECK(contains(structural.out, "user-privacy audit: PASS"));

    CliRun entropy = run({"audit", "--n", "2", "--m", "1", "--t", "1", "--mode", "entropy"});
    CHECK(entropy.code == 0);
    CHECK(contains(entropy.out, "entropy-symmetry audit: PASS"));
    CHECK(contains(entropy.out, "= 1 log-q units"));

    CliRun broken = run({"audit", "--n", "2", "--m", "1", "--t", "1", "--mode", "db",
                         "--mutant", "no-mask"});
    CHECK(broken.code == 1);
    CHECK(contains(broken.out, "database-privacy audit: FAIL"));
    CHECK(contains(broken.out, "witness:"));
    CHECK(contains(broken.out, "mutual information"));

    CliRun leaky = run({"audit", "--n", "2", "--m", "1", "--t", "1", "--mode", "user",
                        "--mutant", "no-randomization"});
    CHECK(leaky.code == 1);
    CHECK(contains(leaky.out, "user-privacy audit: FAIL"));
}

TEST_CASE("oversized enumerations exit with code 3") {
    CliRun r = run({"audit", "--n", "4", "--m", "2", "--t", "2", "--mode", "db"});
    CHECK(r.code == 3);
    CHECK(contains(r.err, "enumeration"));
}

TEST_CASE("codes audit reports the structural facts") {
    CliRun r = run({"audit", "--n", "4", "--m", "2", "--t", "2", "--mode", "codes"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "storage code MDS: pass"));
    CHECK(contains(r.out, "query code MDS: pass"));
    CHECK(contains(r.out, "componentwise-product dimension: 3 (expected 3): pass"));
}

TEST_CASE("sweep emits the full grid as CSV") {
    std::string path = "cli_sweep_test.csv";
    CliRun r = run({"sweep", "--out", path});
    CHECK(r.code == 0);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    in.close();
    std::remove(path.c_str());

    REQUIRE(lines.size() == 85);  // header + one row per (N,M,T) with 2<=N<=8
    CHECK(lines[0] == "N,M,T,K,q,capacity,achieved_rate,secrecy_bound,achieved_secrecy,decode_ok");
    bool found_pinned = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<std::string> cells;
        std::istringstream row(lines[i]);
        for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
        REQUIRE(cells.size() == 10);
        CAPTURE(lines[i]);
        CHECK(cells[5] == cells[6]);  // achieved rate meets capacity exactly
        CHECK(cells[7] == cells[8]);  // achieved secrecy meets the bound exactly
        CHECK(cells[9] == "true");
        if (lines[i] == "4,2,2,2,5,1/4,1/4,3,3,true") found_pinned = true;
    }
    CHECK(found_pinned);
}

TEST_CASE("sweep to stdout uses the same format") {
    CliRun r = run({"sweep", "--n-min", "2", "--n-max", "2"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "N,M,T,K,q,capacity"));
    CHECK(contains(r.out, "2,1,1,2,3,1/2,1/2,1,1,true"));
}
