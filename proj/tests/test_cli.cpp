#include <catch2/catch_amalgamated.hpp>

#include <bpmc/cli.hpp>
#include <bpmc/io.hpp>

#include <cstdio>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <sstream>

#include "util.hpp"

using namespace bpmc;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    CliResult r;
    r.code = run_cli(std::move(args), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string sample(const std::string& name) { return testutil::samples_dir() + "/" + name; }

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("verdicts on the sample instances") {
    CliResult r = cli({"check", "ltl1", "--bp", sample("intro.bp"), "--ltl", "F D"});
    CHECK(r.code == 0);
    CHECK(r.out.find("answer: NO") != std::string::npos);
    CHECK(r.out.find("witness:") != std::string::npos);

    r = cli({"check", "ltl1", "--bp", sample("intro_swapped.bp"), "--ltl", "F D"});
    CHECK(r.code == 0);
    CHECK(r.out.find("answer: YES") != std::string::npos);

    r = cli({"check", "finite1", "--bp", sample("critical_gw.bp")});
    CHECK(r.code == 0);
    CHECK(r.out.find("answer: YES") != std::string::npos);

    r = cli({"check", "reach1", "--bp", sample("intro.bp"), "--targets", "D"});
    CHECK(r.code == 0);
    CHECK(r.out.find("answer: NO") != std::string::npos);

    r = cli({"check", "nba1", "--bp", sample("ts.bp"), "--aut", sample("inf_y.nba")});
    CHECK(r.code == 0);
    CHECK(r.out.find("answer: YES") != std::string::npos);

    r = cli({"check", "dpa1", "--bp", sample("intro_swapped.bp"), "--aut",
             sample("eventually_d.dpa")});
    CHECK(r.code == 0);
    CHECK(r.out.find("answer: YES") != std::string::npos);
}

TEST_CASE("exit codes") {
    // NO is an answer, not an error
    CHECK(cli({"check", "ltl1", "--bp", sample("intro.bp"), "--ltl", "F D"}).code == 0);
    // unless the caller asks for a signal
    CHECK(cli({"check", "ltl1", "--bp", sample("intro.bp"), "--ltl", "F D", "--fail-on-no"})
              .code == 1);
    CHECK(cli({"check", "ltl1", "--bp", sample("intro_swapped.bp"), "--ltl", "F D",
               "--fail-on-no"})
              .code == 0);
    // usage problems
    CHECK(cli({}).code == 2);
    CHECK(cli({"check", "ltl1", "--bp", sample("intro.bp")}).code == 2);  // missing --ltl
    CHECK(cli({"check", "nosuch", "--bp", sample("intro.bp")}).code == 2);
    CHECK(cli({"check", "ltl1", "--bp", "/nonexistent.bp", "--ltl", "F D"}).code == 2);
    CHECK(cli({"check", "ltl1", "--bp", sample("intro.bp"), "--ltl", "F ("}).code == 2);
    // budget exhaustion is distinguishable
    CliResult r = cli({"translate", "nba2dpa", "--aut", sample("inf_y.nba"), "--budget", "1"});
    CHECK(r.code == 3);
    CHECK(r.err.find("exceeded") != std::string::npos);
    // help goes to stdout and succeeds
    r = cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("check") != std::string::npos);
}

TEST_CASE("json reports") {
    CliResult r = cli({"check", "ltl1", "--bp", sample("intro.bp"), "--ltl", "F D", "--json"});
    REQUIRE(r.code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["version"] == 1);
    CHECK(j["problem"] == "ltl1");
    CHECK(j["answer"] == "NO");
    CHECK(j["route"] == "negate+uba-anchors");
    CHECK(j["witness"].is_string());
    CHECK(j["timings"]["total_ms"].is_number());

    // identical runs give identical reports apart from timings
    CliResult r2 = cli({"check", "ltl1", "--bp", sample("intro.bp"), "--ltl", "F D", "--json"});
    nlohmann::json j2 = nlohmann::json::parse(r2.out);
    j.erase("timings");
    j2.erase("timings");
    CHECK(j.dump() == j2.dump());

    // YES reports carry no witness
    r = cli({"check", "finite1", "--bp", sample("critical_gw.bp"), "--json"});
    j = nlohmann::json::parse(r.out);
    CHECK(j["answer"] == "YES");
    CHECK(!j.contains("witness"));
}

TEST_CASE("formula translation round trip") {
    std::string out_path = temp_path("bpmc_test_uba.nba");
    CliResult r = cli({"translate", "ltl2uba", "--ltl", "G F a", "--alphabet", "a,b", "-o",
                       out_path});
    REQUIRE(r.code == 0);
    Nba n = parse_nba(read_file(out_path));
    CHECK(n.alphabet == std::vector<std::string>{"a", "b"});
    CHECK(check_unambiguous(n).unambiguous);
    CHECK(lasso_membership(n, {}, {0, 1}));   // (a b)^w has a infinitely often
    CHECK(!lasso_membership(n, {0}, {1}));    // a b^w does not
    std::remove(out_path.c_str());

    // without -o the automaton lands on stdout
    r = cli({"translate", "ltl2uba", "--ltl", "F b", "--alphabet", "a,b"});
    REQUIRE(r.code == 0);
    Nba m = parse_nba(r.out);
    CHECK(check_unambiguous(m).unambiguous);
}

TEST_CASE("automaton determinisation output") {
    std::string out_path = temp_path("bpmc_test_det.dpa");
    CliResult r = cli({"translate", "nba2dpa", "--aut", sample("inf_y.nba"), "-o", out_path});
    REQUIRE(r.code == 0);
    Dpa d = parse_dpa(read_file(out_path));
    CHECK(lasso_membership(d, {}, {1}));
    CHECK(!lasso_membership(d, {1}, {0}));
    std::remove(out_path.c_str());
}

TEST_CASE("simulation and fixpoint output") {
    CliResult r = cli({"simulate", "--bp", sample("intro_swapped.bp"), "--targets", "D",
                       "--depth", "8", "--samples", "500", "--seed", "7"});
    REQUIRE(r.code == 0);
    std::istringstream is(r.out);
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "depth,rate");
    int rows = 0;
    double last = -1;
    while (std::getline(is, line)) {
        auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        CHECK(std::stoi(line.substr(0, comma)) == rows);
        double rate = std::stod(line.substr(comma + 1));
        CHECK(rate >= last);
        last = rate;
        ++rows;
    }
    CHECK(rows == 9);
    // same seed, same output
    CHECK(cli({"simulate", "--bp", sample("intro_swapped.bp"), "--targets", "D", "--depth", "8",
               "--samples", "500", "--seed", "7"})
              .out == r.out);

    r = cli({"prob", "--bp", sample("intro.bp"), "--targets", "D", "--iters", "300"});
    REQUIRE(r.code == 0);
    std::istringstream ps(r.out);
    REQUIRE(std::getline(ps, line));
    CHECK(line == "iter,type,value");
    // the B column converges to 2/3
    double b_last = 0;
    while (std::getline(ps, line)) {
        if (line.find(",B,") != std::string::npos)
            b_last = std::stod(line.substr(line.rfind(',') + 1));
    }
    CHECK(std::abs(b_last - 2.0 / 3.0) < 1e-9);
}

TEST_CASE("instance generators write loadable files") {
    std::string base = temp_path("bpmc_test_gen");
    CliResult r = cli({"gen", "circuit", "--circuit", sample("and_or.circuit"), "-o", base});
    REQUIRE(r.code == 0);
    BranchingProcess bp = parse_bp(read_file(base + ".bp"));
    CHECK(validate_bp(bp).empty());
    Dpa d = parse_dpa(read_file(base + ".dpa"));
    CHECK(d.alphabet == bp.types);
    std::remove((base + ".bp").c_str());
    std::remove((base + ".dpa").c_str());

    r = cli({"gen", "atm", "--atm", sample("tiny.atm"), "--word", "a,a", "--variant", "nba0",
             "-o", base});
    REQUIRE(r.code == 0);
    BranchingProcess abp = parse_bp(read_file(base + ".bp"));
    CHECK(validate_bp(abp).empty());
    CHECK(abp.n_types() == 23);
    Nba n = parse_nba(read_file(base + ".nba"));
    CHECK(n.n_states() == 5);
    std::remove((base + ".bp").c_str());
    std::remove((base + ".nba").c_str());

    CHECK(cli({"gen", "atm", "--atm", sample("tiny.atm"), "--word", "a,a", "--variant", "bogus",
               "-o", base})
              .code == 2);
}
