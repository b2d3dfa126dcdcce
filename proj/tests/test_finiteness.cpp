#include <catch2/catch_amalgamated.hpp>

#include <bpmc/finiteness.hpp>
#include <bpmc/io.hpp>

#include "util.hpp"

using namespace bpmc;

namespace {

BranchingProcess load(const std::string& name) {
    BranchingProcess bp = parse_bp(read_file(testutil::samples_dir() + "/" + name));
    REQUIRE(validate_bp(bp).empty());
    return bp;
}

std::vector<bool> target_set(const BranchingProcess& bp, const std::vector<std::string>& names) {
    std::vector<bool> t(bp.n_types(), false);
    for (const auto& n : names) t[bp.find_type(n)] = true;
    return t;
}

// Slow reachability oracle for single-child processes: such a process is a
// Markov chain, and the branch reaches a target almost surely iff after
// making targets absorbing every reachable bottom SCC contains a target.
bool chain_reach_oracle(const BranchingProcess& bp, const std::vector<bool>& targets) {
    int n = bp.n_types();
    Digraph g(n);
    for (const auto& group : bp.rules)
        for (const auto& r : group) {
            if (targets[r.lhs]) continue;  // absorbing: stop expanding at targets
            for (int y : r.rhs) g.add_edge(r.lhs, y);
        }
    SccDecomposition scc = scc_decompose(g);
    // reachable set from start in the pruned graph
    std::vector<bool> reach(n, false);
    std::vector<int> stack = {bp.start};
    reach[bp.start] = true;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int y : g.adj[x])
            if (!reach[y]) {
                reach[y] = true;
                stack.push_back(y);
            }
    }
    for (int c = 0; c < (int)scc.components.size(); ++c) {
        const auto& members = scc.components[c];
        if (!reach[members[0]]) continue;
        bool bottom = true;
        for (int x : members)
            for (int y : g.adj[x])
                if (scc.comp_of[y] != c) bottom = false;
        if (!bottom) continue;
        bool has_target = false;
        for (int x : members)
            if (targets[x]) has_target = true;
        if (!has_target) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("scc classification") {
    BranchingProcess intro = load("intro.bp");
    int I = intro.find_type("I"), B = intro.find_type("B"), D = intro.find_type("D");
    CHECK(classify_scc(intro, {I}) == SccClass::Linear);
    CHECK(classify_scc(intro, {B}) == SccClass::Supercritical);
    CHECK(classify_scc(intro, {D}) == SccClass::Linear);

    BranchingProcess ts = load("ts.bp");
    std::vector<int> xy = {ts.find_type("X"), ts.find_type("Y")};
    std::sort(xy.begin(), xy.end());
    CHECK(classify_scc(ts, xy) == SccClass::Supercritical);

    // critical binary branching: rho equal but proper branching, so neither
    BranchingProcess gw = load("critical_gw.bp");
    CHECK(classify_scc(gw, {gw.find_type("X")}) == SccClass::Neither);
}

TEST_CASE("finiteness verdicts") {
    CHECK(almost_surely_finite(load("critical_gw.bp")).finite);
    CHECK(!almost_surely_finite(load("supercritical_gw.bp")).finite);

    BranchingProcess intro = load("intro.bp");
    FinitenessResult r = almost_surely_finite(intro);
    REQUIRE(!r.finite);
    REQUIRE(r.witness.has_value());
    // callees first: the terminal D loop comes before I or B
    CHECK(r.witness->scc == std::vector<int>{intro.find_type("D")});
    CHECK(r.witness->cls == SccClass::Linear);

    CHECK(!almost_surely_finite(load("ts.bp")).finite);
}

TEST_CASE("reach verdicts") {
    BranchingProcess intro = load("intro.bp");
    CHECK(!almost_surely_reach(intro, target_set(intro, {"D"})).finite);
    // start inside the target set short-circuits to yes
    CHECK(almost_surely_reach(intro, target_set(intro, {"I"})).finite);

    BranchingProcess sw = load("intro_swapped.bp");
    CHECK(almost_surely_reach(sw, target_set(sw, {"D"})).finite);

    BranchingProcess rem = load("remark.bp");
    CHECK(!almost_surely_reach(rem, target_set(rem, {"Z"})).finite);

    // every branch of ts passes through Y at depth one
    BranchingProcess ts = load("ts.bp");
    CHECK(almost_surely_reach(ts, target_set(ts, {"Y"})).finite);
}

namespace {

// Like testutil::random_bp but with empty right-hand sides allowed, so both
// finiteness outcomes actually occur.
BranchingProcess random_eps_bp(testutil::Rng& rng, int max_types) {
    int n = testutil::pick(rng, 1, max_types);
    BranchingProcess bp;
    bp.eps_allowed = true;
    for (int i = 0; i < n; ++i) bp.add_type("T" + std::to_string(i));
    for (int t = 0; t < n; ++t) {
        int k = testutil::pick(rng, 1, 3);
        std::vector<int> num(k);
        int total = 0;
        for (int i = 0; i < k; ++i) total += num[i] = testutil::pick(rng, 1, 4);
        for (int i = 0; i < k; ++i) {
            std::vector<int> rhs;
            int len = testutil::pick(rng, 0, 2);
            for (int j = 0; j < len; ++j) rhs.push_back(testutil::pick(rng, 0, n - 1));
            bp.add_rule(t, Rational(num[i]) / total, std::move(rhs));
        }
    }
    bp.start = testutil::pick(rng, 0, n - 1);
    return bp;
}

}  // namespace

TEST_CASE("erasing types preserves finiteness") {
    // pruning subtrees can only shrink the tree, never revive an infinite one
    testutil::Rng rng(761);
    int finite_seen = 0;
    for (int round = 0; round < 50; ++round) {
        BranchingProcess bp = random_eps_bp(rng, 5);
        REQUIRE(validate_bp(bp).empty());
        bool fin = almost_surely_finite(bp).finite;
        if (fin) ++finite_seen;
        std::vector<bool> t(bp.n_types(), false);
        t[testutil::pick(rng, 0, bp.n_types() - 1)] = true;
        if (t[bp.start]) continue;
        bool fin2 = almost_surely_finite(erase_types(bp, t)).finite;
        if (fin) CHECK(fin2);
    }
    CHECK(finite_seen > 0);  // the generator must exercise both outcomes
}

TEST_CASE("chain processes agree with the markov chain oracle") {
    testutil::Rng rng(9917);
    int yes = 0, no = 0;
    for (int round = 0; round < 100; ++round) {
        BranchingProcess bp = testutil::random_chain_bp(rng, 5);
        std::vector<bool> t(bp.n_types(), false);
        int k = testutil::pick(rng, 1, 2);
        for (int j = 0; j < k; ++j) t[testutil::pick(rng, 0, bp.n_types() - 1)] = true;
        bool got = almost_surely_reach(bp, t).finite;
        bool want = chain_reach_oracle(bp, t);
        INFO("round " << round);
        CHECK(got == want);
        (want ? yes : no)++;
    }
    CHECK(yes > 10);
    CHECK(no > 10);
}
