#include <catch2/catch_amalgamated.hpp>

#include <bpmc/bp.hpp>

#include "util.hpp"

using namespace bpmc;

namespace {

BranchingProcess intro() {
    BranchingProcess bp;
    int i = bp.add_type("I"), b = bp.add_type("B"), d = bp.add_type("D");
    bp.add_rule(i, Rational(9, 10), {i});
    bp.add_rule(i, Rational(1, 10), {i, b});
    bp.add_rule(b, Rational(1, 5), {d});
    bp.add_rule(b, Rational(1, 2), {b});
    bp.add_rule(b, Rational(3, 10), {b, b});
    bp.add_rule(d, Rational(1), {d});
    bp.start = i;
    return bp;
}

}  // namespace

TEST_CASE("validate_bp accepts the two-phase example") {
    CHECK(validate_bp(intro()).empty());
}

TEST_CASE("validate_bp flags broken processes") {
    BranchingProcess bp;
    int x = bp.add_type("X");
    int y = bp.add_type("Y");
    bp.add_rule(x, Rational(1, 2), {y});  // sums to 1/2 only
    std::vector<Violation> v = validate_bp(bp);
    bool sum = false, norules = false;
    for (const Violation& w : v) {
        if (w.code == "ProbabilitySumMismatch") sum = true;
        if (w.code == "NoRulesForType") norules = true;
    }
    CHECK(sum);
    CHECK(norules);  // Y has none

    BranchingProcess e;
    int z = e.add_type("Z");
    e.add_rule(z, Rational(1), {});
    bool eps = false;
    for (const Violation& w : validate_bp(e))
        if (w.code == "EmptyRhsWithoutEps") eps = true;
    CHECK(eps);
    e.eps_allowed = true;
    CHECK(validate_bp(e).empty());
}

TEST_CASE("mean matrix counts expected children by type") {
    BranchingProcess bp = intro();
    RationalMatrix m = mean_matrix(bp);
    CHECK(m.at(0, 0) == Rational(1));       // I keeps exactly one I on average
    CHECK(m.at(0, 1) == Rational(1, 10));   // and gains a B a tenth of the time
    CHECK(m.at(1, 1) == Rational(11, 10));  // 1/2 + 2 * 3/10
    CHECK(m.at(1, 2) == Rational(1, 5));
    CHECK(m.at(2, 2) == Rational(1));
    CHECK(m.at(1, 0) == Rational(0));
    CHECK(m.keys[0] == "I");
}

TEST_CASE("successor graph and reachability") {
    BranchingProcess bp = intro();
    Digraph g = successor_graph(bp);
    CHECK(g.has_edge(0, 0));
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 2));
    CHECK(!g.has_edge(2, 1));
    std::vector<bool> reach = reachable_types(bp);
    CHECK(reach == std::vector<bool>{true, true, true});

    bp.start = 2;  // from D only D is reachable
    reach = reachable_types(bp);
    CHECK(reach == std::vector<bool>{false, false, true});
}

TEST_CASE("restrict_to_scc keeps only in-component occurrences") {
    BranchingProcess bp = intro();
    BranchingProcess sub = restrict_to_scc(bp, {1}, 1);
    REQUIRE(sub.n_types() == 1);
    CHECK(sub.types[0] == "B");
    CHECK(sub.eps_allowed);
    REQUIRE(sub.rules[0].size() == 3);
    CHECK(sub.rules[0][0].rhs.empty());                      // D dropped
    CHECK(sub.rules[0][1].rhs == std::vector<int>{0});       // B
    CHECK(sub.rules[0][2].rhs == std::vector<int>{0, 0});    // B B
    CHECK(validate_bp(sub).empty());

    CHECK_THROWS_AS(restrict_to_scc(bp, {0, 1}, 0), Error);  // not an SCC
    CHECK_THROWS_AS(restrict_to_scc(bp, {1}, 0), Error);     // start outside
}

TEST_CASE("erase_types drops target occurrences and guards the start") {
    BranchingProcess bp = intro();
    std::vector<bool> t = type_set(bp, {2});
    BranchingProcess erased = erase_types(bp, t);
    CHECK(erased.n_types() == bp.n_types());  // table kept, D just unreachable
    CHECK(erased.eps_allowed);
    REQUIRE(erased.rules[1].size() == 3);
    CHECK(erased.rules[1][0].rhs.empty());  // B -> D became an erasing rule
    CHECK(!reachable_types(erased)[2]);
    CHECK(validate_bp(erased).empty());

    std::vector<bool> s = type_set(bp, {0});
    CHECK_THROWS_AS(erase_types(bp, s), Error);  // start may not be erased
}

TEST_CASE("random processes validate and stay consistent under erasure") {
    testutil::Rng rng(99);
    for (int i = 0; i < 100; ++i) {
        BranchingProcess bp = testutil::random_bp(rng, 5);
        CHECK(validate_bp(bp).empty());
        if (bp.n_types() > 1) {
            std::vector<bool> mask(bp.n_types(), false);
            mask[bp.n_types() - 1] = bp.n_types() - 1 != bp.start;
            if (mask[bp.n_types() - 1]) {
                BranchingProcess e = erase_types(bp, mask);
                CHECK(validate_bp(e).empty());
                CHECK(!reachable_types(e)[bp.n_types() - 1]);
            }
        }
    }
}
