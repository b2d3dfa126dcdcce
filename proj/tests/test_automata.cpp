#include <catch2/catch_amalgamated.hpp>

#include <bpmc/automata.hpp>
#include <bpmc/io.hpp>

#include "util.hpp"

using namespace bpmc;
using testutil::samples_dir;

namespace {

Nba inf_y() { return parse_nba(read_file(samples_dir() + "/inf_y.nba")); }

BranchingProcess ts() { return parse_bp(read_file(samples_dir() + "/ts.bp")); }

}  // namespace

TEST_CASE("trim_useful drops states off accepting cycles") {
    Nba a;
    a.alphabet = {"x"};
    a.add_state("live", false);
    a.add_state("acc", true);
    a.add_state("dead", false);     // reachable, no accepting cycle ahead
    a.add_state("island", true);    // unreachable
    a.add_transition(0, 0, 1);
    a.add_transition(1, 0, 1);
    a.add_transition(0, 0, 2);
    a.initial = {0};
    TrimResult r = trim_useful(a);
    CHECK(r.aut.states == std::vector<std::string>{"live", "acc"});
    CHECK(r.removed == std::vector<std::string>{"dead", "island"});
    CHECK(r.kept == std::vector<int>{0, 1});
    CHECK(r.aut.initial == std::vector<int>{0});
}

TEST_CASE("trimming an empty-language automaton leaves nothing") {
    Nba a;
    a.alphabet = {"x"};
    a.add_state("q", false);
    a.add_transition(0, 0, 0);
    a.initial = {0};
    TrimResult r = trim_useful(a);
    CHECK(r.aut.states.empty());
    CHECK(r.removed == std::vector<std::string>{"q"});
}

TEST_CASE("deterministic automata are unambiguous") {
    CHECK(check_unambiguous(inf_y()).unambiguous);
}

TEST_CASE("a duplicated component is flagged ambiguous with a witness") {
    Nba a;
    a.alphabet = {"x"};
    a.add_state("p", true);
    a.add_state("q", true);
    a.add_transition(0, 0, 0);
    a.add_transition(1, 0, 1);
    a.initial = {0, 1};
    UnambiguityResult r = check_unambiguous(a);
    REQUIRE(!r.unambiguous);
    REQUIRE(r.witness.has_value());
    // the witness lasso really does admit two accepting runs
    CHECK(lasso_membership(a, r.witness->stem, r.witness->cycle));
}

TEST_CASE("nondeterministic choice that always rejoins is ambiguous") {
    // two accepting runs for x^w: stay at 0 forever, or hop to 1 and back
    Nba a;
    a.alphabet = {"x"};
    a.add_state("p", true);
    a.add_state("r", true);
    a.add_transition(0, 0, 0);
    a.add_transition(0, 0, 1);
    a.add_transition(1, 0, 0);
    a.initial = {0};
    CHECK(!check_unambiguous(a).unambiguous);
}

TEST_CASE("lasso membership for Buchi and parity automata") {
    Nba a = inf_y();
    CHECK(lasso_membership(a, {}, {0, 1}));      // (XY)^w has Y infinitely often
    CHECK(!lasso_membership(a, {1, 1}, {0}));    // YYX^w does not
    CHECK(lasso_membership(a, {0, 0}, {1}));
    CHECK_THROWS_AS(lasso_membership(a, {0}, {}), Error);

    Dpa d = parse_dpa(read_file(samples_dir() + "/eventually_d.dpa"));
    CHECK(lasso_membership(d, {2}, {0}));        // D I^w contains a D
    CHECK(lasso_membership(d, {0, 1}, {2}));
    CHECK(!lasso_membership(d, {0, 1}, {0, 1}));
    CHECK_THROWS_AS(lasso_membership(d, {}, std::vector<int>{}), Error);
}

TEST_CASE("product pairs automaton states with spawned types") {
    BranchingProcess bp = ts();
    Nba a = inf_y();
    BpProduct p = product_with_bp(a, bp);
    CHECK(p.n_aut_states == 2);
    CHECK(p.n_types == 2);
    CHECK(p.aut.alphabet == bp.types);
    // initial: automaton initials paired with the start type, still unread
    REQUIRE(p.aut.initial.size() == 1);
    CHECK(p.aut.initial[0] == p.pair_index(0, 0));  // (q0, X)
    // (q0, X) -Y-> (q0, Y): reading X loops q0, the child carries type Y
    CHECK(p.aut.delta[p.pair_index(0, 0)][1] == std::vector<int>{p.pair_index(0, 1)});

    BranchingProcess other = parse_bp(read_file(samples_dir() + "/intro.bp"));
    CHECK_THROWS_AS(product_with_bp(a, other), Error);  // alphabet mismatch
}

TEST_CASE("anchors are accepting product states on cycles") {
    BpProduct p = product_with_bp(inf_y(), ts());
    std::vector<int> anchors = accepting_anchor_pairs(p);
    // accepting pairs are (q1, X) and (q1, Y); both sit on cycles
    CHECK(anchors == std::vector<int>{p.pair_index(1, 0), p.pair_index(1, 1)});
}

TEST_CASE("the anchor component automaton accepts its cycle language") {
    BpProduct p = product_with_bp(inf_y(), ts());
    AnchorScc s = build_afxf(p, p.pair_index(1, 1));
    CHECK(s.members.size() == 3);  // (q0,X) cannot be re-entered
    Nba a = anchor_scc_to_nba(s);
    CHECK(check_unambiguous(a).unambiguous);
    // words starting with the anchor type Y whose run revisits (q1,Y) forever
    CHECK(lasso_membership(a, {}, {1}));
    CHECK(lasso_membership(a, {}, {1, 0, 1}));
    CHECK(!lasso_membership(a, {}, {0, 1}));
    CHECK(!lasso_membership(a, {1}, {0}));

    CHECK_THROWS_AS(build_afxf(p, p.pair_index(0, 0)), Error);  // not accepting
}

TEST_CASE("subset construction tracks surviving run sets") {
    BranchingProcess tsbp = ts();
    BpProduct p = product_with_bp(inf_y(), tsbp);
    AnchorScc s = build_afxf(p, p.pair_index(1, 1));
    BdetBp det = subset_construct_bdet(s, tsbp);
    CHECK(validate_bp(det.bp).empty());
    CHECK(det.bp.types[det.sink] == "EMPTY");
    CHECK(det.subsets[det.sink].empty());
    // sink absorbs
    REQUIRE(det.bp.rules[det.sink].size() == 1);
    CHECK(det.bp.rules[det.sink][0].rhs == std::vector<int>{det.sink});
    // start subset is the anchor alone
    const std::vector<int>& start_set = det.subsets[det.bp.start];
    REQUIRE(start_set.size() == 1);
    CHECK(s.members[start_set[0]] == s.anchor);
}
