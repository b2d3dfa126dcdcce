#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "automata.hpp"
#include "bp.hpp"
#include "determinize.hpp"
#include "errors.hpp"
#include "finiteness.hpp"
#include "ltl.hpp"
#include "matrix.hpp"

namespace bpmc {

struct Verdict {
    bool answer = false;
    std::string route;
    std::string witness;  // nonempty exactly when the answer is NO
    std::optional<std::string> anchor;
    std::optional<Trichotomy> rho;
    std::optional<bool> proper_branching;
    std::optional<std::string> offending_type;
};

namespace detail {

// Smallest failing index among 0..n-1, or -1; fn(i) == true means fail.
// Deterministic under concurrency: indices are claimed in ascending order and
// an index is skipped only when a smaller failure or error is already known,
// so the minimum failing index (and the smallest-index exception, when it
// precedes every failure) is always found.
inline int parallel_min_fail(int n, int jobs, const std::function<bool(int)>& fn) {
    if (n <= 0) return -1;
    jobs = std::min(std::max(jobs, 1), n);
    if (jobs == 1) {
        for (int i = 0; i < n; ++i)
            if (fn(i)) return i;
        return -1;
    }
    std::atomic<int> next{0}, min_fail{n}, min_err{n};
    std::vector<std::exception_ptr> errs(n);
    auto lower = [](std::atomic<int>& a, int i) {
        int cur = a.load();
        while (i < cur && !a.compare_exchange_weak(cur, i)) {
        }
    };
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n) return;
            if (i > min_fail.load() || i > min_err.load()) continue;
            try {
                if (fn(i)) lower(min_fail, i);
            } catch (...) {
                errs[i] = std::current_exception();
                lower(min_err, i);
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    int f = min_fail.load(), e = min_err.load();
    if (e < f) std::rethrow_exception(errs[e]);
    return f == n ? -1 : f;
}

inline std::string join_names(const BranchingProcess& bp, const std::vector<int>& ts) {
    std::string s = "{";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (i) s += ",";
        s += bp.types[ts[i]];
    }
    return s + "}";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Almost sure finiteness / reachability, wrapped as verdicts.

inline Verdict check_finite_one(const BranchingProcess& bp) {
    FinitenessResult r = almost_surely_finite(bp);
    Verdict v;
    v.answer = r.finite;
    v.route = "scc-classification";
    if (!r.finite) {
        v.witness = "reachable " + std::string(to_string(r.witness->cls)) + " scc " +
                    detail::join_names(bp, r.witness->scc);
    }
    return v;
}

inline Verdict check_reach_one(const BranchingProcess& bp, const std::vector<bool>& targets) {
    FinitenessResult r = almost_surely_reach(bp, targets);
    Verdict v;
    v.answer = r.finite;
    v.route = "erase+scc-classification";
    if (!r.finite) {
        v.witness = "after erasing targets, " + std::string(to_string(r.witness->cls)) +
                    " scc " + detail::join_names(bp, r.witness->scc) + " survives";
    }
    return v;
}

// ---------------------------------------------------------------------------
// Deterministic parity route.

// Product process whose type (X, q) records the automaton state q reached
// after reading X, so the parity condition reads directly off branch types.
struct ParityProduct {
    BranchingProcess bp;
    std::vector<int> base_type;  // original type per product type
    std::vector<int> aut_state;  // DPA state after reading it
    std::vector<int> priority;   // = dpa.priority[aut_state]
};

inline ParityProduct build_parity_product(const BranchingProcess& bp, const Dpa& dpa) {
    if (dpa.alphabet != bp.types)
        throw Error("AlphabetMismatch", "automaton alphabet must equal the process type table");
    for (int q = 0; q < dpa.n_states(); ++q)
        for (int a = 0; a < dpa.n_letters(); ++a)
            if (dpa.next[q][a] < 0)
                throw Error("PartialDpa", "parity automaton transitions must be total");

    ParityProduct pp;
    pp.bp.eps_allowed = bp.eps_allowed;
    std::map<std::pair<int, int>, int> id;
    std::vector<std::pair<int, int>> work;
    auto intern = [&](int x, int q) {
        auto it = id.find({x, q});
        if (it != id.end()) return it->second;
        int t = pp.bp.add_type("(" + bp.types[x] + "," + dpa.states[q] + ")");
        pp.base_type.push_back(x);
        pp.aut_state.push_back(q);
        pp.priority.push_back(dpa.priority[q]);
        id.emplace(std::make_pair(x, q), t);
        work.push_back({x, q});
        return t;
    };
    pp.bp.start = intern(bp.start, dpa.next[dpa.initial][bp.start]);
    for (std::size_t w = 0; w < work.size(); ++w) {
        auto [x, q] = work[w];
        int t = id[{x, q}];
        for (const Rule& r : bp.rules[x]) {
            std::vector<int> rhs;
            rhs.reserve(r.rhs.size());
            for (int y : r.rhs) rhs.push_back(intern(y, dpa.next[q][y]));
            pp.bp.add_rule(t, r.prob, std::move(rhs));
        }
    }
    return pp;
}

// P(every branch parity-accepted) = 1. A branch fails iff some odd priority
// is the highest one seen infinitely often, i.e. iff from some occurrence of
// an odd-priority type Z it keeps revisiting Z without ever exceeding Z's
// priority c. So for every such Z we require that almost surely every branch
// restarted at Z reaches N_Z: the types of priority above c together with the
// types that cannot reach Z again inside the priority-at-most-c subgraph.
inline Verdict check_dpa_one(const BranchingProcess& bp, const Dpa& dpa, int jobs = 1) {
    ParityProduct pp = build_parity_product(bp, dpa);
    int n = pp.bp.n_types();
    std::vector<int> odd;
    for (int t = 0; t < n; ++t)
        if (pp.priority[t] % 2 == 1) odd.push_back(t);

    Digraph rev = successor_graph(pp.bp).reversed();
    auto n_set = [&](int z) {
        int c = pp.priority[z];
        std::vector<bool> can_reach(n, false);
        std::vector<int> stack{z};
        can_reach[z] = true;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : rev.adj[u])
                if (!can_reach[v] && pp.priority[v] <= c) {
                    can_reach[v] = true;
                    stack.push_back(v);
                }
        }
        std::vector<bool> mask(n, false);
        for (int y = 0; y < n; ++y) mask[y] = pp.priority[y] > c || !can_reach[y];
        return mask;
    };
    auto fails = [&](int i) {
        BranchingProcess restarted = pp.bp;
        restarted.start = odd[i];
        return !almost_surely_reach(restarted, n_set(odd[i])).finite;
    };

    Verdict v;
    v.route = "parity-product";
    int bad = detail::parallel_min_fail(static_cast<int>(odd.size()), jobs, fails);
    if (bad == -1) {
        v.answer = true;
        return v;
    }
    int z = odd[bad];
    BranchingProcess restarted = pp.bp;
    restarted.start = z;
    FinitenessResult r = almost_surely_reach(restarted, n_set(z));
    v.answer = false;
    v.offending_type = pp.bp.types[z];
    v.witness = "from " + pp.bp.types[z] + " (odd priority " + std::to_string(pp.priority[z]) +
                ") some branch evades progress forever: " +
                std::string(to_string(r.witness->cls)) + " scc " +
                detail::join_names(pp.bp, r.witness->scc);
    return v;
}

// ---------------------------------------------------------------------------
// Unambiguous route: spectral analysis of each anchor's SCC.

struct AnchorReport {
    int anchor = 0;  // product state index
    std::string name;
    Trichotomy rho = Trichotomy::Less;
    bool proper = false;    // some rule spawns two children extending the SCC
    bool positive = false;  // accepted branch from this anchor with prob > 0
};

namespace detail {

inline AnchorReport analyze_anchor_spectral(const BpProduct& prod, const BranchingProcess& bp,
                                            const RationalMatrix& mean, int anchor) {
    AnchorScc s = build_afxf(prod, anchor);
    int k = static_cast<int>(s.members.size());
    RationalMatrix m(k);
    for (int i = 0; i < k; ++i)
        for (int l = 0; l < prod.aut.n_letters(); ++l)
            for (int j : s.edges[i][l]) m.at(i, j) = mean.at(s.member_type[i], s.member_type[j]);

    AnchorReport rep;
    rep.anchor = anchor;
    rep.name = prod.aut.states[anchor];
    rep.rho = rho_trichotomy_irreducible(m);
    for (int i = 0; i < k && !rep.proper; ++i) {
        for (const Rule& r : bp.rules[s.member_type[i]]) {
            int live = 0;
            for (int y : r.rhs)
                if (!s.edges[i][y].empty()) ++live;
            if (live >= 2) {
                rep.proper = true;
                break;
            }
        }
    }
    rep.positive = rep.rho == Trichotomy::Greater ||
                   (rep.rho == Trichotomy::Equal && !rep.proper);
    return rep;
}

}  // namespace detail

inline std::vector<AnchorReport> analyze_couba_anchors(const BranchingProcess& bp,
                                                       const Nba& uba) {
    BpProduct prod = product_with_bp(uba, bp);
    RationalMatrix mean = mean_matrix(bp);
    std::vector<AnchorReport> out;
    for (int a : accepting_anchor_pairs(prod))
        out.push_back(detail::analyze_anchor_spectral(prod, bp, mean, a));
    return out;
}

// P(every branch rejected by the unambiguous automaton) = 1: true iff no
// anchor admits an accepted branch with positive probability. An anchor is
// positive iff its SCC mean matrix has rho > 1, or rho = 1 without proper
// branching (the degenerate single-path case).
inline Verdict check_couba_one(const BranchingProcess& bp, const Nba& uba,
                               bool assume_unambiguous = false, int jobs = 1) {
    if (!assume_unambiguous) {
        UnambiguityResult u = check_unambiguous(uba);
        if (!u.unambiguous) throw AmbiguousAutomaton(*u.witness);
    }
    BpProduct prod = product_with_bp(uba, bp);
    std::vector<int> anchors = accepting_anchor_pairs(prod);
    RationalMatrix mean = mean_matrix(bp);

    std::vector<std::optional<AnchorReport>> reports(anchors.size());
    auto fails = [&](int i) {
        reports[i] = detail::analyze_anchor_spectral(prod, bp, mean, anchors[i]);
        return reports[i]->positive;
    };
    Verdict v;
    v.route = "uba-anchors";
    int bad = detail::parallel_min_fail(static_cast<int>(anchors.size()), jobs, fails);
    if (bad == -1) {
        v.answer = true;
        return v;
    }
    const AnchorReport& rep = *reports[bad];
    v.answer = false;
    v.anchor = rep.name;
    v.rho = rep.rho;
    v.proper_branching = rep.proper;
    v.witness = "anchor " + rep.name + ": rho " + to_string(rep.rho) +
                (rep.rho == Trichotomy::Equal && !rep.proper ? ", no proper branching" : "");
    return v;
}

// ---------------------------------------------------------------------------
// Exact subset route for arbitrary (possibly ambiguous) automata.

struct SubsetAnchorReport {
    int anchor = 0;
    std::string name;
    int n_subset_types = 0;  // including the empty-set sink
    bool positive = false;
};

namespace detail {

inline SubsetAnchorReport analyze_anchor_subsets(const BpProduct& prod,
                                                 const BranchingProcess& bp, int anchor,
                                                 int budget) {
    AnchorScc s = build_afxf(prod, anchor);
    BdetBp det = subset_construct_bdet(s, bp, budget);
    std::vector<bool> sink(det.bp.n_types(), false);
    sink[det.sink] = true;
    SubsetAnchorReport rep;
    rep.anchor = anchor;
    rep.name = prod.aut.states[anchor];
    rep.n_subset_types = det.bp.n_types();
    rep.positive = !almost_surely_reach(det.bp, sink).finite;
    return rep;
}

}  // namespace detail

inline std::vector<SubsetAnchorReport> analyze_conba_anchors(const BranchingProcess& bp,
                                                             const Nba& nba,
                                                             int budget = 1 << 20) {
    BpProduct prod = product_with_bp(nba, bp);
    std::vector<SubsetAnchorReport> out;
    for (int a : accepting_anchor_pairs(prod))
        out.push_back(detail::analyze_anchor_subsets(prod, bp, a, budget));
    return out;
}

// P(every branch rejected) = 1 for any Buechi automaton: an anchor is
// positive iff the determinised anchor process can avoid the empty-set sink
// forever on some branch, i.e. not almost surely reaches it.
inline Verdict check_conba_one_exact(const BranchingProcess& bp, const Nba& nba, int jobs = 1,
                                     int budget = 1 << 20) {
    BpProduct prod = product_with_bp(nba, bp);
    std::vector<int> anchors = accepting_anchor_pairs(prod);
    std::vector<std::optional<SubsetAnchorReport>> reports(anchors.size());
    auto fails = [&](int i) {
        reports[i] = detail::analyze_anchor_subsets(prod, bp, anchors[i], budget);
        return reports[i]->positive;
    };
    Verdict v;
    v.route = "nba-subsets";
    int bad = detail::parallel_min_fail(static_cast<int>(anchors.size()), jobs, fails);
    if (bad == -1) {
        v.answer = true;
        return v;
    }
    v.answer = false;
    v.anchor = reports[bad]->name;
    v.witness = "anchor " + reports[bad]->name +
                ": surviving run set avoids extinction with positive probability";
    return v;
}

// ---------------------------------------------------------------------------
// Positive specifications.

// P(every branch accepted by the automaton) = 1 via determinisation.
inline Verdict check_nba_one(const BranchingProcess& bp, const Nba& nba, int jobs = 1,
                             int determinize_budget = 50000) {
    Dpa d = determinize_to_dpa(nba, determinize_budget);
    Verdict v = check_dpa_one(bp, d, jobs);
    v.route = "determinize+parity-product";
    return v;
}

// P(every branch satisfies the formula) = 1: negate, translate to an
// unambiguous automaton, and ask whether every branch rejects it.
inline Verdict check_ltl_one(const BranchingProcess& bp, LtlPool& pool, int formula,
                             int jobs = 1) {
    Nba uba = ltl_to_uba(pool, pool.mk_not(formula));
    // The tableau is unambiguous by construction; no runtime recheck.
    Verdict v = check_couba_one(bp, uba, true, jobs);
    v.route = "negate+uba-anchors";
    return v;
}

inline Verdict check_ltl_one(const BranchingProcess& bp, const std::string& formula,
                             int jobs = 1) {
    LtlPool pool(bp.types);
    int f = parse_ltl(pool, formula);
    return check_ltl_one(bp, pool, f, jobs);
}

}  // namespace bpmc
