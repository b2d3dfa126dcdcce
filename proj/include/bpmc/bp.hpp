#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "matrix.hpp"
#include "rational.hpp"

namespace bpmc {

// One rewrite rule lhs -> rhs with probability prob. rhs may be empty only
// in processes that allow erasing rules.
struct Rule {
    int lhs = 0;
    Rational prob;
    std::vector<int> rhs;
};

// Multi-type branching process over a dense type table. Types are referred
// to by index; names are for I/O and diagnostics.
struct BranchingProcess {
    std::vector<std::string> types;
    std::vector<std::vector<Rule>> rules;  // grouped by lhs, rules[t].lhs == t
    int start = 0;
    bool eps_allowed = false;

    int n_types() const { return static_cast<int>(types.size()); }

    int add_type(const std::string& name) {
        types.push_back(name);
        rules.emplace_back();
        return n_types() - 1;
    }

    int find_type(const std::string& name) const {
        for (int i = 0; i < n_types(); ++i)
            if (types[i] == name) return i;
        return -1;
    }

    void add_rule(int lhs, Rational prob, std::vector<int> rhs) {
        Rule r;
        r.lhs = lhs;
        r.prob = std::move(prob);
        r.rhs = std::move(rhs);
        rules[lhs].push_back(std::move(r));
    }

    const std::string& type_name(int t) const { return types[t]; }
};

struct Violation {
    std::string code;
    std::string detail;
};

// Structural checks; an empty result means the process is well formed.
inline std::vector<Violation> validate_bp(const BranchingProcess& bp) {
    std::vector<Violation> out;
    int n = bp.n_types();
    if (bp.start < 0 || bp.start >= n)
        out.push_back({"UnknownType", "start type index out of range"});
    for (int t = 0; t < n; ++t) {
        if (bp.rules[t].empty()) {
            out.push_back({"NoRulesForType", bp.types[t]});
            continue;
        }
        Rational sum(0);
        for (const Rule& r : bp.rules[t]) {
            if (r.lhs != t)
                out.push_back({"UnknownType", "rule grouped under wrong lhs " + bp.types[t]});
            if (r.prob <= 0 || r.prob > 1)
                out.push_back({"NonpositiveProbability",
                               bp.types[t] + " has a rule with probability " + rat_str(r.prob)});
            if (r.rhs.empty() && !bp.eps_allowed)
                out.push_back({"EmptyRhsWithoutEps", bp.types[t]});
            for (int s : r.rhs)
                if (s < 0 || s >= n)
                    out.push_back({"UnknownType", "rhs of a " + bp.types[t] + " rule"});
            sum += r.prob;
        }
        if (sum != 1)
            out.push_back({"ProbabilitySumMismatch", bp.types[t] + ", " + rat_str(sum)});
    }
    return out;
}

// Edge X -> Y iff Y occurs on the rhs of some X rule.
inline Digraph successor_graph(const BranchingProcess& bp) {
    Digraph g(bp.n_types());
    for (int t = 0; t < bp.n_types(); ++t) {
        std::set<int> succ;
        for (const Rule& r : bp.rules[t]) succ.insert(r.rhs.begin(), r.rhs.end());
        for (int s : succ) g.add_edge(t, s);
    }
    g.normalize();
    return g;
}

inline std::vector<bool> reachable_types(const BranchingProcess& bp) {
    return reachable_from(successor_graph(bp), {bp.start});
}

// M[X][Y] = expected number of Y children of an X node.
inline RationalMatrix mean_matrix(const BranchingProcess& bp) {
    RationalMatrix m(bp.n_types());
    m.keys = bp.types;
    for (int t = 0; t < bp.n_types(); ++t)
        for (const Rule& r : bp.rules[t])
            for (int s : r.rhs) m.at(t, s) += r.prob;
    return m;
}

// The process restarted inside one SCC: keeps only S types; occurrences of
// other types are erased from every rhs (which may introduce erasing rules).
inline BranchingProcess restrict_to_scc(const BranchingProcess& bp, const std::vector<int>& scc,
                                        int new_start) {
    std::vector<int> s = scc;
    std::sort(s.begin(), s.end());
    {
        SccDecomposition d = scc_decompose(successor_graph(bp));
        bool found = false;
        for (const auto& comp : d.components)
            if (comp == s) {
                found = true;
                break;
            }
        if (!found) throw Error("NotAnScc", "given type set is not an SCC of the successor graph");
    }
    if (!std::binary_search(s.begin(), s.end(), new_start))
        throw Error("StartNotInScc", "restart type must belong to the SCC");

    BranchingProcess out;
    out.eps_allowed = true;
    std::vector<int> remap(bp.n_types(), -1);
    for (int t : s) remap[t] = out.add_type(bp.types[t]);
    out.start = remap[new_start];
    for (int t : s) {
        for (const Rule& r : bp.rules[t]) {
            std::vector<int> rhs;
            for (int x : r.rhs)
                if (remap[x] != -1) rhs.push_back(remap[x]);
            out.add_rule(remap[t], r.prob, std::move(rhs));
        }
    }
    return out;
}

// Deletes every rhs occurrence of a T type. Rules of T types are kept; the
// erased types simply become unreachable. Result allows erasing rules.
inline BranchingProcess erase_types(const BranchingProcess& bp, const std::vector<bool>& in_t) {
    if (bp.start >= 0 && bp.start < bp.n_types() && in_t[bp.start])
        throw Error("StartInT", "start type must not be erased");
    BranchingProcess out = bp;
    out.eps_allowed = true;
    for (auto& group : out.rules)
        for (Rule& r : group) {
            std::vector<int> rhs;
            for (int x : r.rhs)
                if (!in_t[x]) rhs.push_back(x);
            r.rhs = std::move(rhs);
        }
    return out;
}

inline std::vector<bool> type_set(const BranchingProcess& bp, const std::vector<int>& ts) {
    std::vector<bool> mask(bp.n_types(), false);
    for (int t : ts) mask[t] = true;
    return mask;
}

}  // namespace bpmc
