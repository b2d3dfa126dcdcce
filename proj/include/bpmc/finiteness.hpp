#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bp.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "matrix.hpp"

namespace bpmc {

// Verdict for one SCC S of the successor graph. Linear: every rule of every
// S type has exactly one S occurrence on the right, so a lineage inside S
// lives forever. Supercritical: the restricted mean matrix has spectral
// radius above 1. Everything else dies out almost surely.
enum class SccClass { Linear, Supercritical, Neither };

inline const char* to_string(SccClass c) {
    switch (c) {
        case SccClass::Linear: return "linear";
        case SccClass::Supercritical: return "supercritical";
        default: return "neither";
    }
}

// members must form one SCC of successor_graph(bp). The linear test takes
// precedence: a linear SCC is critical yet never dies, and the spectral test
// alone cannot see that.
inline SccClass classify_scc(const BranchingProcess& bp, const std::vector<int>& members) {
    std::vector<bool> in_s(bp.n_types(), false);
    for (int t : members) in_s[t] = true;

    bool linear = true;
    bool any_occurrence = false;
    for (int t : members) {
        for (const Rule& r : bp.rules[t]) {
            int occ = 0;
            for (int x : r.rhs)
                if (in_s[x]) ++occ;
            if (occ != 1) linear = false;
            if (occ > 0) any_occurrence = true;
        }
    }
    if (linear) return SccClass::Linear;
    if (!any_occurrence) return SccClass::Neither;  // lone type without a self-loop

    RationalMatrix ms = mean_matrix(bp).submatrix(members);
    return rho_trichotomy_irreducible(ms) == Trichotomy::Greater ? SccClass::Supercritical
                                                                 : SccClass::Neither;
}

struct FinitenessWitness {
    std::vector<int> scc;  // type indices, ascending
    SccClass cls = SccClass::Neither;
};

struct FinitenessResult {
    bool finite = true;
    std::optional<FinitenessWitness> witness;  // first offending SCC, callees first
};

// The generated tree is finite almost surely iff no reachable SCC is linear
// or supercritical. The witness is the offending SCC encountered first in
// callees-first order, i.e. one whose own descendants are all harmless.
inline FinitenessResult almost_surely_finite(const BranchingProcess& bp) {
    std::vector<bool> reach = reachable_types(bp);
    SccDecomposition scc = scc_decompose(successor_graph(bp));
    for (const auto& members : scc.components) {
        if (!reach[members[0]]) continue;
        SccClass cls = classify_scc(bp, members);
        if (cls == SccClass::Neither) continue;
        FinitenessResult out;
        out.finite = false;
        out.witness = FinitenessWitness{members, cls};
        return out;
    }
    return {};
}

// Almost surely every branch reaches a type in the target set. Pruning the
// tree at target nodes gives the tree of the process with target occurrences
// erased, so the question reduces to almost sure finiteness of that process.
inline FinitenessResult almost_surely_reach(const BranchingProcess& bp,
                                            const std::vector<bool>& targets) {
    if (targets[bp.start]) return {};
    return almost_surely_finite(erase_types(bp, targets));
}

}  // namespace bpmc
