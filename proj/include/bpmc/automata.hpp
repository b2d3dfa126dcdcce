#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bp.hpp"
#include "errors.hpp"
#include "graph.hpp"

namespace bpmc {

// Nondeterministic Buechi automaton over a dense alphabet.
struct Nba {
    std::vector<std::string> alphabet;
    std::vector<std::string> states;
    // delta[q][a] = sorted target list
    std::vector<std::vector<std::vector<int>>> delta;
    std::vector<int> initial;  // sorted
    std::vector<bool> accepting;

    int n_states() const { return static_cast<int>(states.size()); }
    int n_letters() const { return static_cast<int>(alphabet.size()); }

    int add_state(const std::string& name, bool acc = false) {
        states.push_back(name);
        delta.emplace_back(alphabet.size());
        accepting.push_back(acc);
        return n_states() - 1;
    }

    void add_transition(int q, int a, int r) {
        auto& v = delta[q][a];
        auto it = std::lower_bound(v.begin(), v.end(), r);
        if (it == v.end() || *it != r) v.insert(it, r);
    }

    int find_state(const std::string& name) const {
        for (int i = 0; i < n_states(); ++i)
            if (states[i] == name) return i;
        return -1;
    }

    int find_letter(const std::string& name) const {
        for (int i = 0; i < n_letters(); ++i)
            if (alphabet[i] == name) return i;
        return -1;
    }

    // Transition graph ignoring letters.
    Digraph graph() const {
        Digraph g(n_states());
        for (int q = 0; q < n_states(); ++q)
            for (const auto& targets : delta[q])
                for (int r : targets) g.add_edge(q, r);
        g.normalize();
        return g;
    }
};

// Deterministic parity automaton; acceptance: the highest priority seen
// infinitely often is even. The transition function is total.
struct Dpa {
    std::vector<std::string> alphabet;
    std::vector<std::string> states;
    std::vector<std::vector<int>> next;  // [q][a] -> q'
    std::vector<int> priority;
    int initial = 0;

    int n_states() const { return static_cast<int>(states.size()); }
    int n_letters() const { return static_cast<int>(alphabet.size()); }

    int add_state(const std::string& name, int prio) {
        states.push_back(name);
        next.emplace_back(alphabet.size(), -1);
        priority.push_back(prio);
        return n_states() - 1;
    }

    int find_letter(const std::string& name) const {
        for (int i = 0; i < n_letters(); ++i)
            if (alphabet[i] == name) return i;
        return -1;
    }
};

struct TrimResult {
    Nba aut;
    std::vector<std::string> removed;  // names of dropped states
    std::vector<int> kept;             // old indices kept, ascending
};

// Keeps exactly the states that are reachable from an initial state and can
// still reach an accepting cycle.
inline TrimResult trim_useful(const Nba& a) {
    int n = a.n_states();
    Digraph g = a.graph();
    std::vector<bool> reach = reachable_from(g, a.initial);

    SccDecomposition scc = scc_decompose(g);
    std::vector<int> seeds;
    for (int q = 0; q < n; ++q)
        if (a.accepting[q] && scc.on_cycle(q)) seeds.push_back(q);
    std::vector<bool> live = reachable_from(g.reversed(), seeds);

    TrimResult out;
    out.aut.alphabet = a.alphabet;
    std::vector<int> remap(n, -1);
    for (int q = 0; q < n; ++q) {
        if (reach[q] && live[q]) {
            remap[q] = out.aut.add_state(a.states[q], a.accepting[q]);
            out.kept.push_back(q);
        } else {
            out.removed.push_back(a.states[q]);
        }
    }
    for (int q = 0; q < n; ++q) {
        if (remap[q] == -1) continue;
        for (int l = 0; l < a.n_letters(); ++l)
            for (int r : a.delta[q][l])
                if (remap[r] != -1) out.aut.add_transition(remap[q], l, remap[r]);
    }
    for (int q : a.initial)
        if (remap[q] != -1) out.aut.initial.push_back(remap[q]);
    std::sort(out.aut.initial.begin(), out.aut.initial.end());
    return out;
}

struct AmbiguityWitness {
    std::vector<int> stem, cycle;  // letters of the lasso word
    // Parallel state-name sequences of the two runs (one entry more than the
    // corresponding letter list; the cycle lists end where they started).
    std::vector<std::string> run_a_stem, run_a_cycle;
    std::vector<std::string> run_b_stem, run_b_cycle;
};

struct UnambiguityResult {
    bool unambiguous = true;
    std::optional<AmbiguityWitness> witness;
};

struct AmbiguousAutomaton : Error {
    AmbiguityWitness witness;
    explicit AmbiguousAutomaton(AmbiguityWitness w)
        : Error("AmbiguousAutomaton", "two distinct accepting runs exist for some word"),
          witness(std::move(w)) {}
};

namespace detail {

// Pair graph node packing for the self-product with a divergence bit.
inline long long pair_id(int p, int q, int d, int n) {
    return ((static_cast<long long>(p) * n + q) * 2) + d;
}

}  // namespace detail

// A trimmed self-product search for a word with two distinct accepting runs:
// the automaton is ambiguous iff a diverged pair reaches a cycle that visits
// acceptance in both coordinates.
inline UnambiguityResult check_unambiguous(const Nba& input) {
    Nba a = trim_useful(input).aut;
    int n = a.n_states();
    UnambiguityResult res;
    if (n == 0) return res;

    int total = n * n * 2;
    std::vector<int> id_of(total, -1);
    std::vector<std::array<int, 3>> node;  // (p,q,d)
    std::vector<int> work;
    auto intern = [&](int p, int q, int d) {
        int key = (p * n + q) * 2 + d;
        if (id_of[key] == -1) {
            id_of[key] = static_cast<int>(node.size());
            node.push_back({p, q, d});
            work.push_back(id_of[key]);
        }
        return id_of[key];
    };

    for (int p : a.initial)
        for (int q : a.initial) intern(p, q, p == q ? 0 : 1);

    // Edges annotated with letters for witness extraction.
    std::vector<std::vector<std::pair<int, int>>> adj;  // node -> (letter, node)
    adj.resize(node.size());
    for (std::size_t i = 0; i < work.size(); ++i) {
        int u = work[i];
        auto [p, q, d] = node[u];
        for (int l = 0; l < a.n_letters(); ++l)
            for (int p2 : a.delta[p][l])
                for (int q2 : a.delta[q][l]) {
                    int d2 = (d || p2 != q2) ? 1 : 0;
                    int v = intern(p2, q2, d2);
                    if (adj.size() < node.size()) adj.resize(node.size());
                    adj[u].push_back({l, v});
                }
    }
    adj.resize(node.size());

    Digraph g(static_cast<int>(node.size()));
    for (std::size_t u = 0; u < adj.size(); ++u)
        for (auto [l, v] : adj[u]) g.add_edge(static_cast<int>(u), v);

    SccDecomposition scc = scc_decompose(g);
    int target_comp = -1;
    for (std::size_t c = 0; c < scc.components.size() && target_comp < 0; ++c) {
        if (!scc.has_cycle[c]) continue;
        bool acc_a = false, acc_b = false, diverged = false;
        for (int v : scc.components[c]) {
            auto [p, q, d] = node[v];
            if (d) diverged = true;
            if (a.accepting[p]) acc_a = true;
            if (a.accepting[q]) acc_b = true;
        }
        if (diverged && acc_a && acc_b) target_comp = static_cast<int>(c);
    }
    if (target_comp == -1) return res;

    // Witness: stem from an initial pair to the component, then a closed walk
    // inside it through an accepting-first and an accepting-second node.
    auto bfs_path = [&](const std::vector<int>& from, auto&& goal, bool inside_comp)
        -> std::vector<std::pair<int, int>> {  // list of (letter, node), starting node implicit
        std::vector<int> prev(node.size(), -2), prev_letter(node.size(), -1);
        std::vector<int> queue;
        for (int s : from) {
            prev[s] = -1;
            queue.push_back(s);
        }
        for (std::size_t h = 0; h < queue.size(); ++h) {
            int u = queue[h];
            for (auto [l, v] : adj[u]) {
                if (inside_comp && scc.comp_of[v] != target_comp) continue;
                if (prev[v] != -2) continue;
                prev[v] = u;
                prev_letter[v] = l;
                queue.push_back(v);
            }
        }
        for (std::size_t v = 0; v < node.size(); ++v) {
            if (prev[v] == -2 || !goal(static_cast<int>(v))) continue;
            std::vector<std::pair<int, int>> path;
            int cur = static_cast<int>(v);
            while (prev[cur] != -1) {
                path.push_back({prev_letter[cur], cur});
                cur = prev[cur];
            }
            path.push_back({-1, cur});  // starting node marker
            std::reverse(path.begin(), path.end());
            return path;
        }
        return {};
    };

    const auto& comp = scc.components[target_comp];
    int x = -1;
    for (int v : comp)
        if (a.accepting[node[v][0]]) {
            x = v;
            break;
        }
    std::vector<int> inits;
    for (int p : a.initial)
        for (int q : a.initial) inits.push_back(id_of[(p * n + q) * 2 + (p == q ? 0 : 1)]);
    std::sort(inits.begin(), inits.end());
    inits.erase(std::unique(inits.begin(), inits.end()), inits.end());

    auto stem_path = bfs_path(inits, [&](int v) { return v == x; }, false);
    auto leg1 = bfs_path({x}, [&](int v) { return a.accepting[node[v][1]]; }, true);
    int y = leg1.back().second;
    std::vector<std::pair<int, int>> leg2;
    // Closed walk back to x; if y == x and leg1 is trivial, force one step.
    {
        std::vector<int> starts{y};
        auto path = bfs_path(starts, [&](int v) { return v == x; }, true);
        if (path.size() == 1) {
            // need a nonempty cycle: step once then return
            int u = y;
            int stepped = -1, letter = -1;
            for (auto [l, v] : adj[u])
                if (scc.comp_of[v] == target_comp) {
                    stepped = v;
                    letter = l;
                    break;
                }
            auto back = bfs_path({stepped}, [&](int v) { return v == x; }, true);
            leg2.push_back({-1, u});
            leg2.push_back({letter, stepped});
            for (std::size_t i = 1; i < back.size(); ++i) leg2.push_back(back[i]);
        } else {
            leg2 = path;
        }
    }

    AmbiguityWitness w;
    auto append = [&](const std::vector<std::pair<int, int>>& path, bool to_cycle, bool keep_first) {
        for (std::size_t i = keep_first ? 0 : 1; i < path.size(); ++i) {
            auto [l, v] = path[i];
            auto [p, q, d] = node[v];
            (void)d;
            if (to_cycle) {
                if (l >= 0) w.cycle.push_back(l);
                w.run_a_cycle.push_back(a.states[p]);
                w.run_b_cycle.push_back(a.states[q]);
            } else {
                if (l >= 0) w.stem.push_back(l);
                w.run_a_stem.push_back(a.states[p]);
                w.run_b_stem.push_back(a.states[q]);
            }
        }
    };
    append(stem_path, false, true);
    append(leg1, true, true);
    append(leg2, true, false);
    res.unambiguous = false;
    res.witness = std::move(w);
    return res;
}

// ---------------------------------------------------------------------------
// Product of an automaton with the successor structure of a process.
// States are pairs (q, X): the automaton in q, about to read the type X of
// the current node. A transition on letter Y moves to (r, Y) for r in
// delta(q, X) when Y is a successor type of X, so every product transition's
// letter equals its target's type component.

struct BpProduct {
    Nba aut;               // |Q| * |Gamma| states, dense: pair_index = q * nt + x
    int n_aut_states = 0;  // |Q| of the original automaton
    int n_types = 0;       // |Gamma|

    int pair_index(int q, int x) const { return q * n_types + x; }
    int aut_state(int idx) const { return idx / n_types; }
    int type_of(int idx) const { return idx % n_types; }
};

inline BpProduct product_with_bp(const Nba& a, const BranchingProcess& bp) {
    if (a.alphabet != bp.types)
        throw Error("AlphabetMismatch", "automaton alphabet must equal the process type table");
    BpProduct p;
    p.n_aut_states = a.n_states();
    p.n_types = bp.n_types();
    p.aut.alphabet = a.alphabet;
    Digraph succ = successor_graph(bp);
    for (int q = 0; q < a.n_states(); ++q)
        for (int x = 0; x < bp.n_types(); ++x)
            p.aut.add_state("(" + a.states[q] + "," + bp.types[x] + ")", a.accepting[q]);
    for (int q = 0; q < a.n_states(); ++q)
        for (int x = 0; x < bp.n_types(); ++x)
            for (int r : a.delta[q][x])
                for (int y : succ.adj[x]) p.aut.add_transition(p.pair_index(q, x), y, p.pair_index(r, y));
    for (int q0 : a.initial) p.aut.initial.push_back(p.pair_index(q0, bp.start));
    std::sort(p.aut.initial.begin(), p.aut.initial.end());
    return p;
}

// Accepting product states that lie on a cycle and are reachable from an
// initial product state, in ascending index order.
inline std::vector<int> accepting_anchor_pairs(const BpProduct& p) {
    Digraph g = p.aut.graph();
    std::vector<bool> reach = reachable_from(g, p.aut.initial);
    SccDecomposition scc = scc_decompose(g);
    std::vector<int> anchors;
    for (int v = 0; v < p.aut.n_states(); ++v)
        if (p.aut.accepting[v] && reach[v] && scc.on_cycle(v)) anchors.push_back(v);
    return anchors;
}

// The automaton restricted to the SCC of one anchor, with a fresh initial
// state whose only transition reads the anchor's type into the anchor.
struct AnchorScc {
    int anchor = 0;                       // product index of (f, X_f)
    std::vector<int> members;             // product indices, ascending
    std::vector<int> member_type;         // type component per member
    int anchor_member = 0;                // position of the anchor in members
    // edges[i] = per-letter sorted member positions
    std::vector<std::vector<std::vector<int>>> edges;
    const BpProduct* product = nullptr;
};

inline AnchorScc build_afxf(const BpProduct& p, int anchor) {
    Digraph g = p.aut.graph();
    SccDecomposition scc = scc_decompose(g);
    if (!p.aut.accepting[anchor])
        throw Error("AnchorNotAccepting", "anchor must be an accepting product state");
    if (!scc.on_cycle(anchor))
        throw Error("AnchorNotOnCycle", "anchor must lie on a cycle of the product");
    AnchorScc out;
    out.anchor = anchor;
    out.product = &p;
    out.members = scc.components[scc.comp_of[anchor]];
    std::vector<int> pos(p.aut.n_states(), -1);
    for (std::size_t i = 0; i < out.members.size(); ++i) pos[out.members[i]] = static_cast<int>(i);
    out.anchor_member = pos[anchor];
    out.member_type.reserve(out.members.size());
    for (int m : out.members) out.member_type.push_back(p.type_of(m));
    out.edges.resize(out.members.size());
    for (std::size_t i = 0; i < out.members.size(); ++i) {
        out.edges[i].assign(p.aut.n_letters(), {});
        for (int l = 0; l < p.aut.n_letters(); ++l)
            for (int tgt : p.aut.delta[out.members[i]][l])
                if (pos[tgt] != -1) out.edges[i][l].push_back(pos[tgt]);
    }
    return out;
}

// Materialises the restricted automaton with the fresh initial state, mostly
// for inspection and tests.
inline Nba anchor_scc_to_nba(const AnchorScc& s) {
    const BpProduct& p = *s.product;
    Nba a;
    a.alphabet = p.aut.alphabet;
    int qbar = a.add_state("init", false);
    std::vector<int> id(s.members.size());
    for (std::size_t i = 0; i < s.members.size(); ++i)
        id[i] = a.add_state(p.aut.states[s.members[i]], false);
    a.accepting[id[s.anchor_member]] = true;
    a.initial = {qbar};
    a.add_transition(qbar, s.member_type[s.anchor_member], id[s.anchor_member]);
    for (std::size_t i = 0; i < s.members.size(); ++i)
        for (int l = 0; l < p.aut.n_letters(); ++l)
            for (int j : s.edges[i][l]) a.add_transition(id[i], l, id[j]);
    return a;
}

// Determinisation of the anchor automaton read as a branching process: types
// are subset states (all members of a subset share one type component) plus
// an absorbing empty-set sink.
struct BdetBp {
    BranchingProcess bp;
    int sink = 0;                            // index of the empty-set type
    std::vector<std::vector<int>> subsets;   // member positions per type, empty for sink
    std::vector<int> subset_type;            // type component per subset (-1 for sink)
};

inline BdetBp subset_construct_bdet(const AnchorScc& s, const BranchingProcess& bp,
                                    int budget = 1 << 20) {
    BdetBp out;
    out.bp.eps_allowed = false;
    out.sink = out.bp.add_type("EMPTY");
    out.subsets.push_back({});
    out.subset_type.push_back(-1);
    out.bp.add_rule(out.sink, Rational(1), {out.sink});

    std::map<std::vector<int>, int> id;
    std::vector<std::vector<int>> todo;

    auto intern = [&](std::vector<int> subset) {
        if (subset.empty()) return out.sink;
        auto it = id.find(subset);
        if (it != id.end()) return it->second;
        std::string name = "U" + std::to_string(out.bp.n_types() - 1);
        int t = out.bp.add_type(name);
        if (out.bp.n_types() > budget)
            throw BudgetExceeded("subset construction exceeded " + std::to_string(budget) + " types");
        out.subsets.push_back(subset);
        out.subset_type.push_back(s.member_type[subset[0]]);
        id.emplace(std::move(subset), t);
        todo.push_back(out.subsets.back());
        return t;
    };

    auto step = [&](const std::vector<int>& subset, int letter) {
        std::set<int> tgt;
        for (int m : subset)
            for (int j : s.edges[m][letter]) tgt.insert(j);
        return std::vector<int>(tgt.begin(), tgt.end());
    };

    int start = intern({s.anchor_member});
    out.bp.start = start;
    while (!todo.empty()) {
        std::vector<int> subset = todo.back();
        todo.pop_back();
        int t = id[subset];
        int x = s.member_type[subset[0]];
        for (const Rule& r : bp.rules[x]) {
            std::vector<int> rhs;
            rhs.reserve(r.rhs.size());
            for (int y : r.rhs) rhs.push_back(intern(step(subset, y)));
            out.bp.add_rule(t, r.prob, std::move(rhs));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lasso membership.

// True iff the NBA accepts u v^omega.
inline bool lasso_membership(const Nba& a, const std::vector<int>& u, const std::vector<int>& v) {
    if (v.empty()) throw Error("EmptyPeriod", "lasso period must be nonempty");
    std::vector<bool> cur(a.n_states(), false);
    for (int q : a.initial) cur[q] = true;
    for (int l : u) {
        std::vector<bool> next(a.n_states(), false);
        for (int q = 0; q < a.n_states(); ++q)
            if (cur[q])
                for (int r : a.delta[q][l]) next[r] = true;
        cur = next;
    }
    int P = static_cast<int>(v.size());
    int n = a.n_states();
    Digraph g(n * P);
    for (int q = 0; q < n; ++q)
        for (int i = 0; i < P; ++i)
            for (int r : a.delta[q][v[i]]) g.add_edge(q * P + i, r * P + (i + 1) % P);
    std::vector<int> seeds;
    for (int q = 0; q < n; ++q)
        if (cur[q]) seeds.push_back(q * P);
    std::vector<bool> reach = reachable_from(g, seeds);
    SccDecomposition scc = scc_decompose(g);
    for (int q = 0; q < n; ++q) {
        if (!a.accepting[q]) continue;
        for (int i = 0; i < P; ++i) {
            int node = q * P + i;
            if (reach[node] && scc.on_cycle(node)) return true;
        }
    }
    return false;
}

// True iff the DPA accepts u v^omega.
inline bool lasso_membership(const Dpa& d, const std::vector<int>& u, const std::vector<int>& v) {
    if (v.empty()) throw Error("EmptyPeriod", "lasso period must be nonempty");
    int q = d.initial;
    for (int l : u) q = d.next[q][l];
    int P = static_cast<int>(v.size());
    std::vector<int> seen_at(d.n_states() * P, -1);
    std::vector<int> trace;
    int pos = 0;
    while (seen_at[q * P + pos] == -1) {
        seen_at[q * P + pos] = static_cast<int>(trace.size());
        trace.push_back(q);
        q = d.next[q][v[pos]];
        pos = (pos + 1) % P;
    }
    int first = seen_at[q * P + pos];
    int best = -1;
    for (std::size_t i = first; i < trace.size(); ++i) best = std::max(best, d.priority[trace[i]]);
    return best % 2 == 0;
}

}  // namespace bpmc
