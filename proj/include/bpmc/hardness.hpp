#pragma once

#include <map>
#include <string>
#include <vector>

#include "automata.hpp"
#include "bp.hpp"
#include "errors.hpp"

namespace bpmc {

// ---------------------------------------------------------------------------
// Monotone circuits.

struct CircuitNode {
    enum class Kind { Input, And, Or } kind = Kind::Input;
    std::string name;
    bool value = false;         // inputs only
    std::vector<int> children;  // gates only, nonempty
};

struct MonotoneCircuit {
    std::vector<CircuitNode> nodes;
    int output = -1;

    int find(const std::string& name) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].name == name) return static_cast<int>(i);
        return -1;
    }
};

inline void validate_circuit(const MonotoneCircuit& c) {
    if (c.output < 0 || c.output >= static_cast<int>(c.nodes.size()))
        throw Error("NoOutput", "circuit output gate is not set");
    for (const CircuitNode& g : c.nodes) {
        if (g.kind == CircuitNode::Kind::Input) continue;
        if (g.children.empty()) throw Error("EmptyGate", "gate " + g.name + " has no children");
        for (int ch : g.children)
            if (ch < 0 || ch >= static_cast<int>(c.nodes.size()))
                throw Error("UnknownGate", "gate " + g.name + " references a missing node");
    }
    // 0 unvisited, 1 on the current path, 2 done
    std::vector<char> mark(c.nodes.size(), 0);
    auto dfs = [&](auto&& self, int v) -> void {
        if (mark[v] == 1) throw Error("CyclicCircuit", "cycle through " + c.nodes[v].name);
        if (mark[v] == 2) return;
        mark[v] = 1;
        for (int ch : c.nodes[v].children) self(self, ch);
        mark[v] = 2;
    };
    for (std::size_t v = 0; v < c.nodes.size(); ++v) dfs(dfs, static_cast<int>(v));
}

inline bool eval_circuit(const MonotoneCircuit& c) {
    validate_circuit(c);
    std::vector<char> val(c.nodes.size(), -1);
    auto dfs = [&](auto&& self, int v) -> bool {
        if (val[v] != -1) return val[v];
        const CircuitNode& g = c.nodes[v];
        bool r;
        if (g.kind == CircuitNode::Kind::Input) {
            r = g.value;
        } else {
            r = g.kind == CircuitNode::Kind::And;
            for (int ch : g.children) {
                bool cv = self(self, ch);
                r = g.kind == CircuitNode::Kind::And ? (r && cv) : (r || cv);
            }
        }
        val[v] = r;
        return r;
    };
    return dfs(dfs, c.output);
}

struct CircuitInstance {
    BranchingProcess bp;
    Dpa dpa;
};

// Circuit value as branch reachability: and-gates spawn all children in one
// rule, or-gates pick one child uniformly, inputs collapse to the shared
// constant types. The two-state parity automaton accepts exactly the branches
// that contain X1, so P(accepts) > 0 iff the circuit evaluates to 1.
inline CircuitInstance gen_circuit_instance(const MonotoneCircuit& c) {
    validate_circuit(c);
    CircuitInstance out;
    BranchingProcess& bp = out.bp;
    int x0 = bp.add_type("X0");
    int x1 = bp.add_type("X1");
    bp.add_rule(x0, Rational(1), {x0});
    bp.add_rule(x1, Rational(1), {x1});

    std::vector<int> type_of(c.nodes.size(), -1);
    for (std::size_t v = 0; v < c.nodes.size(); ++v) {
        const CircuitNode& g = c.nodes[v];
        type_of[v] = g.kind == CircuitNode::Kind::Input ? (g.value ? x1 : x0)
                                                        : bp.add_type("X_" + g.name);
    }
    for (std::size_t v = 0; v < c.nodes.size(); ++v) {
        const CircuitNode& g = c.nodes[v];
        if (g.kind == CircuitNode::Kind::Input) continue;
        if (g.kind == CircuitNode::Kind::And) {
            std::vector<int> rhs;
            for (int ch : g.children) rhs.push_back(type_of[ch]);
            bp.add_rule(type_of[v], Rational(1), std::move(rhs));
        } else {
            Rational p(1, static_cast<int>(g.children.size()));
            for (int ch : g.children) bp.add_rule(type_of[v], p, {type_of[ch]});
        }
    }
    bp.start = type_of[c.output];

    Dpa& d = out.dpa;
    d.alphabet = bp.types;
    int waiting = d.add_state("waiting", 1);
    int seen = d.add_state("seen1", 2);
    d.initial = waiting;
    for (int a = 0; a < d.n_letters(); ++a) {
        d.next[waiting][a] = a == x1 ? seen : waiting;
        d.next[seen][a] = seen;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Alternating Turing machines (linearly bounded).

struct AtmTransition {
    int s = 0;      // source state
    int read = 0;   // letter under the head
    int write = 0;  // replacement letter
    int dir = +1;   // -1 or +1
    int s2 = 0;     // target state
};

struct AtmSpec {
    std::vector<std::string> states;
    std::vector<std::string> alphabet;
    std::vector<char> existential;  // per state; ignored for the accepting state
    int accept = -1;
    int initial = -1;
    std::vector<AtmTransition> transitions;

    int find_state(const std::string& n) const {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == n) return static_cast<int>(i);
        return -1;
    }
    int find_letter(const std::string& n) const {
        for (std::size_t i = 0; i < alphabet.size(); ++i)
            if (alphabet[i] == n) return static_cast<int>(i);
        return -1;
    }
};

inline std::vector<Violation> validate_atm(const AtmSpec& m) {
    std::vector<Violation> out;
    int ns = static_cast<int>(m.states.size());
    int na = static_cast<int>(m.alphabet.size());
    if (m.accept < 0 || m.accept >= ns) out.push_back({"NoAcceptState", "accepting state unset"});
    if (m.initial < 0 || m.initial >= ns) out.push_back({"NoInitialState", "initial state unset"});
    if (na == 0) out.push_back({"EmptyAlphabet", "tape alphabet is empty"});
    for (const AtmTransition& t : m.transitions) {
        if (t.s < 0 || t.s >= ns || t.s2 < 0 || t.s2 >= ns || t.read < 0 || t.read >= na ||
            t.write < 0 || t.write >= na || (t.dir != -1 && t.dir != 1)) {
            out.push_back({"BadTransition", "transition references missing pieces"});
            continue;
        }
        if (t.s == m.accept)
            out.push_back({"TransitionFromAccept", "no transitions may leave the accepting state"});
    }
    // every non-accepting state needs an outgoing transition for each letter
    for (int s = 0; s < ns; ++s) {
        if (s == m.accept) continue;
        for (int a = 0; a < na; ++a) {
            bool found = false;
            for (const AtmTransition& t : m.transitions)
                if (t.s == s && t.read == a) found = true;
            if (!found)
                out.push_back({"MissingTransition",
                               "state " + m.states[s] + " has no transition reading " +
                                   m.alphabet[a]});
        }
    }
    return out;
}

enum class AtmVariant { Nba0, Conba0 };

struct AtmInstance {
    BranchingProcess bp;
    Nba nba;
};

// Tree-as-computation encoding. Configuration types (i,s,a) branch by the
// machine's choices (existential: uniform rule pick; universal: one rule with
// all transition children); transition types (i,t) guess the letter written
// into the next cell uniformly; falling off the tape goes to the absorbing
// error type E. The monitor automaton watches one guessed cell and catches
// inconsistencies. Variant Nba0: acceptance via chk types and the sink f
// being the only accepting state. Variant Conba0: the chk family collapses
// into one `end` type, every monitor state accepts, and mismatches move to f.
inline AtmInstance gen_atm_instance(const AtmSpec& m, const std::vector<int>& word,
                                    AtmVariant variant) {
    if (word.empty()) throw Error("EmptyWord", "the input word must be nonempty");
    {
        std::vector<Violation> v = validate_atm(m);
        if (!v.empty()) throw Error(v[0].code, v[0].detail);
    }
    int n = static_cast<int>(word.size());
    int ns = static_cast<int>(m.states.size());
    int na = static_cast<int>(m.alphabet.size());
    int nt = static_cast<int>(m.transitions.size());

    AtmInstance out;
    BranchingProcess& bp = out.bp;
    // configuration types (i,s,a), then transition types (i,t), then the
    // acceptance plumbing (chk_1..chk_n or end), then E
    auto config = [&](int i, int s, int a) { return ((i - 1) * ns + s) * na + a; };
    auto trans = [&](int i, int j) { return n * ns * na + (i - 1) * nt + j; };
    for (int i = 1; i <= n; ++i)
        for (int s = 0; s < ns; ++s)
            for (int a = 0; a < na; ++a)
                bp.add_type("c" + std::to_string(i) + "_" + m.states[s] + "_" + m.alphabet[a]);
    for (int i = 1; i <= n; ++i)
        for (int j = 0; j < nt; ++j) bp.add_type("t" + std::to_string(i) + "_" + std::to_string(j));
    int first_chk = bp.n_types();
    if (variant == AtmVariant::Nba0) {
        for (int i = 1; i <= n; ++i) bp.add_type("chk" + std::to_string(i));
    } else {
        bp.add_type("end");
    }
    int etype = bp.add_type("E");
    bp.add_rule(etype, Rational(1), {etype});

    for (int i = 1; i <= n; ++i) {
        for (int s = 0; s < ns; ++s) {
            for (int a = 0; a < na; ++a) {
                int lhs = config(i, s, a);
                if (s == m.accept) {
                    if (variant == AtmVariant::Nba0) {
                        std::vector<int> rhs;
                        for (int k = 0; k < n; ++k) rhs.push_back(first_chk + k);
                        bp.add_rule(lhs, Rational(1), std::move(rhs));
                    } else {
                        bp.add_rule(lhs, Rational(1), {first_chk});
                    }
                    continue;
                }
                std::vector<int> outgoing;
                for (int j = 0; j < nt; ++j)
                    if (m.transitions[j].s == s && m.transitions[j].read == a)
                        outgoing.push_back(j);
                if (m.existential[s]) {
                    Rational p(1, static_cast<int>(outgoing.size()));
                    for (int j : outgoing) bp.add_rule(lhs, p, {trans(i, j)});
                } else {
                    std::vector<int> rhs;
                    for (int j : outgoing) rhs.push_back(trans(i, j));
                    bp.add_rule(lhs, Rational(1), std::move(rhs));
                }
            }
        }
        for (int j = 0; j < nt; ++j) {
            const AtmTransition& t = m.transitions[j];
            int lhs = trans(i, j);
            int ni = i + t.dir;
            if (ni >= 1 && ni <= n) {
                Rational p(1, na);
                for (int b = 0; b < na; ++b) bp.add_rule(lhs, p, {config(ni, t.s2, b)});
            } else {
                bp.add_rule(lhs, Rational(1), {etype});
            }
        }
    }
    if (variant == AtmVariant::Nba0) {
        for (int k = 0; k < n; ++k) bp.add_rule(first_chk + k, Rational(1), {first_chk + k});
    } else {
        bp.add_rule(first_chk, Rational(1), {first_chk});
    }
    bp.start = config(1, m.initial, word[0]);

    // the monitor: one state (i,a) per cell and remembered letter, plus f
    Nba& a = out.nba;
    a.alphabet = bp.types;
    auto monitor = [&](int i, int b) { return (i - 1) * na + b; };
    for (int i = 1; i <= n; ++i)
        for (int b = 0; b < na; ++b)
            a.add_state("m" + std::to_string(i) + "_" + m.alphabet[b],
                        variant == AtmVariant::Conba0);
    int f = a.add_state("f", true);
    for (int i = 1; i <= n; ++i) a.initial.push_back(monitor(i, word[i - 1]));
    std::sort(a.initial.begin(), a.initial.end());

    for (int i = 1; i <= n; ++i) {
        for (int b = 0; b < na; ++b) {
            int q = monitor(i, b);
            for (int j = 1; j <= n; ++j)
                for (int s = 0; s < ns; ++s)
                    for (int c = 0; c < na; ++c) {
                        int letter = config(j, s, c);
                        if (i != j || b == c) a.add_transition(q, letter, q);
                        else if (variant == AtmVariant::Conba0) a.add_transition(q, letter, f);
                    }
            for (int j = 1; j <= n; ++j)
                for (int k = 0; k < nt; ++k) {
                    int letter = trans(j, k);
                    if (i != j) a.add_transition(q, letter, q);
                    else if (m.transitions[k].read == b)
                        a.add_transition(q, letter, monitor(i, m.transitions[k].write));
                }
            if (variant == AtmVariant::Nba0) a.add_transition(q, first_chk + (i - 1), f);
        }
    }
    for (int x = 0; x < bp.n_types(); ++x) a.add_transition(f, x, f);
    return out;
}

// Direct acceptance decision by least-fixpoint alternating reachability over
// all configurations on the bounded tape; falling off the tape rejects.
inline bool atm_accepts(const AtmSpec& m, const std::vector<int>& word) {
    if (word.empty()) throw Error("EmptyWord", "the input word must be nonempty");
    {
        std::vector<Violation> v = validate_atm(m);
        if (!v.empty()) throw Error(v[0].code, v[0].detail);
    }
    int n = static_cast<int>(word.size());
    int ns = static_cast<int>(m.states.size());
    int na = static_cast<int>(m.alphabet.size());
    long long tapes = 1;
    for (int i = 0; i < n; ++i) {
        tapes *= na;
        if (tapes > 2'000'000) throw BudgetExceeded("tape space too large for the direct oracle");
    }
    auto tape_code = [&](const std::vector<int>& tape) {
        long long code = 0;
        for (int i = n - 1; i >= 0; --i) code = code * na + tape[i];
        return code;
    };
    long long total = static_cast<long long>(n) * ns * tapes;
    std::vector<char> acc(total, 0);
    auto idx = [&](int i, int s, long long tc) { return ((i - 1) * ns + s) * tapes + tc; };

    for (int s = 0; s < ns; ++s)
        if (s == m.accept)
            for (int i = 1; i <= n; ++i)
                for (long long tc = 0; tc < tapes; ++tc) acc[idx(i, s, tc)] = 1;

    std::vector<int> tape(n);
    for (bool changed = true; changed;) {
        changed = false;
        for (int i = 1; i <= n; ++i) {
            for (int s = 0; s < ns; ++s) {
                if (s == m.accept) continue;
                for (long long tc = 0; tc < tapes; ++tc) {
                    if (acc[idx(i, s, tc)]) continue;
                    long long rem = tc;
                    for (int k = 0; k < n; ++k) {
                        tape[k] = static_cast<int>(rem % na);
                        rem /= na;
                    }
                    bool ex = m.existential[s];
                    bool any = false, all = true, applicable = false;
                    for (const AtmTransition& t : m.transitions) {
                        if (t.s != s || t.read != tape[i - 1]) continue;
                        applicable = true;
                        int ni = i + t.dir;
                        bool good = false;
                        if (ni >= 1 && ni <= n) {
                            int old = tape[i - 1];
                            tape[i - 1] = t.write;
                            good = acc[idx(ni, t.s2, tape_code(tape))];
                            tape[i - 1] = old;
                        }
                        any = any || good;
                        all = all && good;
                    }
                    bool v = applicable && (ex ? any : all);
                    if (v) {
                        acc[idx(i, s, tc)] = 1;
                        changed = true;
                    }
                }
            }
        }
    }
    return acc[idx(1, m.initial, tape_code(word))] != 0;
}

}  // namespace bpmc
