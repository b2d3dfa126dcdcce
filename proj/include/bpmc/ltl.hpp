#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "automata.hpp"
#include "errors.hpp"

namespace bpmc {

enum class LtlKind { True, False, Atom, Not, And, Or, Next, Until, Release, Eventually, Always };

struct LtlNode {
    LtlKind kind;
    int a = -1;     // first child
    int b = -1;     // second child (binary operators)
    int atom = -1;  // letter index (Atom)
};

// Hash-consed formula store over a fixed alphabet. Children always have
// smaller ids than their parents.
class LtlPool {
public:
    explicit LtlPool(std::vector<std::string> alphabet) : alpha_(std::move(alphabet)) {}

    const std::vector<std::string>& alphabet() const { return alpha_; }
    const LtlNode& node(int id) const { return nodes_[id]; }
    int size() const { return static_cast<int>(nodes_.size()); }

    int mk_true() { return intern({LtlKind::True}); }
    int mk_false() { return intern({LtlKind::False}); }

    int mk_atom(int letter) {
        if (letter < 0 || letter >= static_cast<int>(alpha_.size()))
            throw Error("UnknownAtom", "atom index out of range");
        LtlNode n{LtlKind::Atom};
        n.atom = letter;
        return intern(n);
    }

    int mk_not(int x) {
        switch (nodes_[x].kind) {
            case LtlKind::Not: return nodes_[x].a;
            case LtlKind::True: return mk_false();
            case LtlKind::False: return mk_true();
            default: break;
        }
        LtlNode n{LtlKind::Not};
        n.a = x;
        return intern(n);
    }

    int mk_and(int x, int y) { return binary(LtlKind::And, x, y); }
    int mk_or(int x, int y) { return binary(LtlKind::Or, x, y); }
    int mk_until(int x, int y) { return binary(LtlKind::Until, x, y); }
    int mk_release(int x, int y) { return binary(LtlKind::Release, x, y); }

    int mk_next(int x) { return unary(LtlKind::Next, x); }
    int mk_eventually(int x) { return unary(LtlKind::Eventually, x); }
    int mk_always(int x) { return unary(LtlKind::Always, x); }

    std::string to_string(int id) const { return print(id, 0); }

private:
    int unary(LtlKind k, int x) {
        LtlNode n{k};
        n.a = x;
        return intern(n);
    }

    int binary(LtlKind k, int x, int y) {
        LtlNode n{k};
        n.a = x;
        n.b = y;
        return intern(n);
    }

    int intern(LtlNode n) {
        auto key = std::make_tuple(static_cast<int>(n.kind), n.a, n.b, n.atom);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        nodes_.push_back(n);
        int id = static_cast<int>(nodes_.size()) - 1;
        memo_.emplace(key, id);
        return id;
    }

    // Precedence: | < & < U/R < unary < atoms.
    static int prec(LtlKind k) {
        switch (k) {
            case LtlKind::Or: return 1;
            case LtlKind::And: return 2;
            case LtlKind::Until:
            case LtlKind::Release: return 3;
            case LtlKind::Not:
            case LtlKind::Next:
            case LtlKind::Eventually:
            case LtlKind::Always: return 4;
            default: return 5;
        }
    }

    std::string print(int id, int min_prec) const {
        const LtlNode& n = nodes_[id];
        int p = prec(n.kind);
        std::string s;
        switch (n.kind) {
            case LtlKind::True: s = "true"; break;
            case LtlKind::False: s = "false"; break;
            case LtlKind::Atom: s = alpha_[n.atom]; break;
            case LtlKind::Not: s = "!" + print(n.a, p + 1); break;
            case LtlKind::Next: s = "X " + print(n.a, p); break;
            case LtlKind::Eventually: s = "F " + print(n.a, p); break;
            case LtlKind::Always: s = "G " + print(n.a, p); break;
            case LtlKind::And: s = print(n.a, p + 1) + " & " + print(n.b, p); break;
            case LtlKind::Or: s = print(n.a, p + 1) + " | " + print(n.b, p); break;
            case LtlKind::Until: s = print(n.a, p + 1) + " U " + print(n.b, p); break;
            case LtlKind::Release: s = print(n.a, p + 1) + " R " + print(n.b, p); break;
        }
        if (p < min_prec) return "(" + s + ")";
        return s;
    }

    std::vector<std::string> alpha_;
    std::vector<LtlNode> nodes_;
    std::map<std::tuple<int, int, int, int>, int> memo_;
};

namespace detail {

struct LtlToken {
    enum Kind { Ident, Sym, End } kind = End;
    std::string text;
    int line = 1, col = 1;
};

inline std::vector<LtlToken> ltl_tokenize(const std::string& text) {
    std::vector<LtlToken> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](char c) {
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(c);
            ++i;
            continue;
        }
        LtlToken t;
        t.line = line;
        t.col = col;
        if (c == '!' || c == '&' || c == '|' || c == '(' || c == ')') {
            t.kind = LtlToken::Sym;
            t.text = std::string(1, c);
            advance(c);
            ++i;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = LtlToken::Ident;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
                t.text.push_back(text[i]);
                advance(text[i]);
                ++i;
            }
        } else {
            throw ParseError(std::string("unexpected character '") + c + "' in formula", line, col);
        }
        out.push_back(std::move(t));
    }
    LtlToken end;
    end.kind = LtlToken::End;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

class LtlParser {
public:
    LtlParser(LtlPool& pool, const std::string& text)
        : pool_(pool), toks_(ltl_tokenize(text)) {}

    int parse() {
        int f = parse_or();
        if (cur().kind != LtlToken::End)
            throw ParseError("trailing input after formula", cur().line, cur().col);
        return f;
    }

private:
    const LtlToken& cur() const { return toks_[pos_]; }
    void next() { ++pos_; }

    bool is_sym(const char* s) const { return cur().kind == LtlToken::Sym && cur().text == s; }

    // Alphabet letters shadow operator and constant keywords of the same name.
    bool is_letter(const std::string& s) const {
        return std::find(pool_.alphabet().begin(), pool_.alphabet().end(), s) !=
               pool_.alphabet().end();
    }

    bool is_keyword(const char* kw) const {
        return cur().kind == LtlToken::Ident && cur().text == kw && !is_letter(cur().text);
    }

    int parse_or() {
        int f = parse_and();
        while (is_sym("|")) {
            next();
            f = pool_.mk_or(f, parse_and());
        }
        return f;
    }

    int parse_and() {
        int f = parse_until();
        while (is_sym("&")) {
            next();
            f = pool_.mk_and(f, parse_until());
        }
        return f;
    }

    // Right associative; at infix position U and R always act as operators.
    int parse_until() {
        int f = parse_unary();
        if (cur().kind == LtlToken::Ident && (cur().text == "U" || cur().text == "R")) {
            bool rel = cur().text == "R";
            next();
            int rhs = parse_until();
            return rel ? pool_.mk_release(f, rhs) : pool_.mk_until(f, rhs);
        }
        return f;
    }

    int parse_unary() {
        if (is_sym("!")) {
            next();
            return pool_.mk_not(parse_unary());
        }
        if (is_keyword("X")) {
            next();
            return pool_.mk_next(parse_unary());
        }
        if (is_keyword("F")) {
            next();
            return pool_.mk_eventually(parse_unary());
        }
        if (is_keyword("G")) {
            next();
            return pool_.mk_always(parse_unary());
        }
        return parse_primary();
    }

    int parse_primary() {
        if (is_sym("(")) {
            next();
            int f = parse_or();
            if (!is_sym(")")) throw ParseError("expected ')'", cur().line, cur().col);
            next();
            return f;
        }
        if (cur().kind == LtlToken::Ident) {
            const std::string& name = cur().text;
            if (is_letter(name)) {
                int letter = static_cast<int>(
                    std::find(pool_.alphabet().begin(), pool_.alphabet().end(), name) -
                    pool_.alphabet().begin());
                next();
                return pool_.mk_atom(letter);
            }
            if (name == "true" && !is_letter(name)) {
                next();
                return pool_.mk_true();
            }
            if (name == "false" && !is_letter(name)) {
                next();
                return pool_.mk_false();
            }
            throw ParseError("'" + name + "' is not a letter of the alphabet", cur().line,
                             cur().col);
        }
        throw ParseError("expected a formula", cur().line, cur().col);
    }

    LtlPool& pool_;
    std::vector<LtlToken> toks_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline int parse_ltl(LtlPool& pool, const std::string& text) {
    return detail::LtlParser(pool, text).parse();
}

inline int negate(LtlPool& pool, int f) { return pool.mk_not(f); }

// Rewrites F, G and R away so only True/False/Atom/Not/And/Or/Next/Until
// remain: F p = true U p, G p = !(true U !p), p R q = !(!p U !q).
inline int desugar(LtlPool& pool, int f) {
    std::map<int, int> memo;
    auto rec = [&](auto&& self, int id) -> int {
        auto it = memo.find(id);
        if (it != memo.end()) return it->second;
        const LtlNode n = pool.node(id);
        int out;
        switch (n.kind) {
            case LtlKind::True:
            case LtlKind::False:
            case LtlKind::Atom: out = id; break;
            case LtlKind::Not: out = pool.mk_not(self(self, n.a)); break;
            case LtlKind::And: out = pool.mk_and(self(self, n.a), self(self, n.b)); break;
            case LtlKind::Or: out = pool.mk_or(self(self, n.a), self(self, n.b)); break;
            case LtlKind::Next: out = pool.mk_next(self(self, n.a)); break;
            case LtlKind::Until: out = pool.mk_until(self(self, n.a), self(self, n.b)); break;
            case LtlKind::Eventually:
                out = pool.mk_until(pool.mk_true(), self(self, n.a));
                break;
            case LtlKind::Always:
                out = pool.mk_not(pool.mk_until(pool.mk_true(), pool.mk_not(self(self, n.a))));
                break;
            case LtlKind::Release:
                out = pool.mk_not(pool.mk_until(pool.mk_not(self(self, n.a)),
                                                pool.mk_not(self(self, n.b))));
                break;
            default: throw Error("Internal", "unhandled formula kind");
        }
        memo.emplace(id, out);
        return out;
    };
    return rec(rec, f);
}

// Evaluates a formula on the ultimately periodic word u v^omega given as
// letter indices. Fixpoint sweeps over the finitely many positions; handles
// every operator directly, no rewriting involved.
inline bool eval_lasso(const LtlPool& pool, int f, const std::vector<int>& u,
                       const std::vector<int>& v) {
    if (v.empty()) throw Error("EmptyPeriod", "lasso period must be nonempty");
    int P = static_cast<int>(u.size() + v.size());
    auto next_pos = [&](int i) { return i + 1 < P ? i + 1 : static_cast<int>(u.size()); };
    auto letter_at = [&](int i) {
        return i < static_cast<int>(u.size()) ? u[i] : v[i - u.size()];
    };

    // One truth table per node id up to f; children have smaller ids.
    std::vector<std::vector<char>> val(f + 1);
    for (int id = 0; id <= f; ++id) {
        const LtlNode& n = pool.node(id);
        std::vector<char>& t = val[id];
        t.assign(P, 0);
        auto fix = [&](char init, auto&& step) {
            t.assign(P, init);
            for (bool changed = true; changed;) {
                changed = false;
                for (int i = P - 1; i >= 0; --i) {
                    char nv = step(i);
                    if (nv != t[i]) {
                        t[i] = nv;
                        changed = true;
                    }
                }
            }
        };
        switch (n.kind) {
            case LtlKind::True: t.assign(P, 1); break;
            case LtlKind::False: break;
            case LtlKind::Atom:
                for (int i = 0; i < P; ++i) t[i] = letter_at(i) == n.atom;
                break;
            case LtlKind::Not:
                for (int i = 0; i < P; ++i) t[i] = !val[n.a][i];
                break;
            case LtlKind::And:
                for (int i = 0; i < P; ++i) t[i] = val[n.a][i] && val[n.b][i];
                break;
            case LtlKind::Or:
                for (int i = 0; i < P; ++i) t[i] = val[n.a][i] || val[n.b][i];
                break;
            case LtlKind::Next:
                for (int i = 0; i < P; ++i) t[i] = val[n.a][next_pos(i)];
                break;
            case LtlKind::Until:
                fix(0, [&](int i) -> char {
                    return val[n.b][i] || (val[n.a][i] && t[next_pos(i)]);
                });
                break;
            case LtlKind::Eventually:
                fix(0, [&](int i) -> char { return val[n.a][i] || t[next_pos(i)]; });
                break;
            case LtlKind::Always:
                fix(1, [&](int i) -> char { return val[n.a][i] && t[next_pos(i)]; });
                break;
            case LtlKind::Release:
                fix(1, [&](int i) -> char {
                    return val[n.b][i] && (val[n.a][i] || t[next_pos(i)]);
                });
                break;
        }
    }
    return val[f][0];
}

namespace detail {

// A tableau state: the letter it reads plus a guessed valuation of the
// temporal subformulas, which determines the truth of every subformula.
struct TableauState {
    int letter = 0;
    std::uint32_t bits = 0;
    std::vector<char> val;  // indexed by subformula position
};

}  // namespace detail

// Builds an unambiguous Buechi automaton accepting exactly the words that
// satisfy the formula. States carry full valuations of the temporal
// subformulas, so each word admits at most one run: the semantic one.
inline Nba ltl_to_uba(LtlPool& pool, int f, int budget = 1 << 18) {
    int root = desugar(pool, f);

    // Subformulas of the rewritten root, ascending (children first).
    std::vector<int> subs;
    {
        std::vector<char> seen(root + 1, 0);
        std::vector<int> stack{root};
        seen[root] = 1;
        while (!stack.empty()) {
            int id = stack.back();
            stack.pop_back();
            subs.push_back(id);
            const LtlNode& n = pool.node(id);
            for (int c : {n.a, n.b})
                if (c >= 0 && !seen[c]) {
                    seen[c] = 1;
                    stack.push_back(c);
                }
        }
        std::sort(subs.begin(), subs.end());
    }
    std::vector<int> pos_of(root + 1, -1);
    for (std::size_t i = 0; i < subs.size(); ++i) pos_of[subs[i]] = static_cast<int>(i);

    std::vector<int> temporal;  // ids of Next and Until nodes, ascending
    for (int id : subs) {
        LtlKind k = pool.node(id).kind;
        if (k == LtlKind::Next || k == LtlKind::Until) temporal.push_back(id);
    }
    int t = static_cast<int>(temporal.size());
    if (t > 24) throw BudgetExceeded("too many temporal subformulas: " + std::to_string(t));
    std::vector<int> tbit(root + 1, -1);
    for (int i = 0; i < t; ++i) tbit[temporal[i]] = i;

    int n_letters = static_cast<int>(pool.alphabet().size());
    std::vector<detail::TableauState> states;
    for (int letter = 0; letter < n_letters; ++letter) {
        for (std::uint32_t bits = 0; bits < (1u << t); ++bits) {
            std::vector<char> val(subs.size(), 0);
            bool ok = true;
            for (std::size_t i = 0; i < subs.size() && ok; ++i) {
                const LtlNode& n = pool.node(subs[i]);
                char v = 0;
                switch (n.kind) {
                    case LtlKind::True: v = 1; break;
                    case LtlKind::False: v = 0; break;
                    case LtlKind::Atom: v = n.atom == letter; break;
                    case LtlKind::Not: v = !val[pos_of[n.a]]; break;
                    case LtlKind::And: v = val[pos_of[n.a]] && val[pos_of[n.b]]; break;
                    case LtlKind::Or: v = val[pos_of[n.a]] || val[pos_of[n.b]]; break;
                    case LtlKind::Next:
                    case LtlKind::Until: v = (bits >> tbit[subs[i]]) & 1; break;
                    default: throw Error("Internal", "non-kernel node after rewriting");
                }
                val[i] = v;
                if (n.kind == LtlKind::Until) {
                    // p U q is true when q holds and false when both p and q fail.
                    char vp = val[pos_of[n.a]], vq = val[pos_of[n.b]];
                    if (vq && !v) ok = false;
                    if (!vp && !vq && v) ok = false;
                }
            }
            if (!ok) continue;
            states.push_back({letter, bits, std::move(val)});
            if (static_cast<int>(states.size()) > budget)
                throw BudgetExceeded("tableau exceeded " + std::to_string(budget) + " states");
        }
    }

    int N = static_cast<int>(states.size());
    // edges[s] = successor tableau states (the letter is the target's).
    std::vector<std::vector<int>> edges(N);
    for (int s = 0; s < N; ++s) {
        for (int s2 = 0; s2 < N; ++s2) {
            bool ok = true;
            for (int i = 0; i < t && ok; ++i) {
                const LtlNode& n = pool.node(temporal[i]);
                char here = states[s].val[pos_of[temporal[i]]];
                if (n.kind == LtlKind::Next) {
                    ok = here == states[s2].val[pos_of[n.a]];
                } else {
                    // Carry an unresolved p U q over to the successor.
                    char vp = states[s].val[pos_of[n.a]];
                    char vq = states[s].val[pos_of[n.b]];
                    if (vp && !vq) ok = here == states[s2].val[pos_of[temporal[i]]];
                }
            }
            if (ok) edges[s].push_back(s2);
        }
    }

    // One fairness class per Until: states where it is false or discharged.
    std::vector<int> untils;
    for (int id : temporal)
        if (pool.node(id).kind == LtlKind::Until) untils.push_back(id);
    int m = static_cast<int>(untils.size());
    auto fair = [&](int s, int j) {
        const LtlNode& n = pool.node(untils[j]);
        return !states[s].val[pos_of[untils[j]]] || states[s].val[pos_of[n.b]];
    };

    Nba out;
    out.alphabet = pool.alphabet();
    int iota = out.add_state("init", false);
    out.initial = {iota};
    if (m <= 1) {
        std::vector<int> id(N);
        for (int s = 0; s < N; ++s)
            id[s] = out.add_state("s" + std::to_string(s), m == 0 || fair(s, 0));
        for (int s = 0; s < N; ++s)
            for (int s2 : edges[s]) out.add_transition(id[s], states[s2].letter, id[s2]);
        for (int s = 0; s < N; ++s)
            if (states[s].val[pos_of[root]]) out.add_transition(iota, states[s].letter, id[s]);
    } else {
        // Round robin counter: advance from (s, j) when s discharges class j,
        // accept on wrapping through class 0.
        std::vector<std::vector<int>> id(N, std::vector<int>(m));
        for (int s = 0; s < N; ++s)
            for (int j = 0; j < m; ++j)
                id[s][j] = out.add_state("s" + std::to_string(s) + "_c" + std::to_string(j),
                                         j == 0 && fair(s, 0));
        for (int s = 0; s < N; ++s)
            for (int j = 0; j < m; ++j) {
                int j2 = fair(s, j) ? (j + 1) % m : j;
                for (int s2 : edges[s]) out.add_transition(id[s][j], states[s2].letter, id[s2][j2]);
            }
        for (int s = 0; s < N; ++s)
            if (states[s].val[pos_of[root]]) out.add_transition(iota, states[s].letter, id[s][0]);
    }

    Nba trimmed = trim_useful(out).aut;
    if (trimmed.n_states() == 0) {
        // Empty language: keep a well-formed automaton with a dead initial state.
        Nba dead;
        dead.alphabet = pool.alphabet();
        dead.add_state("dead", false);
        dead.initial = {0};
        return dead;
    }
    return trimmed;
}

}  // namespace bpmc
