#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "automata.hpp"
#include "bp.hpp"
#include "errors.hpp"
#include "hardness.hpp"
#include "rational.hpp"

namespace bpmc {

namespace detail {

struct Token {
    enum class Kind { Ident, Number, Punct, End } kind = Kind::End;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) {
        int line = 1, col = 1;
        std::size_t i = 0;
        auto push = [&](Token::Kind k, std::string t, int l, int c) {
            toks_.push_back({k, std::move(t), l, c});
        };
        while (i < src.size()) {
            char ch = src[i];
            if (ch == '\n') {
                ++line;
                col = 1;
                ++i;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(ch))) {
                ++col;
                ++i;
                continue;
            }
            if (ch == '#') {
                while (i < src.size() && src[i] != '\n') ++i;
                continue;
            }
            int tl = line, tc = col;
            if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
                std::size_t j = i;
                while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                          src[j] == '_'))
                    ++j;
                push(Token::Kind::Ident, src.substr(i, j - i), tl, tc);
                col += static_cast<int>(j - i);
                i = j;
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(ch))) {
                std::size_t j = i;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                if (j < src.size() && src[j] == '.') {
                    ++j;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                }
                push(Token::Kind::Number, src.substr(i, j - i), tl, tc);
                col += static_cast<int>(j - i);
                i = j;
                continue;
            }
            if (ch == '-' && i + 1 < src.size() && src[i + 1] == '>') {
                push(Token::Kind::Punct, "->", tl, tc);
                i += 2;
                col += 2;
                continue;
            }
            std::string p(1, ch);
            if (p != ";" && p != ":" && p != "," && p != "=" && p != "(" && p != ")" &&
                p != "+" && p != "-" && p != "/")
                throw ParseError("unexpected character '" + p + "'", tl, tc);
            push(Token::Kind::Punct, p, tl, tc);
            ++i;
            ++col;
        }
        toks_.push_back({Token::Kind::End, "", line, col});
    }

    const Token& peek() const { return toks_[pos_]; }
    Token next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }
    bool at_end() const { return peek().kind == Token::Kind::End; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, peek().line, peek().col);
    }
    std::string expect_ident(const std::string& what) {
        if (peek().kind != Token::Kind::Ident) fail("expected " + what);
        return next().text;
    }
    void expect_punct(const std::string& p) {
        if (peek().kind != Token::Kind::Punct || peek().text != p)
            fail("expected '" + p + "'");
        next();
    }
    bool accept_punct(const std::string& p) {
        if (peek().kind == Token::Kind::Punct && peek().text == p) {
            next();
            return true;
        }
        return false;
    }
    bool accept_ident(const std::string& word) {
        if (peek().kind == Token::Kind::Ident && peek().text == word) {
            next();
            return true;
        }
        return false;
    }
    // a number, optionally followed by / number; returns the spelled text
    std::string expect_prob() {
        if (peek().kind != Token::Kind::Number) fail("expected a probability");
        std::string t = next().text;
        if (accept_punct("/")) {
            if (peek().kind != Token::Kind::Number) fail("expected a denominator");
            t += "/" + next().text;
        }
        return t;
    }
    int expect_int(const std::string& what) {
        if (peek().kind != Token::Kind::Number || peek().text.find('.') != std::string::npos)
            fail("expected " + what);
        return std::stoi(next().text);
    }

  private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Branching process files.
//
//   bp;            (or: bp eps;)
//   types I B;     (optional, pins the index order)
//   start I;
//   I -> 9/10 : I;
//   I -> 1/10 : I B;
//   B -> 1/2 : eps;
//
// Types are indexed by first appearance. `eps` denotes the empty rhs and is
// reserved. `#` starts a comment.

inline BranchingProcess parse_bp(const std::string& text) {
    detail::Lexer lx(text);
    BranchingProcess bp;
    if (!lx.accept_ident("bp")) lx.fail("expected 'bp' header");
    if (lx.accept_ident("eps")) bp.eps_allowed = true;
    lx.expect_punct(";");

    auto intern = [&](const std::string& name) {
        if (name == "eps") lx.fail("'eps' is reserved");
        int t = bp.find_type(name);
        return t >= 0 ? t : bp.add_type(name);
    };
    int start = -1;
    while (!lx.at_end()) {
        if (lx.peek().kind != detail::Token::Kind::Ident) lx.fail("expected a statement");
        // `start X;` / `types X Y;` unless the word is a type on a rule lhs
        bool keyword_form = false;
        if (lx.peek().text == "start" || lx.peek().text == "types") {
            detail::Lexer probe = lx;
            probe.next();
            keyword_form = probe.peek().kind == detail::Token::Kind::Ident;
        }
        if (keyword_form && lx.peek().text == "types") {
            lx.next();
            while (lx.peek().kind == detail::Token::Kind::Ident) intern(lx.next().text);
            lx.expect_punct(";");
            continue;
        }
        if (keyword_form) {
            lx.next();
            if (start >= 0) lx.fail("duplicate start statement");
            start = intern(lx.expect_ident("a start type"));
            lx.expect_punct(";");
            continue;
        }
        int lhs = intern(lx.expect_ident("a type"));
        lx.expect_punct("->");
        Rational p = parse_rational(lx.expect_prob());
        lx.expect_punct(":");
        std::vector<int> rhs;
        if (!lx.accept_ident("eps")) {
            while (lx.peek().kind == detail::Token::Kind::Ident)
                rhs.push_back(intern(lx.next().text));
            if (rhs.empty()) lx.fail("expected a right-hand side");
        }
        lx.expect_punct(";");
        bp.add_rule(lhs, p, std::move(rhs));
    }
    if (start < 0) throw ParseError("missing start statement", 1, 1);
    bp.start = start;
    return bp;
}

inline std::string print_bp(const BranchingProcess& bp) {
    std::ostringstream os;
    os << (bp.eps_allowed ? "bp eps;\n" : "bp;\n");
    os << "types";
    for (const std::string& t : bp.types) os << " " << t;
    os << ";\nstart " << bp.type_name(bp.start) << ";\n";
    for (int t = 0; t < bp.n_types(); ++t) {
        for (const Rule& r : bp.rules[t]) {
            os << bp.type_name(t) << " -> " << rat_str(r.prob) << " :";
            if (r.rhs.empty()) {
                os << " eps";
            } else {
                for (int s : r.rhs) os << " " << bp.type_name(s);
            }
            os << ";\n";
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Automaton files.
//
//   nba;                           dpa;
//   alphabet I B D;                alphabet I B D;
//   states q0 q1;                  states q0 q1;
//   initial q0;                    initial q0;
//   accepting q1;                  priority q0 1;
//   q0 -I-> q0;                    priority q1 2;
//   q0 -D-> q1;                    q0 -I-> q1;

namespace detail {

inline std::vector<std::string> parse_name_list(Lexer& lx, const std::string& what) {
    std::vector<std::string> out;
    while (lx.peek().kind == Token::Kind::Ident) out.push_back(lx.next().text);
    if (out.empty()) lx.fail("expected " + what);
    lx.expect_punct(";");
    return out;
}

}  // namespace detail

inline Nba parse_nba(const std::string& text) {
    detail::Lexer lx(text);
    if (!lx.accept_ident("nba")) lx.fail("expected 'nba' header");
    lx.expect_punct(";");
    Nba a;
    if (!lx.accept_ident("alphabet")) lx.fail("expected alphabet statement");
    a.alphabet = detail::parse_name_list(lx, "letters");
    if (!lx.accept_ident("states")) lx.fail("expected states statement");
    for (const std::string& s : detail::parse_name_list(lx, "states")) {
        if (a.find_state(s) >= 0) lx.fail("duplicate state " + s);
        a.add_state(s);
    }
    auto state_of = [&](const std::string& n) {
        int q = a.find_state(n);
        if (q < 0) lx.fail("unknown state " + n);
        return q;
    };
    auto letter_of = [&](const std::string& n) {
        int l = a.find_letter(n);
        if (l < 0) lx.fail("unknown letter " + n);
        return l;
    };
    if (!lx.accept_ident("initial")) lx.fail("expected initial statement");
    for (const std::string& s : detail::parse_name_list(lx, "initial states"))
        a.initial.push_back(state_of(s));
    std::sort(a.initial.begin(), a.initial.end());
    a.initial.erase(std::unique(a.initial.begin(), a.initial.end()), a.initial.end());
    if (!lx.accept_ident("accepting")) lx.fail("expected accepting statement");
    while (lx.peek().kind == detail::Token::Kind::Ident)
        a.accepting[state_of(lx.next().text)] = true;
    lx.expect_punct(";");
    while (!lx.at_end()) {
        int q = state_of(lx.expect_ident("a source state"));
        lx.expect_punct("-");
        int l = letter_of(lx.expect_ident("a letter"));
        lx.expect_punct("->");
        int r = state_of(lx.expect_ident("a target state"));
        lx.expect_punct(";");
        a.add_transition(q, l, r);
    }
    return a;
}

inline Dpa parse_dpa(const std::string& text) {
    detail::Lexer lx(text);
    if (!lx.accept_ident("dpa")) lx.fail("expected 'dpa' header");
    lx.expect_punct(";");
    Dpa d;
    if (!lx.accept_ident("alphabet")) lx.fail("expected alphabet statement");
    d.alphabet = detail::parse_name_list(lx, "letters");
    auto find_state = [&](const std::string& n) {
        for (std::size_t q = 0; q < d.states.size(); ++q)
            if (d.states[q] == n) return static_cast<int>(q);
        return -1;
    };
    if (!lx.accept_ident("states")) lx.fail("expected states statement");
    for (const std::string& s : detail::parse_name_list(lx, "states")) {
        if (find_state(s) >= 0) lx.fail("duplicate state " + s);
        d.add_state(s, -1);
    }
    auto state_of = [&](const std::string& n) {
        int q = find_state(n);
        if (q < 0) lx.fail("unknown state " + n);
        return q;
    };
    if (!lx.accept_ident("initial")) lx.fail("expected initial statement");
    d.initial = state_of(lx.expect_ident("an initial state"));
    lx.expect_punct(";");
    while (lx.accept_ident("priority")) {
        int q = state_of(lx.expect_ident("a state"));
        if (d.priority[q] >= 0) lx.fail("duplicate priority for " + d.states[q]);
        int p = lx.expect_int("a priority");
        if (p < 0) lx.fail("priorities must be nonnegative");
        d.priority[q] = p;
        lx.expect_punct(";");
    }
    for (std::size_t q = 0; q < d.states.size(); ++q)
        if (d.priority[q] < 0)
            throw Error("MissingPriority", "state " + d.states[q] + " has no priority");
    while (!lx.at_end()) {
        int q = state_of(lx.expect_ident("a source state"));
        lx.expect_punct("-");
        std::string ln = lx.expect_ident("a letter");
        int l = d.find_letter(ln);
        if (l < 0) lx.fail("unknown letter " + ln);
        lx.expect_punct("->");
        int r = state_of(lx.expect_ident("a target state"));
        lx.expect_punct(";");
        if (d.next[q][l] >= 0) lx.fail("duplicate transition from " + d.states[q] + " on " + ln);
        d.next[q][l] = r;
    }
    for (std::size_t q = 0; q < d.states.size(); ++q)
        for (int l = 0; l < d.n_letters(); ++l)
            if (d.next[q][l] < 0)
                throw Error("PartialDpa", "state " + d.states[q] + " has no transition on " +
                                              d.alphabet[l]);
    return d;
}

inline std::string print_nba(const Nba& a) {
    std::ostringstream os;
    os << "nba;\nalphabet";
    for (const std::string& l : a.alphabet) os << " " << l;
    os << ";\nstates";
    for (const std::string& s : a.states) os << " " << s;
    os << ";\ninitial";
    for (int q : a.initial) os << " " << a.states[q];
    os << ";\naccepting";
    for (std::size_t q = 0; q < a.states.size(); ++q)
        if (a.accepting[q]) os << " " << a.states[q];
    os << ";\n";
    for (std::size_t q = 0; q < a.states.size(); ++q)
        for (int l = 0; l < a.n_letters(); ++l)
            for (int r : a.delta[q][l])
                os << a.states[q] << " -" << a.alphabet[l] << "-> " << a.states[r] << ";\n";
    return os.str();
}

inline std::string print_dpa(const Dpa& d) {
    std::ostringstream os;
    os << "dpa;\nalphabet";
    for (const std::string& l : d.alphabet) os << " " << l;
    os << ";\nstates";
    for (const std::string& s : d.states) os << " " << s;
    os << ";\ninitial " << d.states[d.initial] << ";\n";
    for (std::size_t q = 0; q < d.states.size(); ++q)
        os << "priority " << d.states[q] << " " << d.priority[q] << ";\n";
    for (std::size_t q = 0; q < d.states.size(); ++q)
        for (int l = 0; l < d.n_letters(); ++l)
            os << d.states[q] << " -" << d.alphabet[l] << "-> " << d.states[d.next[q][l]]
               << ";\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Circuit files. Line-oriented, declare before use:
//
//   input a = 1;
//   gate g = AND(a, b);
//   output g;

inline MonotoneCircuit parse_circuit(const std::string& text) {
    detail::Lexer lx(text);
    MonotoneCircuit c;
    auto lookup = [&](const std::string& n) {
        int v = c.find(n);
        if (v < 0) lx.fail("unknown node " + n);
        return v;
    };
    while (!lx.at_end()) {
        if (lx.accept_ident("input")) {
            CircuitNode node;
            node.kind = CircuitNode::Kind::Input;
            node.name = lx.expect_ident("an input name");
            if (c.find(node.name) >= 0) lx.fail("duplicate node " + node.name);
            lx.expect_punct("=");
            int v = lx.expect_int("0 or 1");
            if (v != 0 && v != 1) lx.fail("inputs must be 0 or 1");
            node.value = v == 1;
            lx.expect_punct(";");
            c.nodes.push_back(std::move(node));
        } else if (lx.accept_ident("gate")) {
            CircuitNode node;
            node.name = lx.expect_ident("a gate name");
            if (c.find(node.name) >= 0) lx.fail("duplicate node " + node.name);
            lx.expect_punct("=");
            if (lx.accept_ident("AND")) node.kind = CircuitNode::Kind::And;
            else if (lx.accept_ident("OR")) node.kind = CircuitNode::Kind::Or;
            else lx.fail("expected AND or OR");
            lx.expect_punct("(");
            node.children.push_back(lookup(lx.expect_ident("a node name")));
            while (lx.accept_punct(","))
                node.children.push_back(lookup(lx.expect_ident("a node name")));
            lx.expect_punct(")");
            lx.expect_punct(";");
            c.nodes.push_back(std::move(node));
        } else if (lx.accept_ident("output")) {
            if (c.output >= 0) lx.fail("duplicate output statement");
            c.output = lookup(lx.expect_ident("a node name"));
            lx.expect_punct(";");
        } else {
            lx.fail("expected input, gate, or output");
        }
    }
    validate_circuit(c);
    return c;
}

// ---------------------------------------------------------------------------
// Alternating-machine files; the transition quintuple is (state, read, write,
// head direction, next state):
//
//   atm;
//   alphabet a b;
//   exists s0;
//   forall s1;
//   accept sacc;
//   initial s0;
//   trans s0 a b + s1;
//   trans s1 b a - sacc;

inline AtmSpec parse_atm(const std::string& text) {
    detail::Lexer lx(text);
    if (!lx.accept_ident("atm")) lx.fail("expected 'atm' header");
    lx.expect_punct(";");
    AtmSpec m;
    if (!lx.accept_ident("alphabet")) lx.fail("expected alphabet statement");
    m.alphabet = detail::parse_name_list(lx, "letters");
    auto declare = [&](const std::string& n, bool ex) {
        if (m.find_state(n) >= 0) lx.fail("duplicate state " + n);
        m.states.push_back(n);
        m.existential.push_back(ex ? 1 : 0);
    };
    if (!lx.accept_ident("exists")) lx.fail("expected exists statement");
    while (lx.peek().kind == detail::Token::Kind::Ident) declare(lx.next().text, true);
    lx.expect_punct(";");
    if (!lx.accept_ident("forall")) lx.fail("expected forall statement");
    while (lx.peek().kind == detail::Token::Kind::Ident) declare(lx.next().text, false);
    lx.expect_punct(";");
    if (!lx.accept_ident("accept")) lx.fail("expected accept statement");
    declare(lx.expect_ident("an accepting state"), false);
    m.accept = static_cast<int>(m.states.size()) - 1;
    lx.expect_punct(";");
    if (!lx.accept_ident("initial")) lx.fail("expected initial statement");
    {
        std::string n = lx.expect_ident("an initial state");
        m.initial = m.find_state(n);
        if (m.initial < 0) lx.fail("unknown state " + n);
    }
    lx.expect_punct(";");
    auto state_of = [&](const std::string& n) {
        int s = m.find_state(n);
        if (s < 0) lx.fail("unknown state " + n);
        return s;
    };
    auto letter_of = [&](const std::string& n) {
        int l = m.find_letter(n);
        if (l < 0) lx.fail("unknown letter " + n);
        return l;
    };
    while (!lx.at_end()) {
        if (!lx.accept_ident("trans")) lx.fail("expected trans statement");
        AtmTransition t;
        t.s = state_of(lx.expect_ident("a source state"));
        t.read = letter_of(lx.expect_ident("a letter"));
        t.write = letter_of(lx.expect_ident("a letter"));
        if (lx.accept_punct("+")) t.dir = +1;
        else if (lx.accept_punct("-")) t.dir = -1;
        else lx.fail("expected + or -");
        t.s2 = state_of(lx.expect_ident("a target state"));
        lx.expect_punct(";");
        m.transitions.push_back(t);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Small file and string helpers shared by the command-line front end.

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("Io", "cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("Io", "cannot write " + path);
    out << content;
    if (!out) throw Error("Io", "cannot write " + path);
}

inline std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace bpmc
