#pragma once

// Shared test helpers: deterministic random instance generators and small
// structural comparators. Everything takes an explicit engine so individual
// tests stay reproducible.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <bpmc/automata.hpp>
#include <bpmc/bp.hpp>
#include <bpmc/hardness.hpp>
#include <bpmc/ltl.hpp>
#include <bpmc/matrix.hpp>
#include <bpmc/oracle.hpp>

namespace testutil {

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline std::string samples_dir() { return BPMC_SAMPLES_DIR; }

// epsilon-free process: 1..max_types types, 1..3 rules per type with exact
// uniform-denominator probabilities, rhs lengths 1..2
inline bpmc::BranchingProcess random_bp(Rng& rng, int max_types) {
    bpmc::BranchingProcess bp;
    int n = pick(rng, 1, max_types);
    for (int i = 0; i < n; ++i) bp.add_type("T" + std::to_string(i));
    for (int t = 0; t < n; ++t) {
        int k = pick(rng, 1, 3);
        std::vector<int> num(k);
        int total = 0;
        for (int& x : num) {
            x = pick(rng, 1, 4);
            total += x;
        }
        for (int i = 0; i < k; ++i) {
            std::vector<int> rhs;
            int len = pick(rng, 1, 2);
            for (int j = 0; j < len; ++j) rhs.push_back(pick(rng, 0, n - 1));
            bp.add_rule(t, bpmc::Rational(num[i], total), std::move(rhs));
        }
    }
    bp.start = 0;
    return bp;
}

// single-child rules only: the process is a Markov chain over its types
inline bpmc::BranchingProcess random_chain_bp(Rng& rng, int max_types) {
    bpmc::BranchingProcess bp;
    int n = pick(rng, 1, max_types);
    for (int i = 0; i < n; ++i) bp.add_type("T" + std::to_string(i));
    for (int t = 0; t < n; ++t) {
        int k = pick(rng, 1, 3);
        std::vector<int> num(k);
        int total = 0;
        for (int& x : num) {
            x = pick(rng, 1, 4);
            total += x;
        }
        for (int i = 0; i < k; ++i) bp.add_rule(t, bpmc::Rational(num[i], total), {pick(rng, 0, n - 1)});
    }
    bp.start = 0;
    return bp;
}

// size-bounded formula over atoms 0..n_atoms-1; temporal_left caps the
// number of temporal operators so downstream constructions stay small
inline int random_formula(bpmc::LtlPool& pool, Rng& rng, int n_atoms, int budget,
                          int temporal_left) {
    if (budget <= 1) {
        int c = pick(rng, 0, n_atoms + 1);
        if (c < n_atoms) return pool.mk_atom(c);
        return c == n_atoms ? pool.mk_true() : pool.mk_false();
    }
    for (;;) {
        int op = pick(rng, 0, 7);
        bool temporal = op == 1 || op == 2 || op == 3 || op == 6 || op == 7;
        if (temporal && temporal_left <= 0) continue;
        int tl = temporal_left - (temporal ? 1 : 0);
        switch (op) {
            case 0: return pool.mk_not(random_formula(pool, rng, n_atoms, budget - 1, tl));
            case 1: return pool.mk_next(random_formula(pool, rng, n_atoms, budget - 1, tl));
            case 2:
                return pool.mk_eventually(random_formula(pool, rng, n_atoms, budget - 1, tl));
            case 3: return pool.mk_always(random_formula(pool, rng, n_atoms, budget - 1, tl));
            default: {
                if (budget < 3) continue;
                int lb = pick(rng, 1, budget - 2);
                int l = random_formula(pool, rng, n_atoms, lb, tl);
                int r = random_formula(pool, rng, n_atoms, budget - 1 - lb, tl);
                if (op == 4) return pool.mk_and(l, r);
                if (op == 5) return pool.mk_or(l, r);
                if (op == 6) return pool.mk_until(l, r);
                return pool.mk_release(l, r);
            }
        }
    }
}

// sparse random automaton, rejection-sampled until unambiguous
inline bpmc::Nba random_uba(Rng& rng, const std::vector<std::string>& alphabet, int max_states) {
    for (;;) {
        bpmc::Nba a;
        a.alphabet = alphabet;
        int n = pick(rng, 1, max_states);
        for (int i = 0; i < n; ++i) a.add_state("q" + std::to_string(i), pick(rng, 0, 2) == 0);
        for (int q = 0; q < n; ++q)
            for (int l = 0; l < a.n_letters(); ++l) {
                int roll = pick(rng, 0, 3);
                int k = roll == 0 ? 0 : roll == 3 ? 2 : 1;
                for (int j = 0; j < k; ++j) a.add_transition(q, l, pick(rng, 0, n - 1));
            }
        a.initial.push_back(pick(rng, 0, n - 1));
        if (pick(rng, 0, 2) == 0) a.initial.push_back(pick(rng, 0, n - 1));
        std::sort(a.initial.begin(), a.initial.end());
        a.initial.erase(std::unique(a.initial.begin(), a.initial.end()), a.initial.end());
        if (bpmc::check_unambiguous(a).unambiguous) return a;
    }
}

// every u with |u| <= max_u and v with 1 <= |v| <= max_v over the letters
template <class Fn>
inline void for_each_lasso(int letters, int max_u, int max_v, Fn&& fn) {
    std::vector<std::vector<int>> words[2];
    auto gen_words = [&](int max_len, bool allow_empty, std::vector<std::vector<int>>& out) {
        std::vector<int> w;
        auto rec = [&](auto&& self, int len) -> void {
            if (static_cast<int>(w.size()) == len) {
                out.push_back(w);
                return;
            }
            for (int l = 0; l < letters; ++l) {
                w.push_back(l);
                self(self, len);
                w.pop_back();
            }
        };
        for (int len = allow_empty ? 0 : 1; len <= max_len; ++len) rec(rec, len);
    };
    gen_words(max_u, true, words[0]);
    gen_words(max_v, false, words[1]);
    for (const auto& u : words[0])
        for (const auto& v : words[1]) fn(u, v);
}

// geometric-mean growth rate of the power iteration; 0 for nilpotent input
inline double float_rho(const bpmc::RationalMatrix& m, int iters = 2000) {
    int n = m.n;
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i) * n + j] = bpmc::to_double(m.at(i, j));
    std::vector<double> v(n, 1.0), w(n);
    double logsum = 0;
    for (int k = 0; k < iters; ++k) {
        double norm = 0;
        for (int i = 0; i < n; ++i) {
            double s = 0;
            for (int j = 0; j < n; ++j) s += a[static_cast<std::size_t>(i) * n + j] * v[j];
            w[i] = s;
            norm += s;
        }
        if (norm <= 0) return 0.0;
        for (int i = 0; i < n; ++i) v[i] = w[i] / norm;
        logsum += std::log(norm);
    }
    return std::exp(logsum / iters);
}

// exactly row-stochastic with a full cycle, hence irreducible
inline bpmc::RationalMatrix random_stochastic_irreducible(Rng& rng, int max_dim) {
    int n = pick(rng, 1, max_dim);
    bpmc::RationalMatrix m(n);
    for (int i = 0; i < n; ++i) {
        std::vector<int> num(n, 0);
        num[(i + 1) % n] = pick(rng, 1, 5);
        for (int j = 0; j < n; ++j)
            if (pick(rng, 0, 1) == 0) num[j] += pick(rng, 1, 5);
        int total = 0;
        for (int x : num) total += x;
        for (int j = 0; j < n; ++j)
            if (num[j] > 0) m.at(i, j) = bpmc::Rational(num[j], total);
    }
    return m;
}

inline bpmc::RationalMatrix random_matrix(Rng& rng, int max_dim) {
    int n = pick(rng, 1, max_dim);
    bpmc::RationalMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (pick(rng, 0, 1) == 0) m.at(i, j) = bpmc::Rational(pick(rng, 1, 4), pick(rng, 1, 4));
    return m;
}

inline bpmc::MonotoneCircuit random_circuit(Rng& rng, int max_gates) {
    bpmc::MonotoneCircuit c;
    int ni = pick(rng, 1, 3);
    for (int i = 0; i < ni; ++i) {
        bpmc::CircuitNode n;
        n.kind = bpmc::CircuitNode::Kind::Input;
        n.name = "i" + std::to_string(i);
        n.value = pick(rng, 0, 1) == 1;
        c.nodes.push_back(n);
    }
    int ng = pick(rng, 1, max_gates);
    for (int g = 0; g < ng; ++g) {
        bpmc::CircuitNode n;
        n.kind = pick(rng, 0, 1) == 0 ? bpmc::CircuitNode::Kind::And : bpmc::CircuitNode::Kind::Or;
        n.name = "g" + std::to_string(g);
        int k = pick(rng, 1, 3);
        int limit = static_cast<int>(c.nodes.size()) - 1;
        for (int j = 0; j < k; ++j) n.children.push_back(pick(rng, 0, limit));
        c.nodes.push_back(n);
    }
    c.output = static_cast<int>(c.nodes.size()) - 1;
    return c;
}

inline bpmc::AtmSpec random_atm(Rng& rng) {
    bpmc::AtmSpec m;
    int ns = pick(rng, 1, 3);
    int na = pick(rng, 1, 2);
    for (int a = 0; a < na; ++a) m.alphabet.push_back(std::string(1, static_cast<char>('a' + a)));
    for (int s = 0; s < ns; ++s) {
        m.states.push_back("s" + std::to_string(s));
        m.existential.push_back(pick(rng, 0, 1) == 0 ? 1 : 0);
    }
    m.states.push_back("sacc");
    m.existential.push_back(0);
    m.accept = ns;
    m.initial = pick(rng, 0, ns - 1);
    for (int s = 0; s < ns; ++s)
        for (int a = 0; a < na; ++a) {
            int k = pick(rng, 1, 2);
            for (int j = 0; j < k; ++j) {
                bpmc::AtmTransition t;
                t.s = s;
                t.read = a;
                t.write = pick(rng, 0, na - 1);
                t.dir = pick(rng, 0, 1) == 0 ? -1 : +1;
                t.s2 = pick(rng, 0, ns);
                m.transitions.push_back(t);
            }
        }
    return m;
}

inline bool bp_equal(const bpmc::BranchingProcess& a, const bpmc::BranchingProcess& b) {
    if (a.types != b.types || a.start != b.start || a.eps_allowed != b.eps_allowed) return false;
    if (a.rules.size() != b.rules.size()) return false;
    for (std::size_t t = 0; t < a.rules.size(); ++t) {
        if (a.rules[t].size() != b.rules[t].size()) return false;
        for (std::size_t i = 0; i < a.rules[t].size(); ++i) {
            const bpmc::Rule &x = a.rules[t][i], &y = b.rules[t][i];
            if (x.lhs != y.lhs || x.prob != y.prob || x.rhs != y.rhs) return false;
        }
    }
    return true;
}

inline bool nba_equal(const bpmc::Nba& a, const bpmc::Nba& b) {
    return a.alphabet == b.alphabet && a.states == b.states && a.delta == b.delta &&
           a.initial == b.initial && a.accepting == b.accepting;
}

inline bool dpa_equal(const bpmc::Dpa& a, const bpmc::Dpa& b) {
    return a.alphabet == b.alphabet && a.states == b.states && a.next == b.next &&
           a.priority == b.priority && a.initial == b.initial;
}

inline bool prefix_contains(const bpmc::TreePrefix& t, int type) {
    if (t.type == type) return true;
    for (const bpmc::TreePrefix& c : t.children)
        if (prefix_contains(c, type)) return true;
    return false;
}

}  // namespace testutil
