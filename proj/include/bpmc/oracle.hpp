#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "bp.hpp"
#include "errors.hpp"
#include "rational.hpp"

namespace bpmc {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent generator stream per sample index, so results do not depend on
// evaluation order.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

// Uniform integer in [0, bound) by rejection on the minimal bit width.
inline Integer uniform_below(std::mt19937_64& gen, const Integer& bound) {
    if (bound <= 1) return Integer(0);
    unsigned bits = boost::multiprecision::msb(bound - 1) + 1;
    unsigned words = (bits + 63) / 64;
    Integer mask = (Integer(1) << bits) - 1;
    for (;;) {
        Integer r = 0;
        for (unsigned w = 0; w < words; ++w) r = (r << 64) | Integer(gen());
        r &= mask;
        if (r < bound) return r;
    }
}

// Exact rule choice: probabilities as integer segments over a shared
// denominator per type.
struct RuleSampler {
    std::vector<Integer> denom;
    std::vector<std::vector<Integer>> cum;  // strictly increasing, last == denom

    explicit RuleSampler(const BranchingProcess& bp) {
        denom.resize(bp.n_types(), Integer(1));
        cum.resize(bp.n_types());
        for (int t = 0; t < bp.n_types(); ++t) {
            for (const Rule& r : bp.rules[t])
                denom[t] = boost::multiprecision::lcm(denom[t], rat_den(r.prob));
            Integer acc = 0;
            for (const Rule& r : bp.rules[t]) {
                acc += rat_num(r.prob) * (denom[t] / rat_den(r.prob));
                cum[t].push_back(acc);
            }
        }
    }

    int draw(std::mt19937_64& gen, int type) const {
        if (cum[type].size() == 1) return 0;
        Integer r = uniform_below(gen, denom[type]);
        for (std::size_t i = 0; i < cum[type].size(); ++i)
            if (r < cum[type][i]) return static_cast<int>(i);
        throw Error("Internal", "rule segments do not cover the denominator");
    }
};

}  // namespace detail

// A sampled finite tree prefix. rule == -1 marks an unexpanded (depth-cut)
// leaf; an expanded node's children match its rule's rhs in order, so an
// expanded node without children took an erasing rule.
struct TreePrefix {
    int type = 0;
    int rule = -1;
    std::vector<TreePrefix> children;

    bool open() const { return rule == -1; }

    int node_count() const {
        int n = 1;
        for (const TreePrefix& c : children) n += c.node_count();
        return n;
    }
};

// Samples one tree prefix to the given depth, drawing every rule with its
// exact probability. Deterministic for a fixed seed.
inline TreePrefix sample_prefix(const BranchingProcess& bp, int depth, std::uint64_t seed) {
    std::mt19937_64 gen(detail::splitmix64(seed));
    detail::RuleSampler sampler(bp);
    TreePrefix root;
    root.type = bp.start;
    auto expand = [&](auto&& self, TreePrefix& node, int remaining) -> void {
        if (remaining == 0) return;
        node.rule = sampler.draw(gen, node.type);
        const Rule& r = bp.rules[node.type][node.rule];
        node.children.reserve(r.rhs.size());
        for (int y : r.rhs) {
            TreePrefix child;
            child.type = y;
            node.children.push_back(std::move(child));
        }
        for (TreePrefix& c : node.children) self(self, c, remaining - 1);
    };
    expand(expand, root, depth);
    return root;
}

// Per-depth rates of the event "every depth-limited branch hits a target by
// depth d", for d = 0..depth. Each sampled tree contributes its worst branch:
// the maximum first-hit depth, infinite when some branch is cut or dies
// before hitting. The event is monotone in d, so the curve is nondecreasing,
// and each rate is a lower-bound estimator of P(every branch hits T).
inline std::vector<double> estimate_reach_curve(const BranchingProcess& bp,
                                                const std::vector<bool>& targets, int depth,
                                                int samples, std::uint64_t seed) {
    if (samples < 1) throw Error("BadArgument", "need at least one sample");
    constexpr int kInf = std::numeric_limits<int>::max();
    detail::RuleSampler sampler(bp);
    std::vector<long long> hits(depth + 1, 0);
    for (int i = 0; i < samples; ++i) {
        std::mt19937_64 gen(detail::stream_seed(seed, i));
        // Subtrees below a hit are irrelevant: every branch through the hit
        // already has its first hit there.
        auto worst = [&](auto&& self, int type, int at, int remaining) -> int {
            if (targets[type]) return at;
            if (remaining == 0) return kInf;
            const Rule& r = bp.rules[type][sampler.draw(gen, type)];
            if (r.rhs.empty()) return kInf;  // died without hitting
            int h = 0;
            for (int y : r.rhs) {
                h = std::max(h, self(self, y, at + 1, remaining - 1));
                if (h == kInf) return kInf;
            }
            return h;
        };
        int h = worst(worst, bp.start, 0, depth);
        if (h <= depth) ++hits[h];
    }
    std::vector<double> curve(depth + 1);
    long long acc = 0;
    for (int d = 0; d <= depth; ++d) {
        acc += hits[d];
        curve[d] = static_cast<double>(acc) / samples;
    }
    return curve;
}

inline double estimate_all_branches_reach(const BranchingProcess& bp,
                                          const std::vector<bool>& targets, int depth,
                                          int samples, std::uint64_t seed) {
    return estimate_reach_curve(bp, targets, depth, samples, seed).back();
}

// ---------------------------------------------------------------------------
// Kleene iteration of the monotone polynomial system for P_X(F T): target
// types are frozen at 1, every other type gets the rule-weighted product of
// its children. The iterates increase towards the least fixed point.

struct KleeneResult {
    std::vector<double> value;
    int iterations = 0;
    bool converged = false;
};

using KleeneTrace = std::function<void(int iter, const std::vector<double>&)>;

inline KleeneResult kleene_reach_prob(const BranchingProcess& bp,
                                      const std::vector<bool>& targets, int max_iter = 100000,
                                      double tol = 1e-12, const KleeneTrace& trace = {}) {
    int n = bp.n_types();
    KleeneResult res;
    res.value.assign(n, 0.0);
    for (int t = 0; t < n; ++t)
        if (targets[t]) res.value[t] = 1.0;
    if (trace) trace(0, res.value);

    std::vector<double> next(n);
    for (int it = 1; it <= max_iter; ++it) {
        double delta = 0;
        for (int t = 0; t < n; ++t) {
            if (targets[t]) {
                next[t] = 1.0;
                continue;
            }
            double v = 0;
            for (const Rule& r : bp.rules[t]) {
                double prod = to_double(r.prob);
                for (int y : r.rhs) prod *= res.value[y];
                v += prod;
            }
            v = std::min(v, 1.0);
            if (v < res.value[t] - 1e-9)
                throw Error("Internal", "fixpoint iteration lost monotonicity");
            delta = std::max(delta, v - res.value[t]);
            next[t] = v;
        }
        res.value = next;
        res.iterations = it;
        if (trace) trace(it, res.value);
        if (delta < tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

// Exact-rational iterates; denominators square each round, so callers keep
// the iteration count small.
inline std::vector<Rational> kleene_reach_prob_exact(const BranchingProcess& bp,
                                                     const std::vector<bool>& targets,
                                                     int iters) {
    int n = bp.n_types();
    std::vector<Rational> q(n, Rational(0));
    for (int t = 0; t < n; ++t)
        if (targets[t]) q[t] = 1;
    std::vector<Rational> next(n);
    for (int it = 0; it < iters; ++it) {
        for (int t = 0; t < n; ++t) {
            if (targets[t]) {
                next[t] = 1;
                continue;
            }
            Rational v(0);
            for (const Rule& r : bp.rules[t]) {
                Rational prod = r.prob;
                for (int y : r.rhs) prod *= q[y];
                v += prod;
            }
            if (v < q[t]) throw Error("Internal", "fixpoint iteration lost monotonicity");
            next[t] = v;
        }
        q = next;
    }
    return q;
}

}  // namespace bpmc
