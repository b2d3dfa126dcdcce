#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "automata.hpp"
#include "errors.hpp"

namespace bpmc {

namespace detail {

// One node of a history tree: sorted state label, children ordered oldest
// first. Names encode age: ancestors and older siblings have smaller names,
// and surviving names are compacted to 1..k after every step.
struct SafraNode {
    int name = 0;
    std::vector<int> label;
    std::vector<SafraNode> children;
};

struct SafraTree {
    std::vector<SafraNode> roots;  // zero or one root
};

inline void safra_encode(const SafraNode& n, std::vector<int>& out) {
    out.push_back(n.name);
    out.push_back(static_cast<int>(n.label.size()));
    for (int q : n.label) out.push_back(q);
    out.push_back(static_cast<int>(n.children.size()));
    for (const auto& c : n.children) safra_encode(c, out);
}

inline std::vector<int> safra_encode(const SafraTree& t) {
    std::vector<int> out;
    out.push_back(static_cast<int>(t.roots.size()));
    for (const auto& r : t.roots) safra_encode(r, out);
    return out;
}

struct SafraEvents {
    int dead = 0;    // smallest name of a deleted pre-existing node, 0 = none
    int merged = 0;  // smallest name where a vertical merge happened, 0 = none

    void kill(int name, int old_max) {
        if (name > old_max) return;  // births of this very step carry no history
        if (dead == 0 || name < dead) dead = name;
    }
    void merge(int name) {
        if (merged == 0 || name < merged) merged = name;
    }
};

inline void safra_subtract(SafraNode& n, const std::vector<int>& seen) {
    std::vector<int> rest;
    std::set_difference(n.label.begin(), n.label.end(), seen.begin(), seen.end(),
                        std::back_inserter(rest));
    n.label = std::move(rest);
    for (auto& c : n.children) safra_subtract(c, seen);
}

inline void safra_prune_siblings(SafraNode& n) {
    std::vector<int> seen;
    for (auto& c : n.children) {
        safra_subtract(c, seen);
        std::vector<int> merged;
        std::set_union(seen.begin(), seen.end(), c.label.begin(), c.label.end(),
                       std::back_inserter(merged));
        seen = std::move(merged);
    }
    for (auto& c : n.children) safra_prune_siblings(c);
}

inline void safra_collect_names(const SafraNode& n, std::vector<int>& names) {
    names.push_back(n.name);
    for (const auto& c : n.children) safra_collect_names(c, names);
}

inline void safra_drop_empty(std::vector<SafraNode>& list, SafraEvents& ev, int old_max) {
    for (std::size_t i = 0; i < list.size();) {
        if (list[i].label.empty()) {
            std::vector<int> names;
            safra_collect_names(list[i], names);
            for (int nm : names) ev.kill(nm, old_max);
            list.erase(list.begin() + static_cast<long>(i));
        } else {
            safra_drop_empty(list[i].children, ev, old_max);
            ++i;
        }
    }
}

inline void safra_vertical_merge(SafraNode& n, SafraEvents& ev, int old_max) {
    std::size_t child_total = 0;
    for (const auto& c : n.children) child_total += c.label.size();
    if (!n.children.empty() && child_total == n.label.size()) {
        for (const auto& c : n.children) {
            std::vector<int> names;
            safra_collect_names(c, names);
            for (int nm : names) ev.kill(nm, old_max);
        }
        n.children.clear();
        ev.merge(n.name);
        return;
    }
    for (auto& c : n.children) safra_vertical_merge(c, ev, old_max);
}

inline void safra_rename(SafraNode& n, const std::map<int, int>& rank) {
    n.name = rank.at(n.name);
    for (auto& c : n.children) safra_rename(c, rank);
}

}  // namespace detail

// NBA -> DPA via history trees. A deterministic state is a tree together
// with the event priority of the transition that produced it; acceptance is
// max-even. Correct for exactly the NBA language; validated externally by
// exhaustive lasso agreement.
inline Dpa determinize_to_dpa(const Nba& input, int budget = 50000) {
    using namespace detail;
    Nba a = trim_useful(input).aut;
    Dpa d;
    d.alphabet = input.alphabet;

    if (a.n_states() == 0) {
        int q = d.add_state("empty", 1);
        for (int l = 0; l < d.n_letters(); ++l) d.next[q][l] = q;
        d.initial = q;
        return d;
    }

    int n = a.n_states();
    int neutral = 2 * n + 1;  // weakest odd priority, min-parity scale
    auto convert = [&](int p) { return 2 * n + 2 - p; };

    std::vector<int> acc_states;
    for (int q = 0; q < n; ++q)
        if (a.accepting[q]) acc_states.push_back(q);

    auto image = [&](const std::vector<int>& label, int letter) {
        std::set<int> out;
        for (int q : label) out.insert(a.delta[q][letter].begin(), a.delta[q][letter].end());
        return std::vector<int>(out.begin(), out.end());
    };

    // One letter step; returns the min-parity priority of the transition.
    auto step = [&](SafraTree& t, int letter) -> int {
        int old_max = 0;
        {
            std::vector<int> names;
            for (const auto& r : t.roots) safra_collect_names(r, names);
            for (int nm : names) old_max = std::max(old_max, nm);
        }
        // 1. Spawn: every pre-existing node with accepting states in its
        //    label gets a fresh youngest child holding them. Fresh names are
        //    handed out in node-name order; the actual pushes happen in a
        //    second bottom-up pass so no reference outlives a realloc of a
        //    children vector.
        {
            std::map<int, std::vector<int>> spawn;  // node name -> child label
            auto scan = [&](auto&& self, const SafraNode& node) -> void {
                std::vector<int> f;
                std::set_intersection(node.label.begin(), node.label.end(), acc_states.begin(),
                                      acc_states.end(), std::back_inserter(f));
                if (!f.empty()) spawn.emplace(node.name, std::move(f));
                for (const auto& c : node.children) self(self, c);
            };
            for (const auto& r : t.roots) scan(scan, r);
            std::map<int, int> fresh_name;
            int fresh = old_max;
            for (const auto& [nm, f] : spawn) fresh_name[nm] = ++fresh;
            auto apply = [&](auto&& self, SafraNode& node) -> void {
                std::size_t old_count = node.children.size();
                for (std::size_t i = 0; i < old_count; ++i) self(self, node.children[i]);
                auto it = spawn.find(node.name);
                if (it == spawn.end()) return;
                SafraNode child;
                child.name = fresh_name[node.name];
                child.label = it->second;
                node.children.push_back(std::move(child));
            };
            for (auto& r : t.roots) apply(apply, r);
        }
        // 2. Subset step on every label.
        {
            auto apply = [&](auto&& self, SafraNode& node) -> void {
                node.label = image(node.label, letter);
                for (auto& c : node.children) self(self, c);
            };
            for (auto& r : t.roots) apply(apply, r);
        }
        // 3. Older siblings keep shared states.
        for (auto& r : t.roots) safra_prune_siblings(r);
        // 4./5. Deletions and vertical merges produce the events.
        SafraEvents ev;
        safra_drop_empty(t.roots, ev, old_max);
        for (auto& r : t.roots) safra_vertical_merge(r, ev, old_max);
        // 6. Compact names.
        {
            std::vector<int> names;
            for (const auto& r : t.roots) safra_collect_names(r, names);
            std::sort(names.begin(), names.end());
            std::map<int, int> rank;
            for (std::size_t i = 0; i < names.size(); ++i) rank[names[i]] = static_cast<int>(i) + 1;
            for (auto& r : t.roots) safra_rename(r, rank);
        }
        if (ev.dead != 0 && (ev.merged == 0 || ev.dead <= ev.merged)) return 2 * ev.dead - 1;
        if (ev.merged != 0) return 2 * ev.merged;
        return neutral;
    };

    SafraTree init;
    if (!a.initial.empty()) {
        SafraNode root;
        root.name = 1;
        root.label = a.initial;
        init.roots.push_back(std::move(root));
    }

    std::map<std::vector<int>, int> id;
    std::vector<SafraTree> trees;
    auto intern = [&](const SafraTree& t, int prio) {
        std::vector<int> key = safra_encode(t);
        key.push_back(prio);
        auto it = id.find(key);
        if (it != id.end()) return it->second;
        int s = d.add_state("t" + std::to_string(d.n_states()), prio);
        if (d.n_states() > budget)
            throw BudgetExceeded("determinisation exceeded " + std::to_string(budget) + " states");
        id.emplace(std::move(key), s);
        trees.push_back(t);
        return s;
    };

    d.initial = intern(init, convert(neutral));
    for (int q = 0; q < d.n_states(); ++q) {
        for (int l = 0; l < d.n_letters(); ++l) {
            SafraTree t = trees[q];
            int p = step(t, l);
            d.next[q][l] = intern(t, convert(p));
        }
    }
    return d;
}

}  // namespace bpmc
