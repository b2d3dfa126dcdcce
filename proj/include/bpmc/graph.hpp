#pragma once

#include <algorithm>
#include <vector>

namespace bpmc {

// Plain directed graph on dense vertex indices.
struct Digraph {
    std::vector<std::vector<int>> adj;

    Digraph() = default;
    explicit Digraph(int n) : adj(n) {}

    int size() const { return static_cast<int>(adj.size()); }

    void add_edge(int u, int v) { adj[u].push_back(v); }

    // Removes duplicate parallel edges; keeps adjacency sorted.
    void normalize() {
        for (auto& a : adj) {
            std::sort(a.begin(), a.end());
            a.erase(std::unique(a.begin(), a.end()), a.end());
        }
    }

    bool has_edge(int u, int v) const {
        const auto& a = adj[u];
        return std::binary_search(a.begin(), a.end(), v);
    }

    Digraph reversed() const {
        Digraph r(size());
        for (int u = 0; u < size(); ++u)
            for (int v : adj[u]) r.add_edge(v, u);
        return r;
    }
};

struct SccDecomposition {
    // Components emitted callees-first: every edge of the condensation goes
    // from a later component to an earlier one. Members sorted ascending.
    std::vector<std::vector<int>> components;
    std::vector<int> comp_of;        // vertex -> component index
    std::vector<bool> has_cycle;     // nontrivial component or self-loop

    bool on_cycle(int v) const { return has_cycle[comp_of[v]]; }
};

// Iterative Tarjan; deterministic for a fixed adjacency order.
inline SccDecomposition scc_decompose(const Digraph& g) {
    int n = g.size();
    SccDecomposition out;
    out.comp_of.assign(n, -1);
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0;

    struct Frame {
        int v;
        std::size_t child;
    };
    std::vector<Frame> call;

    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            Frame& f = call.back();
            int v = f.v;
            if (f.child == 0) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            while (f.child < g.adj[v].size()) {
                int w = g.adj[v][f.child++];
                if (index[w] == -1) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                std::vector<int> comp;
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    out.comp_of[w] = static_cast<int>(out.components.size());
                    comp.push_back(w);
                    if (w == v) break;
                }
                std::sort(comp.begin(), comp.end());
                out.components.push_back(std::move(comp));
            }
            call.pop_back();
            if (!call.empty()) {
                int parent = call.back().v;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }

    out.has_cycle.resize(out.components.size());
    for (std::size_t c = 0; c < out.components.size(); ++c) {
        const auto& comp = out.components[c];
        bool cyc = comp.size() > 1;
        if (!cyc) cyc = std::count(g.adj[comp[0]].begin(), g.adj[comp[0]].end(), comp[0]) > 0;
        out.has_cycle[c] = cyc;
    }
    return out;
}

// Forward reachable set (including the seeds).
inline std::vector<bool> reachable_from(const Digraph& g, const std::vector<int>& seeds) {
    std::vector<bool> seen(g.size(), false);
    std::vector<int> work;
    for (int s : seeds)
        if (!seen[s]) {
            seen[s] = true;
            work.push_back(s);
        }
    while (!work.empty()) {
        int u = work.back();
        work.pop_back();
        for (int v : g.adj[u])
            if (!seen[v]) {
                seen[v] = true;
                work.push_back(v);
            }
    }
    return seen;
}

}  // namespace bpmc
