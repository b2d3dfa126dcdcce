#pragma once

#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "rational.hpp"

namespace bpmc {

// Dense square rational matrix. Row/column i corresponds to keys[i] when key
// labels are attached; algorithms only use indices.
struct RationalMatrix {
    int n = 0;
    std::vector<Rational> a;           // row-major
    std::vector<std::string> keys;     // optional labels, size n or empty

    RationalMatrix() = default;
    explicit RationalMatrix(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim) {}

    Rational& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    const Rational& at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

    bool nonnegative() const {
        for (const auto& x : a)
            if (x < 0) return false;
        return true;
    }

    // Adjacency on nonzero entries.
    Digraph graph() const {
        Digraph g(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (at(i, j) != 0) g.add_edge(i, j);
        g.normalize();
        return g;
    }

    RationalMatrix submatrix(const std::vector<int>& idx) const {
        RationalMatrix s(static_cast<int>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j)
                s.at(static_cast<int>(i), static_cast<int>(j)) = at(idx[i], idx[j]);
        if (!keys.empty()) {
            s.keys.reserve(idx.size());
            for (int k : idx) s.keys.push_back(keys[k]);
        }
        return s;
    }
};

namespace detail {

// In-place reduced row echelon form with first-nonzero pivoting; returns the
// pivot column of each pivot row. rows x cols, row-major.
inline std::vector<int> rref(std::vector<Rational>& m, int rows, int cols) {
    auto at = [&](int i, int j) -> Rational& { return m[static_cast<std::size_t>(i) * cols + j]; };
    std::vector<int> pivot_cols;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i)
            if (at(i, c) != 0) {
                p = i;
                break;
            }
        if (p == -1) continue;
        if (p != r)
            for (int j = 0; j < cols; ++j) std::swap(at(p, j), at(r, j));
        Rational inv = at(r, c);
        for (int j = c; j < cols; ++j) at(r, j) /= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || at(i, c) == 0) continue;
            Rational f = at(i, c);
            for (int j = c; j < cols; ++j) at(i, j) -= f * at(r, j);
        }
        pivot_cols.push_back(c);
        ++r;
    }
    return pivot_cols;
}

}  // namespace detail

// One exact solution of A x = b, or nullopt when inconsistent. Free
// variables are fixed at zero.
inline std::optional<std::vector<Rational>> solve_linear(const RationalMatrix& A,
                                                         const std::vector<Rational>& b) {
    if (static_cast<int>(b.size()) != A.n)
        throw Error("DimensionMismatch", "rhs length does not match matrix dimension");
    int n = A.n;
    int cols = n + 1;
    std::vector<Rational> m(static_cast<std::size_t>(n) * cols);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m[static_cast<std::size_t>(i) * cols + j] = A.at(i, j);
        m[static_cast<std::size_t>(i) * cols + n] = b[i];
    }
    std::vector<int> piv = detail::rref(m, n, cols);
    if (!piv.empty() && piv.back() == n) return std::nullopt;  // row 0...0 | 1
    std::vector<Rational> x(n, Rational(0));
    for (std::size_t r = 0; r < piv.size(); ++r)
        x[piv[r]] = m[r * cols + n];
    return x;
}

// Basis of the null space of A (possibly empty).
inline std::vector<std::vector<Rational>> null_space_basis(const RationalMatrix& A) {
    int n = A.n;
    std::vector<Rational> m(A.a);
    std::vector<int> piv = detail::rref(m, n, n);
    std::vector<bool> is_pivot(n, false);
    for (int c : piv) is_pivot[c] = true;
    std::vector<std::vector<Rational>> basis;
    for (int free = 0; free < n; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rational> v(n, Rational(0));
        v[free] = 1;
        for (std::size_t r = 0; r < piv.size(); ++r)
            v[piv[r]] = -m[r * static_cast<std::size_t>(n) + free];
        basis.push_back(std::move(v));
    }
    return basis;
}

enum class Trichotomy { Less, Equal, Greater };

inline const char* to_string(Trichotomy t) {
    switch (t) {
        case Trichotomy::Less: return "less";
        case Trichotomy::Equal: return "equal";
        default: return "greater";
    }
}

// Exact position of the spectral radius of an irreducible nonnegative matrix
// relative to 1, by elimination only:
//   1. ker(I-M) one-dimensional with a strictly positive spanning vector
//      (up to sign)  =>  rho = 1.
//   2. otherwise, a nonnegative solution of (I-M)x = 1  =>  rho < 1.
//   3. otherwise rho > 1.
// Perron row-sum bounds give a sound shortcut before the elimination.
inline Trichotomy rho_trichotomy_irreducible(const RationalMatrix& M) {
    if (!M.nonnegative()) throw Error("NegativeEntry", "matrix must be nonnegative");
    if (M.n == 0) throw Error("NotIrreducible", "empty matrix");
    {
        SccDecomposition scc = scc_decompose(M.graph());
        if (scc.components.size() != 1 || !scc.has_cycle[0])
            throw Error("NotIrreducible", "matrix graph is not strongly connected with an edge");
    }

    bool all_le1 = true, all_ge1 = true, all_eq1 = true;
    for (int i = 0; i < M.n; ++i) {
        Rational s(0);
        for (int j = 0; j < M.n; ++j) s += M.at(i, j);
        if (s != 1) all_eq1 = false;
        if (s > 1) all_le1 = false;
        if (s < 1) all_ge1 = false;
    }
    if (all_eq1) return Trichotomy::Equal;
    if (all_le1) return Trichotomy::Less;     // some row sum < 1
    if (all_ge1) return Trichotomy::Greater;  // some row sum > 1

    RationalMatrix ImM(M.n);
    for (int i = 0; i < M.n; ++i)
        for (int j = 0; j < M.n; ++j)
            ImM.at(i, j) = (i == j ? Rational(1) : Rational(0)) - M.at(i, j);

    auto basis = null_space_basis(ImM);
    if (basis.size() == 1) {
        bool pos = true, neg = true;
        for (const auto& x : basis[0]) {
            if (x <= 0) pos = false;
            if (x >= 0) neg = false;
        }
        if (pos || neg) return Trichotomy::Equal;
    }

    std::vector<Rational> ones(M.n, Rational(1));
    if (auto x = solve_linear(ImM, ones)) {
        bool nonneg = true;
        for (const auto& v : *x)
            if (v < 0) {
                nonneg = false;
                break;
            }
        if (nonneg) return Trichotomy::Less;
    }
    return Trichotomy::Greater;
}

// General nonnegative matrices: decompose into SCCs, take the maximum over
// the per-component results. A trivial component without a self-loop
// contributes rho = 0.
inline Trichotomy rho_trichotomy(const RationalMatrix& M) {
    if (!M.nonnegative()) throw Error("NegativeEntry", "matrix must be nonnegative");
    if (M.n == 0) return Trichotomy::Less;
    SccDecomposition scc = scc_decompose(M.graph());
    Trichotomy best = Trichotomy::Less;
    for (std::size_t c = 0; c < scc.components.size(); ++c) {
        if (!scc.has_cycle[c]) continue;  // rho contribution 0
        Trichotomy t = rho_trichotomy_irreducible(M.submatrix(scc.components[c]));
        if (static_cast<int>(t) > static_cast<int>(best)) best = t;
        if (best == Trichotomy::Greater) break;
    }
    return best;
}

}  // namespace bpmc
