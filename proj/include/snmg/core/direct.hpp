#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "snmg/core/csr.hpp"
#include "snmg/core/vector.hpp"

namespace snmg {

// Dense LU with partial pivoting, row-major storage.
struct DenseLu {
    int n = 0;
    std::vector<double> lu;
    std::vector<int> piv;

    void factor(std::vector<double> a, int dim)
    {
        n = dim;
        lu = std::move(a);
        piv.resize(n);
        for (int k = 0; k < n; ++k) {
            int p = k;
            double best = std::abs(lu[k * n + k]);
            for (int i = k + 1; i < n; ++i) {
                const double v = std::abs(lu[i * n + k]);
                if (v > best) {
                    best = v;
                    p = i;
                }
            }
            if (best == 0.0)
                throw std::runtime_error("DenseLu: singular matrix");
            piv[k] = p;
            if (p != k) {
                for (int j = 0; j < n; ++j)
                    std::swap(lu[k * n + j], lu[p * n + j]);
            }
            const double d = lu[k * n + k];
            for (int i = k + 1; i < n; ++i) {
                const double m = lu[i * n + k] / d;
                lu[i * n + k] = m;
                for (int j = k + 1; j < n; ++j)
                    lu[i * n + j] -= m * lu[k * n + j];
            }
        }
    }

    void solve_in_place(Vector& b) const
    {
        if (static_cast<int>(b.size()) != n)
            throw std::invalid_argument("DenseLu::solve: length mismatch");
        for (int k = 0; k < n; ++k) {
            if (piv[k] != k)
                std::swap(b[k], b[piv[k]]);
            for (int i = k + 1; i < n; ++i)
                b[i] -= lu[i * n + k] * b[k];
        }
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j)
                b[i] -= lu[i * n + j] * b[j];
            b[i] /= lu[i * n + i];
        }
    }
};

// Connected components of the symmetrized sparsity pattern, in order of the
// lowest row index they contain.
inline std::vector<std::vector<int>> pattern_components(const CsrMatrix& a)
{
    if (a.n_rows != a.n_cols)
        throw std::invalid_argument("pattern_components: matrix must be square");
    const CsrMatrix at = transpose(a);
    std::vector<int> seen(a.n_rows, 0);
    std::vector<std::vector<int>> comps;
    std::vector<int> stack;
    for (int s = 0; s < a.n_rows; ++s) {
        if (seen[s])
            continue;
        std::vector<int> comp;
        stack.push_back(s);
        seen[s] = 1;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            comp.push_back(i);
            for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
                const int j = a.col_idx[p];
                if (!seen[j]) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
            }
            for (int p = at.row_ptr[i]; p < at.row_ptr[i + 1]; ++p) {
                const int j = at.col_idx[p];
                if (!seen[j]) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

// Exact solver that factors each connected component of the pattern with a
// dense LU. On block-diagonal operators the components are the blocks, so
// nothing large ever gets densified.
struct ComponentLu {
    int n = 0;
    std::vector<std::vector<int>> comps;
    std::vector<DenseLu> factors;

    void factor(const CsrMatrix& a)
    {
        n = a.n_rows;
        comps = pattern_components(a);
        factors.clear();
        factors.resize(comps.size());
        std::vector<int> local(n, -1);
        for (std::size_t c = 0; c < comps.size(); ++c) {
            const auto& comp = comps[c];
            const int m = static_cast<int>(comp.size());
            for (int p = 0; p < m; ++p)
                local[comp[p]] = p;
            std::vector<double> dense(static_cast<std::size_t>(m) * m, 0.0);
            for (int p = 0; p < m; ++p) {
                const int gi = comp[p];
                for (int q = a.row_ptr[gi]; q < a.row_ptr[gi + 1]; ++q)
                    dense[static_cast<std::size_t>(p) * m + local[a.col_idx[q]]] = a.values[q];
            }
            factors[c].factor(std::move(dense), m);
            for (int gi : comp)
                local[gi] = -1;
        }
    }

    Vector solve(const Vector& b) const
    {
        if (static_cast<int>(b.size()) != n)
            throw std::invalid_argument("ComponentLu::solve: length mismatch");
        Vector x(b.size());
        for (std::size_t c = 0; c < comps.size(); ++c) {
            Vector loc(comps[c].size());
            for (std::size_t p = 0; p < comps[c].size(); ++p)
                loc[p] = b[comps[c][p]];
            factors[c].solve_in_place(loc);
            for (std::size_t p = 0; p < comps[c].size(); ++p)
                x[comps[c][p]] = loc[p];
        }
        return x;
    }
};

} // namespace snmg
