#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "snmg/core/csr.hpp"

namespace snmg {

struct Aggregation {
    int n_fine = 0;
    int n_agg = 0;
    std::vector<int> membership; // fine index -> aggregate id

    void validate() const
    {
        if (static_cast<int>(membership.size()) != n_fine)
            throw std::invalid_argument("Aggregation: membership size mismatch");
        if (n_agg < 1 && n_fine > 0)
            throw std::invalid_argument("Aggregation: no aggregates");
        for (int a : membership)
            if (a < 0 || a >= n_agg)
                throw std::invalid_argument("Aggregation: aggregate id out of range");
    }
};

// Greedy pairwise-then-neighborhood aggregation on the strength graph
// |M_ij| >= theta * sqrt(|M_ii * M_jj|) over stored off-diagonal entries.
// Pass 1 seeds at the lowest unaggregated index and absorbs its unaggregated
// strong neighbors; pass 2 attaches leftovers to the strongest adjacent
// aggregate (ties to the smallest column) or leaves them as singletons.
inline Aggregation aggregate(const CsrMatrix& m, double theta)
{
    m.validate();
    if (m.n_rows != m.n_cols)
        throw std::invalid_argument("aggregate: matrix must be square");
    if (m.n_rows == 0)
        throw std::invalid_argument("aggregate: empty matrix");
    if (theta < 0.0 || theta >= 1.0)
        throw std::invalid_argument("aggregate: theta must lie in [0,1)");

    const int n = m.n_rows;
    std::vector<double> diag(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int t = m.row_ptr[i]; t < m.row_ptr[i + 1]; ++t)
            if (m.col_idx[t] == i)
                diag[i] = m.values[t];

    auto strong = [&](int i, int t) {
        const int j = m.col_idx[t];
        return j != i && std::abs(m.values[t]) >= theta * std::sqrt(std::abs(diag[i] * diag[j]));
    };

    Aggregation agg;
    agg.n_fine = n;
    agg.membership.assign(n, -1);
    int next = 0;

    for (int i = 0; i < n; ++i) {
        if (agg.membership[i] >= 0)
            continue;
        bool any = false;
        for (int t = m.row_ptr[i]; t < m.row_ptr[i + 1]; ++t)
            if (strong(i, t) && agg.membership[m.col_idx[t]] < 0)
                any = true;
        if (!any)
            continue;
        agg.membership[i] = next;
        for (int t = m.row_ptr[i]; t < m.row_ptr[i + 1]; ++t)
            if (strong(i, t) && agg.membership[m.col_idx[t]] < 0)
                agg.membership[m.col_idx[t]] = next;
        ++next;
    }

    for (int i = 0; i < n; ++i) {
        if (agg.membership[i] >= 0)
            continue;
        int best = -1;
        double best_val = -1.0;
        for (int t = m.row_ptr[i]; t < m.row_ptr[i + 1]; ++t) {
            const int j = m.col_idx[t];
            if (!strong(i, t) || agg.membership[j] < 0)
                continue;
            const double v = std::abs(m.values[t]);
            if (v > best_val || (v == best_val && j < best)) {
                best = j;
                best_val = v;
            }
        }
        if (best >= 0) {
            agg.membership[i] = agg.membership[best];
        } else {
            agg.membership[i] = next;
            ++next;
        }
    }

    agg.n_agg = next;
    agg.validate();
    return agg;
}

// Piecewise-constant interpolation: one unit entry per fine row.
inline CsrMatrix build_sub_interpolation(const Aggregation& agg)
{
    agg.validate();
    CsrMatrix interp;
    interp.n_rows = agg.n_fine;
    interp.n_cols = agg.n_agg;
    interp.row_ptr.resize(agg.n_fine + 1);
    interp.col_idx.resize(agg.n_fine);
    interp.values.assign(agg.n_fine, 1.0);
    for (int i = 0; i < agg.n_fine; ++i) {
        interp.row_ptr[i + 1] = i + 1;
        interp.col_idx[i] = agg.membership[i];
    }
    interp.validate();
    return interp;
}

} // namespace snmg
