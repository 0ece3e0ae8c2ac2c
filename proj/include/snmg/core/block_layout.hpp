#pragma once

#include <stdexcept>
#include <utility>

#include "snmg/core/csr.hpp"

namespace snmg {

// Field-major unknown layout: group outermost, then direction, then space.
// Unknown (g, d, s) lives at (g*n_directions + d)*n_space + s, so block
// j = g*n_directions + d owns the contiguous range [j*n_space, (j+1)*n_space).
struct BlockLayout {
    int n_groups = 0;
    int n_directions = 0;
    int n_space = 0;

    int n_blocks() const { return n_groups * n_directions; }
    int dim() const { return n_blocks() * n_space; }

    int block_index(int g, int d) const
    {
        if (g < 0 || g >= n_groups || d < 0 || d >= n_directions)
            throw std::invalid_argument("BlockLayout: (g, d) out of range");
        return g * n_directions + d;
    }

    std::pair<int, int> block_range(int j) const
    {
        if (j < 0 || j >= n_blocks())
            throw std::invalid_argument("BlockLayout: block index out of range");
        return {j * n_space, (j + 1) * n_space};
    }
};

// Diagonal block j of a block-diagonal matrix. Errors if any entry in the
// block's rows falls outside the block's column range.
inline CsrMatrix block_view(const CsrMatrix& p, const BlockLayout& layout, int j)
{
    if (p.n_rows != layout.dim() || p.n_cols != layout.dim())
        throw std::invalid_argument("block_view: matrix does not match layout");
    const auto [lo, hi] = layout.block_range(j);
    CsrMatrix m;
    m.n_rows = m.n_cols = layout.n_space;
    m.row_ptr.assign(layout.n_space + 1, 0);
    for (int i = lo; i < hi; ++i) {
        for (int q = p.row_ptr[i]; q < p.row_ptr[i + 1]; ++q) {
            const int c = p.col_idx[q];
            if (c < lo || c >= hi)
                throw std::invalid_argument("block_view: nonzero outside diagonal block");
            m.col_idx.push_back(c - lo);
            m.values.push_back(p.values[q]);
            m.row_ptr[i - lo + 1]++;
        }
    }
    for (int r = 0; r < layout.n_space; ++r)
        m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
}

inline bool is_block_diagonal(const CsrMatrix& p, const BlockLayout& layout)
{
    if (p.n_rows != layout.dim() || p.n_cols != layout.dim())
        return false;
    for (int i = 0; i < p.n_rows; ++i) {
        const int j = i / layout.n_space;
        const int lo = j * layout.n_space;
        const int hi = lo + layout.n_space;
        for (int q = p.row_ptr[i]; q < p.row_ptr[i + 1]; ++q) {
            if (p.col_idx[q] < lo || p.col_idx[q] >= hi)
                return false;
        }
    }
    return true;
}

} // namespace snmg
