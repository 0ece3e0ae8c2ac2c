#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "snmg/core/block_layout.hpp"
#include "snmg/core/csr.hpp"
#include "snmg/core/direct.hpp"
#include "snmg/multilevel/aggregation.hpp"
#include "snmg/schwarz/ras.hpp"

namespace snmg {

enum class McMode { Masm, MasmSub };

struct CoarsenOptions {
    double theta = 0.08;
    int max_levels = 10;
    int coarsest_size = 200; // stop when the matrix being aggregated has this many rows or fewer
    int pre_its = 1;
    int post_its = 1;
    int coarsen_block = 0; // which block of P feeds the coarsener (sub mode)
    RasOptions smoother{.overlap = 0, .solver = LocalSolver::Sor, .sor_sweeps = 2,
                        .sor_omega = 1.0};

    void validate() const
    {
        if (theta < 0.0 || theta >= 1.0)
            throw std::invalid_argument("coarsen options: theta must lie in [0,1)");
        if (max_levels < 1 || coarsest_size < 1)
            throw std::invalid_argument("coarsen options: level and size thresholds must be >= 1");
        if (pre_its < 0 || post_its < 0)
            throw std::invalid_argument("coarsen options: negative smoothing counts");
    }
};

// Block replication of a spatial interpolation across every (group,
// direction) block: block b of the result carries sub's entries shifted by
// b*n_fine rows and b*n_coarse columns.
inline CsrMatrix extend_interpolation(const CsrMatrix& sub, const BlockLayout& fine,
                                      const BlockLayout& coarse)
{
    sub.validate();
    if (fine.n_groups != coarse.n_groups || fine.n_directions != coarse.n_directions)
        throw std::invalid_argument("extend_interpolation: layouts disagree on block structure");
    if (sub.n_rows != fine.n_space || sub.n_cols != coarse.n_space)
        throw std::invalid_argument("extend_interpolation: interpolation size mismatch");

    const int nb = fine.n_blocks();
    CsrMatrix full;
    full.n_rows = nb * sub.n_rows;
    full.n_cols = nb * sub.n_cols;
    full.row_ptr.reserve(full.n_rows + 1);
    full.row_ptr.push_back(0);
    full.col_idx.reserve(nb * sub.col_idx.size());
    full.values.reserve(nb * sub.values.size());
    for (int b = 0; b < nb; ++b)
        for (int i = 0; i < sub.n_rows; ++i) {
            for (int t = sub.row_ptr[i]; t < sub.row_ptr[i + 1]; ++t) {
                full.col_idx.push_back(b * sub.n_cols + sub.col_idx[t]);
                full.values.push_back(sub.values[t]);
            }
            full.row_ptr.push_back(static_cast<int>(full.col_idx.size()));
        }
    full.validate();
    return full;
}

// Coarse part of each aggregate: the part holding the plurality of its fine
// members, lowest part id on ties.
inline std::vector<int> coarsen_parts(const std::vector<int>& fine_part,
                                      const std::vector<int>& membership, int n_agg, int n_parts)
{
    std::vector<std::vector<int>> votes(n_agg, std::vector<int>(n_parts, 0));
    for (std::size_t i = 0; i < membership.size(); ++i)
        ++votes[membership[i]][fine_part[i]];
    std::vector<int> coarse(n_agg, 0);
    for (int a = 0; a < n_agg; ++a) {
        int best = 0;
        for (int p = 1; p < n_parts; ++p)
            if (votes[a][p] > votes[a][best])
                best = p;
        coarse[a] = best;
    }
    return coarse;
}

struct MultilevelHierarchy {
    struct Level {
        CsrMatrix p;
        BlockLayout layout;       // exact in sub mode; {1,1,rows} once masm coarsens
        int n_blocks = 1;         // reported block count (persists across levels)
        int coarsened_rows = 0;   // rows handed to the coarsener at this level
        std::vector<int> part_of; // per unknown
        RasPreconditioner smoother;
        CsrMatrix interp;   // level l <- level l+1; empty on the coarsest level
        CsrMatrix restrict_; // transpose of interp, cached for the cycle
        CsrMatrix sub_interp; // sub mode only
    };

    McMode mode = McMode::Masm;
    CoarsenOptions opts;
    int n_parts = 1;
    std::vector<Level> levels;
    ComponentLu coarsest;

    int n_levels() const { return static_cast<int>(levels.size()); }
    // the setup-cost accounting metric: rows coarsened at the finest level
    int coarsened_rows() const { return levels.empty() ? 0 : levels.front().coarsened_rows; }
};

namespace detail {

inline std::vector<IndexSet> sets_from_parts(const std::vector<int>& part_of, int n_parts)
{
    std::vector<IndexSet> sets(n_parts);
    for (std::size_t i = 0; i < part_of.size(); ++i)
        sets[part_of[i]].idx.push_back(static_cast<int>(i));
    return sets;
}

inline std::vector<int> replicate_parts(const std::vector<int>& vertex_owner,
                                        const BlockLayout& layout)
{
    std::vector<int> part(layout.dim());
    for (int i = 0; i < layout.dim(); ++i)
        part[i] = vertex_owner[i % layout.n_space];
    return part;
}

inline void finish_hierarchy(MultilevelHierarchy& h)
{
    for (std::size_t l = 0; l + 1 < h.levels.size(); ++l) {
        auto& lev = h.levels[l];
        lev.smoother.setup(lev.p, sets_from_parts(lev.part_of, h.n_parts), h.opts.smoother);
    }
    if (h.levels.size() == 1) {
        // one-level degenerate hierarchy: the cycle is a direct solve
        h.coarsest.factor(h.levels.back().p);
        return;
    }
    h.coarsest.factor(h.levels.back().p);
}

} // namespace detail

// Coarsen one spatial block, replicate its interpolation across all blocks.
inline MultilevelHierarchy setup_masm_sub(const CsrMatrix& p, const BlockLayout& layout,
                                          const std::vector<int>& vertex_owner, int n_parts,
                                          const CoarsenOptions& opts)
{
    opts.validate();
    p.validate();
    if (p.n_rows != layout.dim())
        throw std::invalid_argument("setup_masm_sub: matrix does not match layout");
    if (!is_block_diagonal(p, layout))
        throw std::invalid_argument("setup_masm_sub: matrix must be block diagonal");
    if (opts.coarsen_block < 0 || opts.coarsen_block >= layout.n_blocks())
        throw std::invalid_argument("setup_masm_sub: coarsen_block out of range");
    if (static_cast<int>(vertex_owner.size()) != layout.n_space)
        throw std::invalid_argument("setup_masm_sub: vertex_owner size mismatch");

    MultilevelHierarchy h;
    h.mode = McMode::MasmSub;
    h.opts = opts;
    h.n_parts = n_parts;

    MultilevelHierarchy::Level first;
    first.p = p;
    first.layout = layout;
    first.n_blocks = layout.n_blocks();
    first.part_of = detail::replicate_parts(vertex_owner, layout);
    h.levels.push_back(std::move(first));

    CsrMatrix sub = block_view(p, layout, opts.coarsen_block);
    std::vector<int> space_part = vertex_owner;

    while (h.n_levels() < opts.max_levels && sub.n_rows > opts.coarsest_size) {
        Aggregation agg = aggregate(sub, opts.theta);
        if (agg.n_agg >= agg.n_fine)
            break;
        h.levels.back().coarsened_rows = sub.n_rows;

        CsrMatrix sub_interp = build_sub_interpolation(agg);
        const BlockLayout fine_layout = h.levels.back().layout;
        const BlockLayout coarse_layout{fine_layout.n_groups, fine_layout.n_directions,
                                        agg.n_agg};
        CsrMatrix interp = extend_interpolation(sub_interp, fine_layout, coarse_layout);

        MultilevelHierarchy::Level next;
        next.p = triple_product(interp, h.levels.back().p);
        next.layout = coarse_layout;
        next.n_blocks = coarse_layout.n_blocks();
        space_part = coarsen_parts(space_part, agg.membership, agg.n_agg, n_parts);
        next.part_of = detail::replicate_parts(space_part, coarse_layout);

        h.levels.back().interp = interp;
        h.levels.back().restrict_ = transpose(h.levels.back().interp);
        h.levels.back().sub_interp = std::move(sub_interp);
        sub = triple_product(h.levels.back().sub_interp, sub);
        h.levels.push_back(std::move(next));
    }

    detail::finish_hierarchy(h);
    return h;
}

// Coarsen the full matrix.
inline MultilevelHierarchy setup_masm(const CsrMatrix& p, const BlockLayout& layout,
                                      const std::vector<int>& vertex_owner, int n_parts,
                                      const CoarsenOptions& opts)
{
    opts.validate();
    p.validate();
    if (p.n_rows != layout.dim())
        throw std::invalid_argument("setup_masm: matrix does not match layout");
    if (static_cast<int>(vertex_owner.size()) != layout.n_space)
        throw std::invalid_argument("setup_masm: vertex_owner size mismatch");

    MultilevelHierarchy h;
    h.mode = McMode::Masm;
    h.opts = opts;
    h.n_parts = n_parts;

    MultilevelHierarchy::Level first;
    first.p = p;
    first.layout = layout;
    first.n_blocks = layout.n_blocks();
    first.part_of = detail::replicate_parts(vertex_owner, layout);
    h.levels.push_back(std::move(first));

    while (h.n_levels() < opts.max_levels && h.levels.back().p.n_rows > opts.coarsest_size) {
        const auto& cur = h.levels.back();
        Aggregation agg = aggregate(cur.p, opts.theta);
        if (agg.n_agg >= agg.n_fine)
            break;
        h.levels.back().coarsened_rows = cur.p.n_rows;

        CsrMatrix interp = build_sub_interpolation(agg);
        MultilevelHierarchy::Level next;
        next.p = triple_product(interp, cur.p);
        next.layout = BlockLayout{1, 1, agg.n_agg};
        next.n_blocks = cur.n_blocks;
        next.part_of = coarsen_parts(cur.part_of, agg.membership, agg.n_agg, n_parts);

        h.levels.back().interp = std::move(interp);
        h.levels.back().restrict_ = transpose(h.levels.back().interp);
        h.levels.push_back(std::move(next));
    }

    detail::finish_hierarchy(h);
    return h;
}

// Multiplicative V-cycle: RAS-preconditioned Richardson smoothing wrapped
// around a coarse-grid correction, direct solve on the coarsest level.
inline Vector v_cycle(const MultilevelHierarchy& h, int level, const Vector& r)
{
    if (level < 0 || level >= h.n_levels())
        throw std::invalid_argument("v_cycle: level out of range");
    const auto& lev = h.levels[level];
    if (static_cast<int>(r.size()) != lev.p.n_rows)
        throw std::invalid_argument("v_cycle: residual length mismatch");

    if (level == h.n_levels() - 1)
        return h.coarsest.solve(r);

    Vector e(r.size(), 0.0);
    auto smooth = [&](int its) {
        for (int it = 0; it < its; ++it) {
            Vector res = r - spmv(lev.p, e);
            Vector de = lev.smoother.apply(res);
            axpy(1.0, de, e);
        }
    };
    smooth(h.opts.pre_its);

    Vector rt = r - spmv(lev.p, e);
    Vector rc = spmv(lev.restrict_, rt);
    Vector z = v_cycle(h, level + 1, rc);
    Vector corr = spmv(lev.interp, z);
    axpy(1.0, corr, e);

    smooth(h.opts.post_its);
    return e;
}

inline Vector v_cycle(const MultilevelHierarchy& h, const Vector& r)
{
    return v_cycle(h, 0, r);
}

// One summary object per level: {"rows", "nnz", "n_blocks", "coarsened_rows"}.
inline std::string hierarchy_summary_json(const MultilevelHierarchy& h)
{
    std::string out = "[";
    for (int l = 0; l < h.n_levels(); ++l) {
        const auto& lev = h.levels[l];
        if (l > 0)
            out += ",";
        out += "{\"rows\":" + std::to_string(lev.p.n_rows);
        out += ",\"nnz\":" + std::to_string(lev.p.values.size());
        out += ",\"n_blocks\":" + std::to_string(lev.n_blocks);
        out += ",\"coarsened_rows\":" + std::to_string(lev.coarsened_rows) + "}";
    }
    out += "]";
    return out;
}

} // namespace snmg
