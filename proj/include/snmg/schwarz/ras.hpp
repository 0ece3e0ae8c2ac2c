#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "snmg/core/block_layout.hpp"
#include "snmg/core/csr.hpp"
#include "snmg/core/direct.hpp"
#include "snmg/core/index_set.hpp"
#include "snmg/core/vector.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace snmg {

enum class LocalSolver { Sor, Lu };

inline LocalSolver local_solver_from_name(const std::string& name)
{
    if (name == "sor")
        return LocalSolver::Sor;
    if (name == "lu")
        return LocalSolver::Lu;
    throw std::invalid_argument("unknown local solver: " + name);
}

struct RasOptions {
    int overlap = 0;
    LocalSolver solver = LocalSolver::Lu;
    int sor_sweeps = 2;
    double sor_omega = 1.0;
};

// One index set per part: the unknowns whose spatial vertex the part owns,
// replicated across every (group, direction) block.
inline std::vector<IndexSet> subdomain_sets(const BlockLayout& layout,
                                            const std::vector<int>& vertex_owner, int n_parts)
{
    if (static_cast<int>(vertex_owner.size()) != layout.n_space)
        throw std::invalid_argument("subdomain_sets: vertex_owner size mismatch");
    std::vector<IndexSet> sets(n_parts);
    for (int b = 0; b < layout.n_blocks(); ++b)
        for (int v = 0; v < layout.n_space; ++v) {
            const int part = vertex_owner[v];
            if (part < 0 || part >= n_parts)
                throw std::invalid_argument("subdomain_sets: owner out of range");
            sets[part].idx.push_back(b * layout.n_space + v);
        }
    for (auto& s : sets)
        s.validate(layout.dim());
    return sets;
}

// Grow each set by delta rounds of pattern adjacency: one round adds every
// column index reachable from the current set through a stored entry.
inline std::vector<IndexSet> build_overlap(const CsrMatrix& p, const std::vector<IndexSet>& nonoverlap,
                                           int delta)
{
    if (delta < 0)
        throw std::invalid_argument("build_overlap: negative layer count");
    std::vector<IndexSet> out;
    out.reserve(nonoverlap.size());
    std::vector<char> in_set(p.n_rows);
    for (const auto& s : nonoverlap) {
        s.validate(p.n_rows);
        std::vector<int> cur = s.idx;
        std::fill(in_set.begin(), in_set.end(), 0);
        for (int i : cur)
            in_set[i] = 1;
        std::vector<int> frontier = cur;
        for (int round = 0; round < delta; ++round) {
            std::vector<int> next;
            for (int i : frontier)
                for (int t = p.row_ptr[i]; t < p.row_ptr[i + 1]; ++t) {
                    const int j = p.col_idx[t];
                    if (!in_set[j]) {
                        in_set[j] = 1;
                        next.push_back(j);
                    }
                }
            cur.insert(cur.end(), next.begin(), next.end());
            frontier = std::move(next);
            if (frontier.empty())
                break;
        }
        out.push_back(make_index_set(std::move(cur)));
    }
    return out;
}

struct RasPreconditioner {
    struct Subdomain {
        IndexSet overlap;
        std::vector<int> owned_local;  // positions of owned unknowns inside overlap
        std::vector<int> owned_global; // matching global indices
        CsrMatrix local;
        ComponentLu lu;
        std::vector<double> diag; // per local row, for SOR
    };

    RasOptions opts;
    std::vector<Subdomain> subs;
    int n = 0;

    void setup(const CsrMatrix& p, const std::vector<IndexSet>& nonoverlap, RasOptions options)
    {
        p.validate();
        if (p.n_rows != p.n_cols)
            throw std::invalid_argument("ras setup: matrix must be square");
        opts = options;
        n = p.n_rows;

        std::vector<char> covered(n, 0);
        for (const auto& s : nonoverlap) {
            s.validate(n);
            for (int i : s.idx) {
                if (covered[i])
                    throw std::invalid_argument("ras setup: nonoverlap sets are not disjoint");
                covered[i] = 1;
            }
        }
        for (int i = 0; i < n; ++i)
            if (!covered[i])
                throw std::invalid_argument("ras setup: nonoverlap sets do not cover all unknowns");

        const auto overlap = build_overlap(p, nonoverlap, opts.overlap);
        subs.assign(nonoverlap.size(), {});
        for (std::size_t s = 0; s < subs.size(); ++s) {
            Subdomain& sd = subs[s];
            sd.overlap = overlap[s];
            sd.local = extract_submatrix(p, sd.overlap);
            sd.owned_global = nonoverlap[s].idx;
            sd.owned_local.reserve(sd.owned_global.size());
            for (int g : sd.owned_global) {
                const auto it = std::lower_bound(sd.overlap.idx.begin(), sd.overlap.idx.end(), g);
                sd.owned_local.push_back(static_cast<int>(it - sd.overlap.idx.begin()));
            }
            if (opts.solver == LocalSolver::Lu) {
                try {
                    sd.lu.factor(sd.local);
                } catch (const std::exception& e) {
                    throw std::runtime_error("ras subdomain " + std::to_string(s) + ": "
                                             + e.what());
                }
            } else {
                sd.diag.assign(sd.local.n_rows, 0.0);
                for (int i = 0; i < sd.local.n_rows; ++i)
                    for (int t = sd.local.row_ptr[i]; t < sd.local.row_ptr[i + 1]; ++t)
                        if (sd.local.col_idx[t] == i)
                            sd.diag[i] = sd.local.values[t];
                for (int i = 0; i < sd.local.n_rows; ++i)
                    if (sd.diag[i] == 0.0)
                        throw std::runtime_error("ras subdomain " + std::to_string(s)
                                                 + ": zero diagonal, SOR undefined");
            }
        }
    }

    Vector solve_local(const Subdomain& sd, const Vector& rhs) const
    {
        if (opts.solver == LocalSolver::Lu)
            return sd.lu.solve(rhs);
        Vector x(sd.local.n_rows, 0.0);
        for (int sweep = 0; sweep < opts.sor_sweeps; ++sweep)
            for (int i = 0; i < sd.local.n_rows; ++i) {
                double acc = rhs[i];
                for (int t = sd.local.row_ptr[i]; t < sd.local.row_ptr[i + 1]; ++t) {
                    const int j = sd.local.col_idx[t];
                    if (j != i)
                        acc -= sd.local.values[t] * x[j];
                }
                x[i] = (1.0 - opts.sor_omega) * x[i] + opts.sor_omega * acc / sd.diag[i];
            }
        return x;
    }

    // e = sum_i scatter_owned(solve_i(restrict_overlap(r))); owned sets are
    // disjoint, so subdomains write without conflicts in any order.
    Vector apply(const Vector& r) const
    {
        if (static_cast<int>(r.size()) != n)
            throw std::invalid_argument("ras apply: length mismatch");
        Vector e(n, 0.0);
        const int ns = static_cast<int>(subs.size());
#pragma omp parallel for schedule(dynamic)
        for (int s = 0; s < ns; ++s) {
            const Subdomain& sd = subs[s];
            Vector rhs = restrict_to(r, sd.overlap);
            Vector x = solve_local(sd, rhs);
            for (std::size_t t = 0; t < sd.owned_global.size(); ++t)
                e[sd.owned_global[t]] = x[sd.owned_local[t]];
        }
        return e;
    }
};

} // namespace snmg
