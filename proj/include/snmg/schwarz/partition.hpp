#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "snmg/transport/mesh.hpp"

namespace snmg {

// Two-stage element partition: np1 outer parts, each split into np2 inner
// parts. Final part id = outer * np2 + inner.
struct Partition {
    int np1 = 1;
    int np2 = 1;
    std::vector<int> element_part;
    std::vector<int> vertex_owner;

    int n_parts() const { return np1 * np2; }
};

namespace detail {

// Recursive coordinate bisection over centroids. ids[first, last) is
// reordered in place; per-element part ids start at part_base.
inline void rcb(const std::vector<std::array<double, 3>>& centroid, std::vector<int>& ids,
                int first, int last, int np, int part_base, std::vector<int>& part_of)
{
    const int n = last - first;
    if (n < np)
        throw std::invalid_argument("rcb: fewer elements than parts");
    if (np == 1) {
        for (int t = first; t < last; ++t)
            part_of[ids[t]] = part_base;
        return;
    }

    std::array<double, 3> lo{}, hi{};
    lo.fill(std::numeric_limits<double>::max());
    hi.fill(std::numeric_limits<double>::lowest());
    for (int t = first; t < last; ++t)
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], centroid[ids[t]][a]);
            hi[a] = std::max(hi[a], centroid[ids[t]][a]);
        }
    int axis = 0; // longest extent wins, ties x before y before z
    for (int a = 1; a < 3; ++a)
        if (hi[a] - lo[a] > hi[axis] - lo[axis])
            axis = a;

    std::stable_sort(ids.begin() + first, ids.begin() + last,
                     [&](int a, int b) { return centroid[a][axis] < centroid[b][axis]; });

    const int np_left = np / 2;
    const int np_right = np - np_left;
    int n_left = static_cast<int>(std::llround(static_cast<double>(n) * np_left / np));
    n_left = std::clamp(n_left, np_left, n - np_right);

    rcb(centroid, ids, first, first + n_left, np_left, part_base, part_of);
    rcb(centroid, ids, first + n_left, last, np_right, part_base + np_left, part_of);
}

} // namespace detail

// Owner of each vertex. Interior vertices take their surrounding part;
// shared vertices take the majority part; exact ties alternate along the
// vertex ordering so tied parts end up with balanced interface counts,
// lowest part id breaking any remaining tie.
inline std::vector<int> assign_shared_vertices(const StructuredMesh& mesh,
                                               const std::vector<int>& element_part, int n_parts)
{
    if (static_cast<int>(element_part.size()) != mesh.n_elements())
        throw std::invalid_argument("assign_shared_vertices: element_part size mismatch");
    std::vector<int> owner(mesh.n_vertices(), -1);
    std::vector<int> tie_count(n_parts, 0);
    std::vector<int> votes(n_parts);
    for (int k = 0; k <= mesh.nz; ++k)
        for (int j = 0; j <= mesh.ny; ++j)
            for (int i = 0; i <= mesh.nx; ++i) {
                std::fill(votes.begin(), votes.end(), 0);
                int best = -1;
                for (int dk = -1; dk <= 0; ++dk)
                    for (int dj = -1; dj <= 0; ++dj)
                        for (int di = -1; di <= 0; ++di) {
                            const int ei = i + di, ej = j + dj, ek = k + dk;
                            if (ei < 0 || ei >= mesh.nx || ej < 0 || ej >= mesh.ny || ek < 0
                                || ek >= mesh.nz)
                                continue;
                            const int part = element_part[mesh.element_id(ei, ej, ek)];
                            if (part < 0 || part >= n_parts)
                                throw std::invalid_argument("assign_shared_vertices: part id out of range");
                            ++votes[part];
                            if (best < 0 || votes[part] > votes[best])
                                best = part;
                        }
                bool tied = false;
                for (int p = 0; p < n_parts; ++p)
                    if (p != best && votes[p] == votes[best])
                        tied = true;
                if (tied) {
                    for (int p = 0; p < n_parts; ++p)
                        if (votes[p] == votes[best] && tie_count[p] < tie_count[best])
                            best = p;
                    ++tie_count[best];
                }
                owner[mesh.vertex_id(i, j, k)] = best;
            }
    return owner;
}

inline Partition hierarchical_partition(const StructuredMesh& mesh, int np1, int np2)
{
    mesh.validate();
    if (np1 < 1 || np2 < 1)
        throw std::invalid_argument("hierarchical_partition: part counts must be positive");
    if (np1 * np2 > mesh.n_elements())
        throw std::invalid_argument("hierarchical_partition: more parts than elements");

    const int ne = mesh.n_elements();
    std::vector<std::array<double, 3>> centroid(ne);
    for (int e = 0; e < ne; ++e)
        centroid[e] = mesh.element_centroid(e);

    Partition part;
    part.np1 = np1;
    part.np2 = np2;
    part.element_part.assign(ne, -1);

    std::vector<int> ids(ne);
    std::iota(ids.begin(), ids.end(), 0);
    std::vector<int> outer(ne, -1);
    detail::rcb(centroid, ids, 0, ne, np1, 0, outer);

    for (int o = 0; o < np1; ++o) {
        std::vector<int> members;
        for (int e = 0; e < ne; ++e)
            if (outer[e] == o)
                members.push_back(e);
        std::vector<int> inner(ne, -1);
        detail::rcb(centroid, members, 0, static_cast<int>(members.size()), np2, 0, inner);
        for (int e : members)
            part.element_part[e] = o * np2 + inner[e];
    }

    part.vertex_owner = assign_shared_vertices(mesh, part.element_part, part.n_parts());
    return part;
}

} // namespace snmg
