#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "snmg/core/vector.hpp"

namespace snmg {

// Sorted set of unique global indices. Used for subdomain unknowns and
// overlap regions.
struct IndexSet {
    std::vector<int> idx;

    IndexSet() = default;
    explicit IndexSet(std::vector<int> v) : idx(std::move(v)) { validate(); }

    int size() const { return static_cast<int>(idx.size()); }
    bool empty() const { return idx.empty(); }

    void validate() const
    {
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] < 0)
                throw std::invalid_argument("IndexSet: negative index");
            if (i > 0 && idx[i] <= idx[i - 1])
                throw std::invalid_argument("IndexSet: indices must be sorted and unique");
        }
    }

    // validate and additionally require all indices below n
    void validate(int n) const
    {
        validate();
        if (!idx.empty() && idx.back() >= n)
            throw std::invalid_argument("IndexSet: index out of range");
    }

    bool contains(int i) const
    {
        return std::binary_search(idx.begin(), idx.end(), i);
    }
};

inline IndexSet make_index_set(std::vector<int> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return IndexSet(std::move(v));
}

// Gather v onto the set: result[p] = v[s.idx[p]].
inline Vector restrict_to(const Vector& v, const IndexSet& s)
{
    Vector r(s.idx.size());
    for (std::size_t p = 0; p < s.idx.size(); ++p) {
        if (s.idx[p] >= static_cast<int>(v.size()))
            throw std::invalid_argument("restrict_to: index out of range");
        r[p] = v[s.idx[p]];
    }
    return r;
}

// Scatter-add the local vector back: out[s.idx[p]] += sub[p].
inline void prolong_add(const Vector& sub, const IndexSet& s, Vector& out)
{
    if (sub.size() != s.idx.size())
        throw std::invalid_argument("prolong_add: local length mismatch");
    for (std::size_t p = 0; p < s.idx.size(); ++p) {
        if (s.idx[p] >= static_cast<int>(out.size()))
            throw std::invalid_argument("prolong_add: index out of range");
        out[s.idx[p]] += sub[p];
    }
}

} // namespace snmg
