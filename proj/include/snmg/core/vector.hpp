#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace snmg {

using Vector = std::vector<double>;

// Reductions are kept sequential on purpose: results must not depend on the
// worker-thread count.
inline double dot(const Vector& a, const Vector& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const Vector& x, Vector& y)
{
    if (x.size() != y.size())
        throw std::invalid_argument("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] += alpha * x[i];
}

inline void scale(Vector& x, double alpha)
{
    for (double& v : x)
        v *= alpha;
}

inline Vector operator-(const Vector& a, const Vector& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("vector -: length mismatch");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] - b[i];
    return r;
}

inline Vector operator+(const Vector& a, const Vector& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("vector +: length mismatch");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] + b[i];
    return r;
}

} // namespace snmg
