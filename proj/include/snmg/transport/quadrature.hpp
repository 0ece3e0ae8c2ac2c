#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace snmg {

enum class QuadratureKind { LevelSymmetric, GaussChebyshev };

struct AngularQuadrature {
    QuadratureKind kind = QuadratureKind::LevelSymmetric;
    int order = 0;
    std::vector<std::array<double, 3>> directions;
    std::vector<double> weights;

    int size() const { return static_cast<int>(directions.size()); }
};

namespace detail {

// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15)
                break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

// Distinct cosine levels of the symmetric S_N set. Any first level in
// (0, 1/sqrt(3)) fixes the rest through mu_i^2 = mu_1^2 + (i-1) * delta.
inline std::vector<double> level_symmetric_mu(int order)
{
    double mu1 = 0.0;
    switch (order) {
    case 2: mu1 = 1.0 / std::sqrt(3.0); break;
    case 4: mu1 = 0.3500212; break;
    case 6: mu1 = 0.2666355; break;
    case 8: mu1 = 0.2182179; break;
    default:
        throw std::invalid_argument("level-symmetric quadrature: order must be 2, 4, 6 or 8");
    }
    const int nlev = order / 2;
    std::vector<double> mu(nlev);
    mu[0] = mu1;
    if (nlev > 1) {
        const double delta = 2.0 * (1.0 - 3.0 * mu1 * mu1) / (order - 2.0);
        for (int i = 1; i < nlev; ++i)
            mu[i] = std::sqrt(mu1 * mu1 + i * delta);
    }
    return mu;
}

// Point weights per symmetry class, octant-normalized (Lewis & Miller).
inline double level_symmetric_weight(int order, int i, int j, int k)
{
    int c[3] = {i, j, k};
    std::sort(c, c + 3);
    switch (order) {
    case 2:
        return 1.0;
    case 4:
        return 1.0 / 3.0;
    case 6:
        if (c[0] == 1 && c[1] == 1 && c[2] == 3)
            return 0.1761263;
        return 0.1572071; // class (1,2,2)
    case 8:
        if (c[0] == 1 && c[1] == 1 && c[2] == 4)
            return 0.1209877;
        if (c[0] == 2 && c[1] == 2 && c[2] == 2)
            return 0.0925926;
        return 0.0907407; // class (1,2,3)
    }
    throw std::invalid_argument("level_symmetric_weight: bad order");
}

} // namespace detail

inline AngularQuadrature build_quadrature(QuadratureKind kind, int order)
{
    constexpr double four_pi = 4.0 * std::numbers::pi;
    AngularQuadrature q;
    q.kind = kind;
    q.order = order;

    if (kind == QuadratureKind::LevelSymmetric) {
        const std::vector<double> mu = detail::level_symmetric_mu(order);
        const int half = order / 2;
        // Octant points: level indices (i, j, k) >= 1 with i + j + k = half + 2.
        for (int i = 1; i <= half; ++i) {
            for (int j = 1; j <= half + 1 - i; ++j) {
                const int k = half + 2 - i - j;
                if (k < 1)
                    continue;
                const double w = detail::level_symmetric_weight(order, i, j, k);
                for (int oct = 0; oct < 8; ++oct) {
                    const double sx = (oct & 1) ? -1.0 : 1.0;
                    const double sy = (oct & 2) ? -1.0 : 1.0;
                    const double sz = (oct & 4) ? -1.0 : 1.0;
                    q.directions.push_back({sx * mu[i - 1], sy * mu[j - 1], sz * mu[k - 1]});
                    q.weights.push_back(w);
                }
            }
        }
    } else {
        int npolar = 0, nazim = 0;
        switch (order) {
        case 8: npolar = 2; nazim = 4; break;
        case 16: npolar = 4; nazim = 4; break;
        case 32: npolar = 4; nazim = 8; break;
        default:
            throw std::invalid_argument("gauss-chebyshev quadrature: order must be 8, 16 or 32");
        }
        std::vector<double> gx, gw;
        detail::gauss_legendre(npolar, gx, gw);
        for (int l = 0; l < npolar; ++l) {
            const double s = std::sqrt(1.0 - gx[l] * gx[l]);
            for (int m = 0; m < nazim; ++m) {
                const double phi = 2.0 * std::numbers::pi * (m + 0.5) / nazim;
                q.directions.push_back({s * std::cos(phi), s * std::sin(phi), gx[l]});
                q.weights.push_back(gw[l] * 2.0 * std::numbers::pi / nazim);
            }
        }
    }

    // Normalize: unit directions, total weight exactly 4*pi.
    for (auto& d : q.directions) {
        const double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        d[0] /= n;
        d[1] /= n;
        d[2] /= n;
    }
    double wsum = 0.0;
    for (double w : q.weights)
        wsum += w;
    for (double& w : q.weights)
        w *= four_pi / wsum;
    return q;
}

inline AngularQuadrature build_quadrature(const std::string& kind, int order)
{
    if (kind == "level-symmetric")
        return build_quadrature(QuadratureKind::LevelSymmetric, order);
    if (kind == "gauss-chebyshev")
        return build_quadrature(QuadratureKind::GaussChebyshev, order);
    throw std::invalid_argument("unknown quadrature kind: " + kind);
}

// Index of the direction mirroring d across the plane normal to `axis`,
// or -1 when the set does not contain it.
inline int mirror_direction(const AngularQuadrature& q, int d, int axis)
{
    std::array<double, 3> m = q.directions[d];
    m[axis] = -m[axis];
    for (int r = 0; r < q.size(); ++r) {
        const auto& o = q.directions[r];
        if (std::abs(o[0] - m[0]) < 1e-12 && std::abs(o[1] - m[1]) < 1e-12
            && std::abs(o[2] - m[2]) < 1e-12)
            return r;
    }
    return -1;
}

} // namespace snmg
