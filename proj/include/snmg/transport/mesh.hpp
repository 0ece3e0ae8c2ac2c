#pragma once

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace snmg {

// Box sides in fixed order; side/2 is the axis, side%2 the orientation.
enum class Side { XMinus = 0, XPlus, YMinus, YPlus, ZMinus, ZPlus };

inline const char* side_name(Side s)
{
    static const char* names[6] = {"x-", "x+", "y-", "y+", "z-", "z+"};
    return names[static_cast<int>(s)];
}

inline int side_axis(Side s) { return static_cast<int>(s) / 2; }

// Outward normal component along the side's axis.
inline double side_normal(Side s) { return (static_cast<int>(s) % 2 == 0) ? -1.0 : 1.0; }

// Uniform structured hex mesh on [0, nx*hx] x [0, ny*hy] x [0, nz*hz].
// Vertices and elements are numbered x-fastest.
struct StructuredMesh {
    int nx = 0, ny = 0, nz = 0;
    double hx = 0.0, hy = 0.0, hz = 0.0;

    void validate() const
    {
        if (nx < 1 || ny < 1 || nz < 1)
            throw std::invalid_argument("StructuredMesh: cell counts must be >= 1");
        if (hx <= 0.0 || hy <= 0.0 || hz <= 0.0)
            throw std::invalid_argument("StructuredMesh: spacings must be > 0");
    }

    int n_elements() const { return nx * ny * nz; }
    int n_vertices() const { return (nx + 1) * (ny + 1) * (nz + 1); }
    double min_edge() const { return std::min(hx, std::min(hy, hz)); }

    int vertex_id(int i, int j, int k) const { return i + (nx + 1) * (j + (ny + 1) * k); }
    int element_id(int i, int j, int k) const { return i + nx * (j + ny * k); }

    std::array<int, 3> element_ijk(int e) const
    {
        return {e % nx, (e / nx) % ny, e / (nx * ny)};
    }

    // Local corner a: bit 0 -> +x, bit 1 -> +y, bit 2 -> +z.
    std::array<int, 8> element_vertices(int e) const
    {
        const auto [i, j, k] = element_ijk(e);
        std::array<int, 8> v;
        for (int a = 0; a < 8; ++a)
            v[a] = vertex_id(i + (a & 1), j + ((a >> 1) & 1), k + ((a >> 2) & 1));
        return v;
    }

    std::array<double, 3> element_centroid(int e) const
    {
        const auto [i, j, k] = element_ijk(e);
        return {(i + 0.5) * hx, (j + 0.5) * hy, (k + 0.5) * hz};
    }

    std::array<double, 3> vertex_coords(int v) const
    {
        const int i = v % (nx + 1);
        const int j = (v / (nx + 1)) % (ny + 1);
        const int k = v / ((nx + 1) * (ny + 1));
        return {i * hx, j * hy, k * hz};
    }

    bool element_on_side(int e, Side s) const
    {
        const auto [i, j, k] = element_ijk(e);
        switch (s) {
        case Side::XMinus: return i == 0;
        case Side::XPlus: return i == nx - 1;
        case Side::YMinus: return j == 0;
        case Side::YPlus: return j == ny - 1;
        case Side::ZMinus: return k == 0;
        case Side::ZPlus: return k == nz - 1;
        }
        return false;
    }
};

inline Side side_from_name(const std::string& name)
{
    for (int s = 0; s < 6; ++s)
        if (name == side_name(static_cast<Side>(s)))
            return static_cast<Side>(s);
    throw std::invalid_argument("unknown side name: " + name);
}

} // namespace snmg
