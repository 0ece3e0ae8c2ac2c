#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "snmg/core/vector.hpp"
#include "snmg/transport/mesh.hpp"

namespace snmg {

namespace detail {

inline std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

inline std::string full17(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

// phi[g*n_vertices + v]; one csv row per (vertex, group).
inline void export_flux_csv(const StructuredMesh& mesh, int n_groups, const Vector& phi,
                            const std::string& path)
{
    const int nv = mesh.n_vertices();
    if (static_cast<int>(phi.size()) != n_groups * nv)
        throw std::invalid_argument("export_flux_csv: flux length mismatch");
    std::ofstream out = detail::open_out(path);
    out << "x,y,z,group,phi\n";
    for (int k = 0; k <= mesh.nz; ++k)
        for (int j = 0; j <= mesh.ny; ++j)
            for (int i = 0; i <= mesh.nx; ++i) {
                const int v = mesh.vertex_id(i, j, k);
                for (int g = 0; g < n_groups; ++g)
                    out << detail::full17(i * mesh.hx) << ',' << detail::full17(j * mesh.hy)
                        << ',' << detail::full17(k * mesh.hz) << ',' << g << ','
                        << detail::full17(phi[static_cast<std::size_t>(g) * nv + v]) << '\n';
            }
    if (!out)
        throw std::runtime_error("write failed for '" + path + "'");
}

inline void export_flux_vtk(const StructuredMesh& mesh, int n_groups, const Vector& phi,
                            const std::string& path)
{
    const int nv = mesh.n_vertices();
    if (static_cast<int>(phi.size()) != n_groups * nv)
        throw std::invalid_argument("export_flux_vtk: flux length mismatch");
    std::ofstream out = detail::open_out(path);
    out << "# vtk DataFile Version 3.0\n";
    out << "scalar flux by group\n";
    out << "ASCII\n";
    out << "DATASET STRUCTURED_GRID\n";
    out << "DIMENSIONS " << mesh.nx + 1 << ' ' << mesh.ny + 1 << ' ' << mesh.nz + 1 << '\n';
    out << "POINTS " << nv << " double\n";
    for (int k = 0; k <= mesh.nz; ++k)
        for (int j = 0; j <= mesh.ny; ++j)
            for (int i = 0; i <= mesh.nx; ++i)
                out << detail::full17(i * mesh.hx) << ' ' << detail::full17(j * mesh.hy) << ' '
                    << detail::full17(k * mesh.hz) << '\n';
    out << "POINT_DATA " << nv << '\n';
    for (int g = 0; g < n_groups; ++g) {
        out << "SCALARS phi_g" << g << " double 1\n";
        out << "LOOKUP_TABLE default\n";
        for (int v = 0; v < nv; ++v)
            out << detail::full17(phi[static_cast<std::size_t>(g) * nv + v]) << '\n';
    }
    if (!out)
        throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace snmg
