#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "snmg/transport/cross_sections.hpp"
#include "snmg/transport/mesh.hpp"
#include "snmg/transport/quadrature.hpp"

namespace snmg {

enum class BcType { Vacuum, Reflecting };

inline BcType bc_from_name(const std::string& name)
{
    if (name == "vacuum")
        return BcType::Vacuum;
    if (name == "reflecting")
        return BcType::Reflecting;
    throw std::invalid_argument("unknown boundary condition: " + name);
}

inline const char* bc_name(BcType b) { return b == BcType::Vacuum ? "vacuum" : "reflecting"; }

// Streamline stabilization parameter. The small-cross-section branch bounds
// tau by the cell size so optically thin cells stay stable.
inline double compute_tau(double c, double varsigma, double h, double sigma_t)
{
    if (!(sigma_t > 0.0))
        throw std::invalid_argument("compute_tau: sigma_t must be > 0");
    if (!(h > 0.0))
        throw std::invalid_argument("compute_tau: h must be > 0");
    if (!(c > 0.0) || !(varsigma > 0.0))
        throw std::invalid_argument("compute_tau: c and varsigma must be > 0");
    if (c * h * sigma_t >= varsigma)
        return 1.0 / (c * sigma_t);
    return h / varsigma;
}

struct StabilizedTau {
    double c = 1.0;
    double varsigma = 0.5;

    // tau is per (group, material) on a uniform mesh: h is the same minimum
    // edge everywhere.
    double operator()(double h, double sigma_t) const { return compute_tau(c, varsigma, h, sigma_t); }
};

// Full description of a discrete problem instance.
struct ProblemSpec {
    StructuredMesh mesh;
    AngularQuadrature quadrature;
    CrossSectionSet xs;
    std::vector<int> material_of_element; // values index xs.materials
    std::array<BcType, 6> bcs{BcType::Vacuum, BcType::Vacuum, BcType::Vacuum,
                              BcType::Vacuum, BcType::Vacuum, BcType::Vacuum};
    StabilizedTau stabilization;

    int n_groups() const { return xs.n_groups; }
    int n_directions() const { return quadrature.size(); }

    double tau(int g, int mat) const
    {
        return stabilization(mesh.min_edge(), xs.materials[mat].sigma_t[g]);
    }

    void validate() const
    {
        mesh.validate();
        xs.validate();
        if (quadrature.size() < 1)
            throw std::invalid_argument("ProblemSpec: empty angular quadrature");
        if (static_cast<int>(material_of_element.size()) != mesh.n_elements())
            throw std::invalid_argument("ProblemSpec: material map must cover every element");
        for (int m : material_of_element)
            if (m < 0 || m >= static_cast<int>(xs.materials.size()))
                throw std::invalid_argument("ProblemSpec: material map entry out of range");
        if (!(stabilization.c > 0.0) || !(stabilization.varsigma > 0.0))
            throw std::invalid_argument("ProblemSpec: stabilization parameters must be > 0");
        for (int s = 0; s < 6; ++s) {
            if (bcs[s] != BcType::Reflecting)
                continue;
            const int axis = side_axis(static_cast<Side>(s));
            for (int d = 0; d < quadrature.size(); ++d) {
                if (mirror_direction(quadrature, d, axis) < 0)
                    throw std::invalid_argument(
                        std::string("ProblemSpec: reflecting side ") + side_name(static_cast<Side>(s))
                        + " needs the mirror of every quadrature direction");
            }
        }
    }

    bool fissile() const
    {
        for (int m : material_of_element)
            if (xs.materials[m].fissile())
                return true;
        return false;
    }
};

} // namespace snmg
