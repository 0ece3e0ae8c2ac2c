#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace snmg {

// Multigroup material data. sigma_s is stored destination-major:
// sigma_s[g][gp] is the transfer cross section from group gp into group g.
struct Material {
    int id = 0;
    std::vector<double> sigma_t;
    std::vector<std::vector<double>> sigma_s;
    std::vector<double> nu_sigma_f;
    std::vector<double> chi;

    bool fissile() const
    {
        for (double v : nu_sigma_f)
            if (v > 0.0)
                return true;
        return false;
    }
};

struct CrossSectionSet {
    int n_groups = 0;
    std::vector<Material> materials;

    void validate() const
    {
        if (n_groups < 1)
            throw std::invalid_argument("CrossSectionSet: n_groups must be >= 1");
        if (materials.empty())
            throw std::invalid_argument("CrossSectionSet: no materials");
        for (const Material& m : materials) {
            const std::string where = "material " + std::to_string(m.id) + ": ";
            if (static_cast<int>(m.sigma_t.size()) != n_groups
                || static_cast<int>(m.nu_sigma_f.size()) != n_groups
                || static_cast<int>(m.chi.size()) != n_groups
                || static_cast<int>(m.sigma_s.size()) != n_groups)
                throw std::invalid_argument(where + "group count mismatch");
            for (const auto& row : m.sigma_s)
                if (static_cast<int>(row.size()) != n_groups)
                    throw std::invalid_argument(where + "sigma_s must be n_groups x n_groups");
            for (double v : m.sigma_t)
                if (!(v > 0.0))
                    throw std::invalid_argument(where + "sigma_t must be > 0");
            for (double v : m.nu_sigma_f)
                if (v < 0.0)
                    throw std::invalid_argument(where + "nu_sigma_f must be >= 0");
            for (const auto& row : m.sigma_s)
                for (double v : row)
                    if (v < 0.0)
                        throw std::invalid_argument(where + "sigma_s must be >= 0");
            if (m.fissile()) {
                double csum = 0.0;
                for (double v : m.chi) {
                    if (v < 0.0)
                        throw std::invalid_argument(where + "chi must be >= 0");
                    csum += v;
                }
                if (std::abs(csum - 1.0) > 1e-12)
                    throw std::invalid_argument(where + "chi must sum to 1 for fissile material");
            }
        }
    }

    int material_index(int id) const
    {
        for (std::size_t i = 0; i < materials.size(); ++i)
            if (materials[i].id == id)
                return static_cast<int>(i);
        throw std::invalid_argument("CrossSectionSet: unknown material id " + std::to_string(id));
    }
};

} // namespace snmg
