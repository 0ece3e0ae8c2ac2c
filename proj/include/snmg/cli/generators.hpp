#pragma once

#include <string>

#include "snmg/cli/config.hpp"
#include "snmg/transport/problem.hpp"

namespace snmg {

struct GeneratorParams {
    int groups = 1; // infinite_medium only
    int pins = 4;   // mini_lattice only
};

namespace gen {

inline Material one_group_medium()
{
    Material m;
    m.id = 0;
    m.sigma_t = {1.0};
    m.sigma_s = {{0.5}};
    m.nu_sigma_f = {0.6};
    m.chi = {1.0};
    return m;
}

inline Material two_group_medium()
{
    Material m;
    m.id = 0;
    m.sigma_t = {0.2, 0.8};
    m.sigma_s = {{0.08, 0.0}, {0.05, 0.55}};
    m.nu_sigma_f = {0.015, 0.54};
    m.chi = {1.0, 0.0};
    return m;
}

// Uniform fissile box, every face mirrored: the discrete eigenpair is the
// constant flux with k fixed by the group-balance matrix alone.
inline ProblemSpec infinite_medium(int groups)
{
    if (groups != 1 && groups != 2)
        throw ConfigError("generator infinite_medium: groups must be 1 or 2");
    ProblemSpec spec;
    spec.mesh = {4, 4, 4, 1.0, 1.0, 1.0};
    spec.quadrature = build_quadrature(QuadratureKind::LevelSymmetric, 2);
    spec.xs.n_groups = groups;
    spec.xs.materials = {groups == 1 ? one_group_medium() : two_group_medium()};
    spec.material_of_element.assign(spec.mesh.n_elements(), 0);
    spec.bcs.fill(BcType::Reflecting);
    spec.validate();
    return spec;
}

inline ProblemSpec pure_absorber()
{
    Material m;
    m.id = 0;
    m.sigma_t = {1.0};
    m.sigma_s = {{0.0}};
    m.nu_sigma_f = {0.0};
    m.chi = {0.0};
    ProblemSpec spec;
    spec.mesh = {4, 4, 4, 1.0, 1.0, 1.0};
    spec.quadrature = build_quadrature(QuadratureKind::LevelSymmetric, 2);
    spec.xs.n_groups = 1;
    spec.xs.materials = {std::move(m)};
    spec.material_of_element.assign(spec.mesh.n_elements(), 0);
    spec.bcs.fill(BcType::Vacuum);
    spec.validate();
    return spec;
}

// pins x pins two-group pin-cell lattice extruded one layer: fuel cylinders
// (radius 0.54, pitch 1.26) in moderator, 4x4 elements per cell, mirrored on
// {x-, y-, z-, z+} and open on {x+, y+}.
inline ProblemSpec mini_lattice(int pins)
{
    if (pins < 1)
        throw ConfigError("generator mini_lattice: pins must be positive");
    constexpr double pitch = 1.26;
    constexpr double radius = 0.54;
    ProblemSpec spec;
    spec.mesh = {4 * pins, 4 * pins, 1, pitch / 4.0, pitch / 4.0, pitch};

    Material fuel;
    fuel.id = 0;
    fuel.sigma_t = {0.2, 0.8};
    fuel.sigma_s = {{0.18, 0.0}, {0.01, 0.6}};
    fuel.nu_sigma_f = {0.01, 0.3};
    fuel.chi = {1.0, 0.0};
    Material moderator;
    moderator.id = 1;
    moderator.sigma_t = {0.25, 1.1};
    moderator.sigma_s = {{0.22, 0.0}, {0.025, 1.05}};
    moderator.nu_sigma_f = {0.0, 0.0};
    moderator.chi = {0.0, 0.0};

    spec.quadrature = build_quadrature(QuadratureKind::LevelSymmetric, 2);
    spec.xs.n_groups = 2;
    spec.xs.materials = {std::move(fuel), std::move(moderator)};
    spec.material_of_element = cfg::pin_lattice_map(spec.mesh, pitch, radius);
    spec.bcs.fill(BcType::Vacuum);
    spec.bcs[static_cast<int>(Side::XMinus)] = BcType::Reflecting;
    spec.bcs[static_cast<int>(Side::YMinus)] = BcType::Reflecting;
    spec.bcs[static_cast<int>(Side::ZMinus)] = BcType::Reflecting;
    spec.bcs[static_cast<int>(Side::ZPlus)] = BcType::Reflecting;
    spec.validate();
    return spec;
}

} // namespace gen

inline ProblemSpec generate_problem(const std::string& kind, const GeneratorParams& params)
{
    if (kind == "infinite_medium")
        return gen::infinite_medium(params.groups);
    if (kind == "pure_absorber")
        return gen::pure_absorber();
    if (kind == "mini_lattice")
        return gen::mini_lattice(params.pins);
    throw ConfigError("unknown generator kind '" + kind + "'");
}

} // namespace snmg
