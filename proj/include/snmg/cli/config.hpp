#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "snmg/transport/problem.hpp"

namespace snmg {

using Json = nlohmann::ordered_json;

// Raised for malformed input documents; the message names the offending key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace cfg {

inline const Json& require(const Json& j, const std::string& key, const std::string& path)
{
    if (!j.is_object())
        throw ConfigError("config: '" + path + "' must be an object");
    auto it = j.find(key);
    if (it == j.end())
        throw ConfigError("config: missing key '" + (path.empty() ? key : path + "." + key) + "'");
    return *it;
}

inline int require_int(const Json& j, const std::string& key, const std::string& path)
{
    const Json& v = require(j, key, path);
    if (!v.is_number_integer())
        throw ConfigError("config: '" + path + "." + key + "' must be an integer");
    return v.get<int>();
}

inline double require_number(const Json& j, const std::string& key, const std::string& path)
{
    const Json& v = require(j, key, path);
    if (!v.is_number())
        throw ConfigError("config: '" + path + "." + key + "' must be a number");
    return v.get<double>();
}

inline std::string require_string(const Json& j, const std::string& key, const std::string& path)
{
    const Json& v = require(j, key, path);
    if (!v.is_string())
        throw ConfigError("config: '" + path + "." + key + "' must be a string");
    return v.get<std::string>();
}

inline std::vector<double> number_array(const Json& v, const std::string& path)
{
    if (!v.is_array() || v.empty())
        throw ConfigError("config: '" + path + "' must be a non-empty array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number())
            throw ConfigError("config: '" + path + "' must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

inline Material material_from_json(const Json& m, const std::string& path)
{
    Material mat;
    mat.id = require_int(m, "id", path);
    mat.sigma_t = number_array(require(m, "sigma_t", path), path + ".sigma_t");
    mat.nu_sigma_f = number_array(require(m, "nu_sigma_f", path), path + ".nu_sigma_f");
    mat.chi = number_array(require(m, "chi", path), path + ".chi");
    const Json& ss = require(m, "sigma_s", path);
    if (!ss.is_array())
        throw ConfigError("config: '" + path + ".sigma_s' must be an array of arrays");
    for (std::size_t i = 0; i < ss.size(); ++i)
        mat.sigma_s.push_back(
            number_array(ss[i], path + ".sigma_s[" + std::to_string(i) + "]"));
    return mat;
}

// material_map as a pin-lattice description: a square grid of pitch-sized
// cells, each holding a centered cylinder of the first material in a matrix
// of the second; elements are classified by centroid.
inline std::vector<int> pin_lattice_map(const StructuredMesh& mesh, double pitch, double radius)
{
    if (pitch <= 0.0 || radius <= 0.0 || 2.0 * radius > pitch)
        throw ConfigError("config: material_map.pitch/radius must satisfy 0 < 2*radius <= pitch");
    std::vector<int> map(mesh.n_elements());
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto c = mesh.element_centroid(e);
        const double lx = c[0] - (std::floor(c[0] / pitch) + 0.5) * pitch;
        const double ly = c[1] - (std::floor(c[1] / pitch) + 0.5) * pitch;
        map[e] = (lx * lx + ly * ly <= radius * radius) ? 0 : 1;
    }
    return map;
}

} // namespace cfg

inline ProblemSpec problem_from_json(const Json& root)
{
    if (!root.is_object())
        throw ConfigError("config: top level must be an object");
    const Json& schema = cfg::require(root, "schema", "");
    if (!schema.is_number_integer() || schema.get<int>() != 1)
        throw ConfigError("config: 'schema' must be the integer 1");

    ProblemSpec spec;

    const Json& mesh = cfg::require(root, "mesh", "");
    spec.mesh.nx = cfg::require_int(mesh, "nx", "mesh");
    spec.mesh.ny = cfg::require_int(mesh, "ny", "mesh");
    spec.mesh.nz = cfg::require_int(mesh, "nz", "mesh");
    spec.mesh.hx = cfg::require_number(mesh, "hx", "mesh");
    spec.mesh.hy = cfg::require_number(mesh, "hy", "mesh");
    spec.mesh.hz = cfg::require_number(mesh, "hz", "mesh");
    if (spec.mesh.nx < 1 || spec.mesh.ny < 1 || spec.mesh.nz < 1)
        throw ConfigError("config: 'mesh.nx/ny/nz' must be positive");
    if (spec.mesh.hx <= 0.0 || spec.mesh.hy <= 0.0 || spec.mesh.hz <= 0.0)
        throw ConfigError("config: 'mesh.hx/hy/hz' must be positive");

    const Json& quad = cfg::require(root, "quadrature", "");
    const std::string kind = cfg::require_string(quad, "kind", "quadrature");
    const int order = cfg::require_int(quad, "order", "quadrature");
    try {
        spec.quadrature = build_quadrature(kind, order);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: 'quadrature': ") + e.what());
    }

    const Json& mats = cfg::require(root, "materials", "");
    if (!mats.is_array() || mats.empty())
        throw ConfigError("config: 'materials' must be a non-empty array");
    std::map<int, int> id_to_index;
    for (std::size_t i = 0; i < mats.size(); ++i) {
        const std::string path = "materials[" + std::to_string(i) + "]";
        Material m = cfg::material_from_json(mats[i], path);
        if (!id_to_index.emplace(m.id, static_cast<int>(i)).second)
            throw ConfigError("config: duplicate material id in '" + path + "'");
        spec.xs.materials.push_back(std::move(m));
    }
    spec.xs.n_groups = static_cast<int>(spec.xs.materials.front().sigma_t.size());

    const Json& map = cfg::require(root, "material_map", "");
    if (map.is_array()) {
        for (std::size_t i = 0; i < map.size(); ++i) {
            if (!map[i].is_number_integer())
                throw ConfigError("config: 'material_map' entries must be material ids");
            auto it = id_to_index.find(map[i].get<int>());
            if (it == id_to_index.end())
                throw ConfigError("config: 'material_map[" + std::to_string(i) +
                                  "]' references an unknown material id");
            spec.material_of_element.push_back(it->second);
        }
        if (static_cast<int>(spec.material_of_element.size()) != spec.mesh.n_elements())
            throw ConfigError("config: 'material_map' length must equal the element count");
    } else if (map.is_object()) {
        const std::string mkind = cfg::require_string(map, "kind", "material_map");
        if (mkind != "pin_lattice")
            throw ConfigError("config: 'material_map.kind' must be \"pin_lattice\"");
        if (spec.xs.materials.size() < 2)
            throw ConfigError("config: 'material_map.kind' pin_lattice needs two materials");
        spec.material_of_element =
            cfg::pin_lattice_map(spec.mesh, cfg::require_number(map, "pitch", "material_map"),
                                 cfg::require_number(map, "radius", "material_map"));
    } else {
        throw ConfigError("config: 'material_map' must be an array or a generator object");
    }

    if (root.contains("bcs")) {
        const Json& bcs = root["bcs"];
        if (!bcs.is_object())
            throw ConfigError("config: 'bcs' must be an object");
        for (auto it = bcs.begin(); it != bcs.end(); ++it) {
            Side side;
            try {
                side = side_from_name(it.key());
            } catch (const std::exception&) {
                throw ConfigError("config: 'bcs." + it.key() + "' is not a mesh side");
            }
            if (!it.value().is_string())
                throw ConfigError("config: 'bcs." + it.key() + "' must be a string");
            const std::string v = it.value().get<std::string>();
            if (v == "vacuum")
                spec.bcs[static_cast<int>(side)] = BcType::Vacuum;
            else if (v == "reflecting")
                spec.bcs[static_cast<int>(side)] = BcType::Reflecting;
            else
                throw ConfigError("config: 'bcs." + it.key() +
                                  "' must be \"vacuum\" or \"reflecting\"");
        }
    }

    if (root.contains("stabilization")) {
        const Json& st = root["stabilization"];
        spec.stabilization.c = cfg::require_number(st, "c", "stabilization");
        spec.stabilization.varsigma = cfg::require_number(st, "varsigma", "stabilization");
        if (spec.stabilization.c <= 0.0 || spec.stabilization.varsigma <= 0.0)
            throw ConfigError("config: 'stabilization.c/varsigma' must be positive");
    }

    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid problem: ") + e.what());
    }
    return spec;
}

inline Json problem_to_json(const ProblemSpec& spec)
{
    Json root;
    root["schema"] = 1;
    root["mesh"] = {{"nx", spec.mesh.nx}, {"ny", spec.mesh.ny}, {"nz", spec.mesh.nz},
                    {"hx", spec.mesh.hx}, {"hy", spec.mesh.hy}, {"hz", spec.mesh.hz}};
    root["quadrature"] = {
        {"kind", spec.quadrature.kind == QuadratureKind::LevelSymmetric ? "level-symmetric"
                                                                        : "gauss-chebyshev"},
        {"order", spec.quadrature.order}};
    Json mats = Json::array();
    for (const Material& m : spec.xs.materials) {
        Json jm;
        jm["id"] = m.id;
        jm["sigma_t"] = m.sigma_t;
        jm["sigma_s"] = m.sigma_s;
        jm["nu_sigma_f"] = m.nu_sigma_f;
        jm["chi"] = m.chi;
        mats.push_back(std::move(jm));
    }
    root["materials"] = std::move(mats);
    Json map = Json::array();
    for (int idx : spec.material_of_element)
        map.push_back(spec.xs.materials[idx].id);
    root["material_map"] = std::move(map);
    Json bcs;
    for (int s = 0; s < 6; ++s)
        bcs[side_name(static_cast<Side>(s))] =
            spec.bcs[s] == BcType::Vacuum ? "vacuum" : "reflecting";
    root["bcs"] = std::move(bcs);
    root["stabilization"] = {{"c", spec.stabilization.c},
                             {"varsigma", spec.stabilization.varsigma}};
    return root;
}

} // namespace snmg
