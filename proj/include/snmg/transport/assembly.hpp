#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "snmg/core/block_layout.hpp"
#include "snmg/core/csr.hpp"
#include "snmg/core/vector.hpp"
#include "snmg/transport/problem.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace snmg {

// Reference integrals for one axis-aligned trilinear hex, evaluated with
// 2x2x2 Gauss (exact for these integrands). All elements of a uniform mesh
// share them. Local corner a: bit 0 -> +x, bit 1 -> +y, bit 2 -> +z.
struct ElementMatrices {
    std::array<double, 64> mass{};
    std::array<std::array<double, 64>, 3> grad{};                // ∫ (∂α φi) φj
    std::array<std::array<std::array<double, 64>, 3>, 3> stiff{}; // ∫ (∂α φi)(∂β φj)
    std::array<std::array<double, 64>, 6> face{};                 // ∮_side φi φj
};

inline ElementMatrices reference_element(double hx, double hy, double hz)
{
    ElementMatrices em;
    const double h[3] = {hx, hy, hz};
    const double gp = 1.0 / std::sqrt(3.0);
    const double det_j = hx * hy * hz / 8.0;

    auto corner = [](int a, int axis) { return ((a >> axis) & 1) ? 1.0 : -1.0; };
    auto basis = [&](int a, const double xi[3]) {
        return 0.125 * (1.0 + corner(a, 0) * xi[0]) * (1.0 + corner(a, 1) * xi[1])
               * (1.0 + corner(a, 2) * xi[2]);
    };
    auto dbasis = [&](int a, int axis, const double xi[3]) {
        double v = 0.125 * corner(a, axis) * (2.0 / h[axis]);
        for (int o = 0; o < 3; ++o)
            if (o != axis)
                v *= 1.0 + corner(a, o) * xi[o];
        return v;
    };

    for (int qx = 0; qx < 2; ++qx)
        for (int qy = 0; qy < 2; ++qy)
            for (int qz = 0; qz < 2; ++qz) {
                const double xi[3] = {(qx ? gp : -gp), (qy ? gp : -gp), (qz ? gp : -gp)};
                double n[8], dn[3][8];
                for (int a = 0; a < 8; ++a) {
                    n[a] = basis(a, xi);
                    for (int al = 0; al < 3; ++al)
                        dn[al][a] = dbasis(a, al, xi);
                }
                for (int a = 0; a < 8; ++a)
                    for (int b = 0; b < 8; ++b) {
                        em.mass[a * 8 + b] += n[a] * n[b] * det_j;
                        for (int al = 0; al < 3; ++al) {
                            em.grad[al][a * 8 + b] += dn[al][a] * n[b] * det_j;
                            for (int be = 0; be < 3; ++be)
                                em.stiff[al][be][a * 8 + b] += dn[al][a] * dn[be][b] * det_j;
                        }
                    }
            }

    // Face mass matrices: fix the side's axis coordinate, 2x2 Gauss on the rest.
    for (int s = 0; s < 6; ++s) {
        const int axis = s / 2;
        const double fixed = (s % 2) ? 1.0 : -1.0;
        const int t1 = (axis + 1) % 3, t2 = (axis + 2) % 3;
        const double det_f = h[t1] * h[t2] / 4.0;
        for (int q1 = 0; q1 < 2; ++q1)
            for (int q2 = 0; q2 < 2; ++q2) {
                double xi[3];
                xi[axis] = fixed;
                xi[t1] = q1 ? gp : -gp;
                xi[t2] = q2 ? gp : -gp;
                for (int a = 0; a < 8; ++a)
                    for (int b = 0; b < 8; ++b)
                        em.face[s][a * 8 + b] += basis(a, xi) * basis(b, xi) * det_f;
            }
    }
    return em;
}

// One streaming/collision diagonal block of the preconditioning matrix:
// tau (Omega.grad phi_i, Omega.grad phi_j) + (tau sigma_t - 1) (Omega.grad phi_i, phi_j)
// + sigma_t (phi_i, phi_j), plus the outflow term on every boundary side when
// include_boundary is set (reflecting inflow coupling is left out on purpose;
// the full operator applies it matrix-free).
inline CsrMatrix assemble_block(const ProblemSpec& spec, int g, int d, bool include_boundary = true)
{
    if (g < 0 || g >= spec.n_groups() || d < 0 || d >= spec.n_directions())
        throw std::invalid_argument("assemble_block: (g, d) out of range");
    const StructuredMesh& mesh = spec.mesh;
    const ElementMatrices em = reference_element(mesh.hx, mesh.hy, mesh.hz);
    const std::array<double, 3>& omega = spec.quadrature.directions[d];

    // Local matrix per material (uniform mesh: elements only differ by material).
    const int n_mat = static_cast<int>(spec.xs.materials.size());
    std::vector<std::array<double, 64>> local(n_mat);
    for (int m = 0; m < n_mat; ++m) {
        const double sig = spec.xs.materials[m].sigma_t[g];
        const double tau = spec.tau(g, m);
        for (int ab = 0; ab < 64; ++ab) {
            double komega = 0.0, domega = 0.0;
            for (int al = 0; al < 3; ++al) {
                domega += omega[al] * em.grad[al][ab];
                for (int be = 0; be < 3; ++be)
                    komega += omega[al] * omega[be] * em.stiff[al][be][ab];
            }
            local[m][ab] = tau * komega + (tau * sig - 1.0) * domega + sig * em.mass[ab];
        }
    }

    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(mesh.n_elements()) * 64);
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto v = mesh.element_vertices(e);
        const auto& loc = local[spec.material_of_element[e]];
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b)
                t.push_back({v[a], v[b], loc[a * 8 + b]});
    }

    if (include_boundary) {
        for (int s = 0; s < 6; ++s) {
            const double odotn = omega[side_axis(static_cast<Side>(s))] * side_normal(static_cast<Side>(s));
            if (odotn <= 0.0)
                continue; // inflow or grazing: no outflow term
            for (int e = 0; e < mesh.n_elements(); ++e) {
                if (!mesh.element_on_side(e, static_cast<Side>(s)))
                    continue;
                const auto v = mesh.element_vertices(e);
                for (int a = 0; a < 8; ++a)
                    for (int b = 0; b < 8; ++b) {
                        const double val = em.face[s][a * 8 + b];
                        if (val != 0.0)
                            t.push_back({v[a], v[b], odotn * val});
                    }
            }
        }
    }
    return from_triplets(mesh.n_vertices(), mesh.n_vertices(), std::move(t));
}

inline CsrMatrix block_diagonal_stack(const std::vector<CsrMatrix>& blocks)
{
    if (blocks.empty())
        throw std::invalid_argument("block_diagonal_stack: no blocks");
    const int n = blocks[0].n_rows;
    CsrMatrix p;
    p.n_rows = p.n_cols = n * static_cast<int>(blocks.size());
    p.row_ptr.assign(p.n_rows + 1, 0);
    int nnz = 0;
    for (const CsrMatrix& b : blocks) {
        if (b.n_rows != n || b.n_cols != n)
            throw std::invalid_argument("block_diagonal_stack: blocks must share dimensions");
        nnz += b.nnz();
    }
    p.col_idx.reserve(nnz);
    p.values.reserve(nnz);
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        const CsrMatrix& b = blocks[j];
        const int off = static_cast<int>(j) * n;
        for (int i = 0; i < n; ++i) {
            p.row_ptr[off + i + 1] = p.row_ptr[off + i] + (b.row_ptr[i + 1] - b.row_ptr[i]);
            for (int q = b.row_ptr[i]; q < b.row_ptr[i + 1]; ++q) {
                p.col_idx.push_back(b.col_idx[q] + off);
                p.values.push_back(b.values[q]);
            }
        }
    }
    return p;
}

struct AssembledPc {
    CsrMatrix p;
    BlockLayout layout;
};

// Block-diagonal preconditioning matrix: one streaming/collision block per
// (group, direction), field-major. Blocks are independent, so they are
// assembled on the worker pool; results do not depend on the thread count.
inline AssembledPc assemble_preconditioner(const ProblemSpec& spec)
{
    BlockLayout layout{spec.n_groups(), spec.n_directions(), spec.mesh.n_vertices()};
    std::vector<CsrMatrix> blocks(layout.n_blocks());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int j = 0; j < layout.n_blocks(); ++j)
        blocks[j] = assemble_block(spec, j / layout.n_directions, j % layout.n_directions);
    return {block_diagonal_stack(blocks), layout};
}

// Phi[g*n_space + s] = sum_d w_d Psi[g, d, s].
inline Vector compute_scalar_flux(const ProblemSpec& spec, const BlockLayout& layout, const Vector& psi)
{
    if (static_cast<int>(psi.size()) != layout.dim())
        throw std::invalid_argument("compute_scalar_flux: length mismatch");
    Vector phi(static_cast<std::size_t>(layout.n_groups) * layout.n_space, 0.0);
    for (int g = 0; g < layout.n_groups; ++g)
        for (int d = 0; d < layout.n_directions; ++d) {
            const double w = spec.quadrature.weights[d];
            const int base = layout.block_index(g, d) * layout.n_space;
            for (int s = 0; s < layout.n_space; ++s)
                phi[static_cast<std::size_t>(g) * layout.n_space + s] += w * psi[base + s];
        }
    return phi;
}

// Discrete transport operator. The preconditioning matrix P carries the
// streaming/collision/outflow part; scattering, fission and reflecting inflow
// act matrix-free through per-material mass and streaming-test matrices.
struct TransportOperator {
    ProblemSpec spec;
    BlockLayout layout;
    CsrMatrix p;
    std::vector<CsrMatrix> mass_m;                  // per material
    std::vector<std::array<CsrMatrix, 3>> grad_m;   // per material, per axis
    std::array<CsrMatrix, 6> face_mass;             // per side
    std::vector<std::array<int, 3>> mirror_of;      // per direction, per axis
    std::vector<std::vector<double>> tau_gm;        // [group][material]

    int dim() const { return layout.dim(); }

    Vector scalar_flux(const Vector& psi) const { return compute_scalar_flux(spec, layout, psi); }

    // Shared kernel of scattering and fission: for each (g, d) accumulate
    // sum_{g', m} coef(g, g', m) * (M_m + tau_{g,m} Omega_d . G_m) Phi_{g'}.
    template <typename Coef>
    Vector apply_source_kernel(const Vector& psi, Coef coef) const
    {
        const int ng = layout.n_groups, nd = layout.n_directions, ns = layout.n_space;
        const int nm = static_cast<int>(spec.xs.materials.size());
        const Vector phi = scalar_flux(psi);

        std::vector<Vector> mphi(static_cast<std::size_t>(nm) * ng);
        std::vector<std::array<Vector, 3>> gphi(static_cast<std::size_t>(nm) * ng);
        for (int m = 0; m < nm; ++m)
            for (int gs = 0; gs < ng; ++gs) {
                Vector fg(phi.begin() + static_cast<std::size_t>(gs) * ns,
                          phi.begin() + static_cast<std::size_t>(gs + 1) * ns);
                mphi[m * ng + gs] = spmv(mass_m[m], fg);
                for (int al = 0; al < 3; ++al)
                    gphi[m * ng + gs][al] = spmv(grad_m[m][al], fg);
            }

        Vector out(dim(), 0.0);
        for (int g = 0; g < ng; ++g)
            for (int gs = 0; gs < ng; ++gs)
                for (int m = 0; m < nm; ++m) {
                    const double c = coef(g, gs, m);
                    if (c == 0.0)
                        continue;
                    const double tau = tau_gm[g][m];
                    const Vector& u = mphi[m * ng + gs];
                    const auto& w = gphi[m * ng + gs];
                    for (int d = 0; d < nd; ++d) {
                        const auto& om = spec.quadrature.directions[d];
                        const int base = layout.block_index(g, d) * ns;
                        for (int s = 0; s < ns; ++s) {
                            const double gterm = om[0] * w[0][s] + om[1] * w[1][s] + om[2] * w[2][s];
                            out[base + s] += c * (u[s] + tau * gterm);
                        }
                    }
                }
        return out;
    }

    Vector apply_scattering(const Vector& psi) const
    {
        constexpr double inv4pi = 1.0 / (4.0 * std::numbers::pi);
        return apply_source_kernel(psi, [&](int g, int gs, int m) {
            return spec.xs.materials[m].sigma_s[g][gs] * inv4pi;
        });
    }

    Vector apply_fission(const Vector& psi) const
    {
        constexpr double inv4pi = 1.0 / (4.0 * std::numbers::pi);
        return apply_source_kernel(psi, [&](int g, int gs, int m) {
            const Material& mat = spec.xs.materials[m];
            return mat.chi[g] * mat.nu_sigma_f[gs] * inv4pi;
        });
    }

    // Reflecting inflow coupling: direction d picks up the mirrored outgoing
    // flux on each reflecting side it enters through.
    Vector apply_reflect(const Vector& psi) const
    {
        const int ng = layout.n_groups, nd = layout.n_directions, ns = layout.n_space;
        Vector out(dim(), 0.0);
        for (int s = 0; s < 6; ++s) {
            if (spec.bcs[s] != BcType::Reflecting)
                continue;
            const int axis = side_axis(static_cast<Side>(s));
            const double nrm = side_normal(static_cast<Side>(s));
            for (int d = 0; d < nd; ++d) {
                const double odotn = spec.quadrature.directions[d][axis] * nrm;
                if (odotn >= 0.0)
                    continue;
                const int r = mirror_of[d][axis];
                for (int g = 0; g < ng; ++g) {
                    const int src = layout.block_index(g, r) * ns;
                    Vector mirror_psi(psi.begin() + src, psi.begin() + src + ns);
                    Vector contrib = spmv(face_mass[s], mirror_psi);
                    const int dst = layout.block_index(g, d) * ns;
                    for (int i = 0; i < ns; ++i)
                        out[dst + i] += -odotn * contrib[i];
                }
            }
        }
        return out;
    }

    // Full operator action: A Psi = P Psi - scattering - reflecting inflow.
    Vector apply_A(const Vector& psi) const
    {
        Vector y = spmv(p, psi);
        const Vector sc = apply_scattering(psi);
        const Vector rf = apply_reflect(psi);
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] -= sc[i] + rf[i];
        return y;
    }

    Vector apply_B(const Vector& psi) const { return apply_fission(psi); }
};

inline TransportOperator build_transport_operator(const ProblemSpec& spec)
{
    spec.validate();
    TransportOperator op;
    op.spec = spec;
    AssembledPc pc = assemble_preconditioner(spec);
    op.p = std::move(pc.p);
    op.layout = pc.layout;

    const StructuredMesh& mesh = spec.mesh;
    const ElementMatrices em = reference_element(mesh.hx, mesh.hy, mesh.hz);
    const int n_mat = static_cast<int>(spec.xs.materials.size());
    const int ns = mesh.n_vertices();

    std::vector<std::vector<Triplet>> tm(n_mat);
    std::vector<std::array<std::vector<Triplet>, 3>> tg(n_mat);
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const int m = spec.material_of_element[e];
        const auto v = mesh.element_vertices(e);
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) {
                tm[m].push_back({v[a], v[b], em.mass[a * 8 + b]});
                for (int al = 0; al < 3; ++al)
                    tg[m][al].push_back({v[a], v[b], em.grad[al][a * 8 + b]});
            }
    }
    op.mass_m.resize(n_mat);
    op.grad_m.resize(n_mat);
    for (int m = 0; m < n_mat; ++m) {
        op.mass_m[m] = from_triplets(ns, ns, std::move(tm[m]));
        for (int al = 0; al < 3; ++al)
            op.grad_m[m][al] = from_triplets(ns, ns, std::move(tg[m][al]));
    }

    for (int s = 0; s < 6; ++s) {
        std::vector<Triplet> tf;
        for (int e = 0; e < mesh.n_elements(); ++e) {
            if (!mesh.element_on_side(e, static_cast<Side>(s)))
                continue;
            const auto v = mesh.element_vertices(e);
            for (int a = 0; a < 8; ++a)
                for (int b = 0; b < 8; ++b) {
                    const double val = em.face[s][a * 8 + b];
                    if (val != 0.0)
                        tf.push_back({v[a], v[b], val});
                }
        }
        op.face_mass[s] = from_triplets(ns, ns, std::move(tf));
    }

    op.mirror_of.resize(spec.n_directions());
    for (int d = 0; d < spec.n_directions(); ++d)
        for (int axis = 0; axis < 3; ++axis)
            op.mirror_of[d][axis] = mirror_direction(spec.quadrature, d, axis);

    op.tau_gm.assign(spec.n_groups(), std::vector<double>(n_mat, 0.0));
    for (int g = 0; g < spec.n_groups(); ++g)
        for (int m = 0; m < n_mat; ++m)
            op.tau_gm[g][m] = spec.tau(g, m);
    return op;
}

} // namespace snmg
