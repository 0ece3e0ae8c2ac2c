#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "snmg/core/vector.hpp"
#include "snmg/solver/gmres.hpp"

namespace snmg {

struct EigenState {
    Vector psi;
    double k = 0.0;
};

enum class FdDelta { SqrtEps }; // delta = sqrt(eps) * (1 + |psi|) / |v|

struct SolverOptions {
    double newton_rtol = 1e-6;
    double gmres_rtol = 1e-1;
    int gmres_restart = 30;
    int gmres_max_iters = 2000;
    int max_newton = 50;
    int max_power = 50;
    int n_initial_power = 2;
    FdDelta fd_delta_mode = FdDelta::SqrtEps;
    double ls_c = 1e-4;      // sufficient-decrease constant
    double ls_factor = 0.5;  // step shrink per halving
    int ls_max_halvings = 8;
    std::function<double(const Vector&)> sign_measure; // default: mean of psi
    std::function<void(int, double)> trace;            // (newton iter, |F|) after each accept

    void validate() const
    {
        if (!(newton_rtol > 0.0) || newton_rtol >= 1.0 || !(gmres_rtol > 0.0) || gmres_rtol >= 1.0)
            throw std::invalid_argument("solver options: tolerances must lie in (0,1)");
        if (gmres_restart < 1 || gmres_max_iters < 1 || max_newton < 1)
            throw std::invalid_argument("solver options: iteration limits must be positive");
        if (n_initial_power < 0 || n_initial_power > max_power)
            throw std::invalid_argument("solver options: initial power count out of range");
        if (!(ls_factor > 0.0) || ls_factor >= 1.0 || ls_max_halvings < 0 || !(ls_c > 0.0))
            throw std::invalid_argument("solver options: bad line-search parameters");
    }
};

struct ConvergenceReport {
    int iter_newton = 0;
    double iter_gmres_avg = 0.0;
    double time_pcsetup = 0.0;
    double time_pcapply = 0.0;
    double time_ksp = 0.0;
    double time_total = 0.0;
    double time_func = 0.0;
    double time_jac = 0.0;
    double time_ls = 0.0;
    double time_mf = 0.0;
    double final_k = 0.0;
    double final_residual_norm = 0.0;
};

struct NewtonFailure : std::runtime_error {
    EigenState state;
    ConvergenceReport report;

    NewtonFailure(const std::string& msg, EigenState st, ConvergenceReport rep)
        : std::runtime_error(msg), state(std::move(st)), report(std::move(rep))
    {
    }
};

// Matrix actions of the generalized problem A psi = (1/k) B psi.
struct EigenOperator {
    int dim = 0;
    std::function<Vector(const Vector&)> apply_A;
    std::function<Vector(const Vector&)> apply_B;
};

// Preconditioner handed to the solver ready-made; setup cost is carried along
// for reporting.
struct Preconditioner {
    std::function<Vector(const Vector&)> apply; // empty means identity
    double setup_seconds = 0.0;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_between(Clock::time_point a, Clock::time_point b)
{
    return std::chrono::duration<double>(b - a).count();
}

struct Accumulator {
    double* slot;
    Clock::time_point start;

    explicit Accumulator(double* s) : slot(s), start(Clock::now()) {}
    ~Accumulator() { *slot += seconds_between(start, Clock::now()); }
};

inline double mean_of(const Vector& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

} // namespace detail

inline double eigenvalue_of(const Vector& psi, const std::function<Vector(const Vector&)>& apply_b)
{
    if (norm2(psi) == 0.0)
        throw std::invalid_argument("eigenvalue_of: zero state");
    return norm2(apply_b(psi));
}

// F(psi) = A psi - (1/|B psi|) B psi
inline Vector eigen_residual(const EigenOperator& op, const Vector& psi)
{
    Vector b = op.apply_B(psi);
    const double bn = norm2(b);
    if (bn == 0.0)
        throw std::runtime_error("eigen residual: state has no fission content");
    Vector f = op.apply_A(psi);
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] -= b[i] / bn;
    return f;
}

// one-sided finite-difference action of the residual Jacobian at psi
template <typename ResidualFn>
Vector jfnk_matvec(ResidualFn&& residual, const Vector& psi, const Vector& f0, const Vector& v)
{
    const double vn = norm2(v);
    if (vn == 0.0 || !std::isfinite(1.0 / vn))
        throw std::invalid_argument("jfnk_matvec: zero direction");
    const double delta =
        std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + norm2(psi)) / vn;
    Vector pert = psi;
    axpy(delta, v, pert);
    Vector jv = residual(pert);
    for (std::size_t i = 0; i < jv.size(); ++i)
        jv[i] = (jv[i] - f0[i]) / delta;
    return jv;
}

// Eq-style power iteration: solve A psi' = (1/k) B psi, then k' = |B psi'|.
inline EigenState inverse_power_iterate(const EigenOperator& op, EigenState state, int n_iters,
                                        const std::function<Vector(const Vector&)>& solve_A)
{
    if (n_iters < 1)
        throw std::invalid_argument("inverse_power_iterate: need at least one iteration");
    if (state.k <= 0.0)
        state.k = eigenvalue_of(state.psi, op.apply_B);
    for (int it = 0; it < n_iters; ++it) {
        if (state.k <= 0.0)
            throw std::runtime_error("inverse power iteration " + std::to_string(it)
                                     + ": no fission content");
        Vector rhs = op.apply_B(state.psi);
        scale(rhs, 1.0 / state.k);
        try {
            state.psi = solve_A(rhs);
        } catch (const GmresStagnation& e) {
            // keep the type so callers can classify this as nonconvergence
            throw GmresStagnation("inverse power iteration " + std::to_string(it) + ": "
                                      + e.what(),
                                  e.best, e.residual_norm, e.iterations);
        } catch (const std::exception& e) {
            throw std::runtime_error("inverse power iteration " + std::to_string(it) + ": "
                                     + e.what());
        }
        state.k = eigenvalue_of(state.psi, op.apply_B);
    }
    return state;
}

namespace detail {

// Inexact Newton with backtracking on |F|; shared by the eigenvalue solve and
// the fixed-source path. Timing slots accumulate into rep.
inline void newton_core(const std::function<Vector(const Vector&)>& feval,
                        const std::function<Vector(const Vector&)>& papply, Vector& psi,
                        const SolverOptions& opts, const GmresOptions& gopts,
                        ConvergenceReport& rep, double* ksp_slot, double* mf_slot,
                        double* ls_slot, const std::function<EigenState()>& snapshot)
{
    Vector f = feval(psi);
    double fnorm = norm2(f);
    // roundoff floor: a start at machine precision is already converged
    const double floor_abs = 1e-13 * (1.0 + norm2(psi));
    const double target = std::max(opts.newton_rtol * fnorm, floor_abs);
    if (opts.trace)
        opts.trace(0, fnorm);

    int gmres_total = 0;
    while (fnorm > target) {
        if (rep.iter_newton >= opts.max_newton) {
            rep.final_residual_norm = fnorm;
            rep.iter_gmres_avg =
                rep.iter_newton > 0 ? static_cast<double>(gmres_total) / rep.iter_newton : 0.0;
            throw NewtonFailure("newton: iteration limit reached", snapshot(), rep);
        }

        Vector rhs = f;
        scale(rhs, -1.0);
        auto jv = [&](const Vector& v) {
            Accumulator acc(mf_slot);
            return jfnk_matvec(feval, psi, f, v);
        };
        GmresResult step;
        {
            Accumulator acc(ksp_slot);
            try {
                step = gmres_solve(jv, papply, rhs, gopts);
            } catch (const GmresStagnation& e) {
                // hand the best iterate to the line search; a useless step
                // fails there and surfaces as a Newton failure
                step.x = e.best;
                step.iterations = e.iterations;
                step.residual_norm = e.residual_norm;
            }
        }
        gmres_total += step.iterations;

        bool accepted = false;
        {
            Accumulator acc(ls_slot);
            double alpha = 1.0;
            for (int halving = 0; halving <= opts.ls_max_halvings; ++halving) {
                Vector trial = psi;
                axpy(alpha, step.x, trial);
                Vector ftrial = feval(trial);
                const double fn = norm2(ftrial);
                if (fn <= (1.0 - opts.ls_c * alpha) * fnorm) {
                    psi = std::move(trial);
                    f = std::move(ftrial);
                    fnorm = fn;
                    accepted = true;
                    break;
                }
                alpha *= opts.ls_factor;
            }
        }
        if (!accepted) {
            rep.final_residual_norm = fnorm;
            rep.iter_gmres_avg =
                rep.iter_newton > 0 ? static_cast<double>(gmres_total) / rep.iter_newton : 0.0;
            throw NewtonFailure("newton: line search failed to decrease the residual", snapshot(),
                                rep);
        }
        ++rep.iter_newton;
        if (opts.trace)
            opts.trace(rep.iter_newton, fnorm);
    }

    rep.final_residual_norm = fnorm;
    rep.iter_gmres_avg =
        rep.iter_newton > 0 ? static_cast<double>(gmres_total) / rep.iter_newton : 0.0;
}

} // namespace detail

// Full eigenvalue pipeline: power-iteration warm start, then Jacobian-free
// Newton on F(psi) = A psi - B psi / |B psi|.
inline std::pair<EigenState, ConvergenceReport> newton_solve(const EigenOperator& op,
                                                             const Preconditioner& prec,
                                                             const SolverOptions& opts,
                                                             const Vector* psi0 = nullptr)
{
    opts.validate();
    if (op.dim <= 0 || !op.apply_A || !op.apply_B)
        throw std::invalid_argument("newton_solve: incomplete operator");
    const auto t_start = detail::Clock::now();

    ConvergenceReport rep;
    rep.time_pcsetup = prec.setup_seconds;
    double ksp = 0.0, pcapply = 0.0, func = 0.0, mf = 0.0, ls = 0.0;

    auto papply = [&](const Vector& v) {
        detail::Accumulator acc(&pcapply);
        return prec.apply ? prec.apply(v) : v;
    };
    auto feval = [&](const Vector& v) {
        detail::Accumulator acc(&func);
        return eigen_residual(op, v);
    };

    EigenState st;
    st.psi = psi0 ? *psi0 : Vector(op.dim, 1.0);
    if (static_cast<int>(st.psi.size()) != op.dim)
        throw std::invalid_argument("newton_solve: initial state length mismatch");
    st.k = eigenvalue_of(st.psi, op.apply_B);
    if (st.k == 0.0)
        throw std::runtime_error("newton_solve: non-fissile problem (B psi = 0)");

    GmresOptions gopts;
    gopts.rtol = opts.gmres_rtol;
    gopts.restart = opts.gmres_restart;
    gopts.max_iters = opts.gmres_max_iters;

    if (opts.n_initial_power > 0) {
        auto solve_A = [&](const Vector& rhs) {
            detail::Accumulator acc(&ksp);
            return gmres_solve(op.apply_A, papply, rhs, gopts).x;
        };
        st = inverse_power_iterate(op, st, opts.n_initial_power, solve_A);
    }

    auto snapshot = [&]() {
        EigenState s = st;
        s.k = eigenvalue_of(s.psi, op.apply_B);
        return s;
    };
    detail::newton_core(feval, papply, st.psi, opts, gopts, rep, &ksp, &mf, &ls, snapshot);

    st.k = eigenvalue_of(st.psi, op.apply_B);
    const double measure =
        opts.sign_measure ? opts.sign_measure(st.psi) : detail::mean_of(st.psi);
    if (measure < 0.0)
        scale(st.psi, -1.0);

    rep.final_k = st.k;
    rep.time_pcapply = pcapply;
    rep.time_ksp = rep.time_pcsetup + ksp;
    rep.time_func = func;
    rep.time_mf = mf;
    rep.time_ls = ls;
    rep.time_jac = 0.0; // no Jacobian is ever assembled
    rep.time_total =
        rep.time_pcsetup + detail::seconds_between(t_start, detail::Clock::now());
    return {std::move(st), rep};
}

// Newton on the linear fixed-source system A psi = q (no eigenvalue
// normalization); converges in one or two steps since F is affine.
inline std::pair<Vector, ConvergenceReport> newton_fixed_source(
    const EigenOperator& op, const Vector& q, const Preconditioner& prec,
    const SolverOptions& opts)
{
    opts.validate();
    if (op.dim <= 0 || !op.apply_A)
        throw std::invalid_argument("newton_fixed_source: incomplete operator");
    const auto t_start = detail::Clock::now();

    ConvergenceReport rep;
    rep.time_pcsetup = prec.setup_seconds;
    double ksp = 0.0, pcapply = 0.0, func = 0.0, mf = 0.0, ls = 0.0;

    auto papply = [&](const Vector& v) {
        detail::Accumulator acc(&pcapply);
        return prec.apply ? prec.apply(v) : v;
    };
    auto feval = [&](const Vector& v) {
        detail::Accumulator acc(&func);
        Vector f = op.apply_A(v);
        for (std::size_t i = 0; i < f.size(); ++i)
            f[i] -= q[i];
        return f;
    };

    GmresOptions gopts;
    gopts.rtol = opts.gmres_rtol;
    gopts.restart = opts.gmres_restart;
    gopts.max_iters = opts.gmres_max_iters;

    Vector psi(op.dim, 1.0);
    auto snapshot = [&]() { return EigenState{psi, 0.0}; };
    detail::newton_core(feval, papply, psi, opts, gopts, rep, &ksp, &mf, &ls, snapshot);

    rep.final_k = 0.0;
    rep.time_pcapply = pcapply;
    rep.time_ksp = rep.time_pcsetup + ksp;
    rep.time_func = func;
    rep.time_mf = mf;
    rep.time_ls = ls;
    rep.time_jac = 0.0;
    rep.time_total =
        rep.time_pcsetup + detail::seconds_between(t_start, detail::Clock::now());
    return {std::move(psi), rep};
}

} // namespace snmg
