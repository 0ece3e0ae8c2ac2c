#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "snmg/core/vector.hpp"

namespace snmg {

struct GmresOptions {
    double rtol = 1e-10;
    double atol = 0.0;
    int restart = 30;
    int max_iters = 1000;
};

struct GmresResult {
    Vector x;
    int iterations = 0;
    double residual_norm = 0.0;
};

// Thrown when a restart cycle makes no progress or the iteration budget runs
// out; carries the best iterate seen so far.
struct GmresStagnation : std::runtime_error {
    Vector best;
    double residual_norm;
    int iterations;

    GmresStagnation(const std::string& msg, Vector b, double rn, int its)
        : std::runtime_error(msg), best(std::move(b)), residual_norm(rn), iterations(its)
    {
    }
};

// Right-preconditioned flexible GMRES. The preconditioner may change between
// iterations (inner solves are themselves iterative), so the preconditioned
// basis Z is stored alongside V. Success is declared only on a recomputed
// true residual.
template <typename Op, typename Prec>
GmresResult gmres_solve(Op&& op, Prec&& prec, const Vector& b, const GmresOptions& opts,
                        const Vector* x0 = nullptr)
{
    if (opts.restart < 1 || opts.max_iters < 1)
        throw std::invalid_argument("gmres: restart and max_iters must be positive");
    if (!(opts.rtol > 0.0) || opts.rtol >= 1.0)
        throw std::invalid_argument("gmres: rtol must lie in (0,1)");

    const int n = static_cast<int>(b.size());
    Vector x = x0 ? *x0 : Vector(n, 0.0);
    if (x0 && x0->size() != b.size())
        throw std::invalid_argument("gmres: initial guess length mismatch");

    const double bnorm = norm2(b);
    if (bnorm == 0.0)
        return {Vector(n, 0.0), 0, 0.0};
    const double tol = std::max(opts.rtol * bnorm, opts.atol);

    int iters = 0;
    bool x_is_zero = (x0 == nullptr);
    Vector best = x;
    double best_res = std::numeric_limits<double>::max();
    double prev_cycle = std::numeric_limits<double>::max();

    const int m = opts.restart;
    std::vector<Vector> v(m + 1), z(m);
    std::vector<std::vector<double>> h(m);
    std::vector<double> g(m + 1), cs(m), sn(m);

    while (true) {
        Vector r = x_is_zero ? Vector(n, 0.0) : op(x);
        for (int i = 0; i < n; ++i)
            r[i] = b[i] - r[i];
        const double beta = norm2(r);
        if (beta < best_res) {
            best_res = beta;
            best = x;
        }
        if (beta <= tol)
            return {x, iters, beta};
        if (beta >= prev_cycle * (1.0 - 1e-12))
            throw GmresStagnation("gmres stagnated at restart", best, best_res, iters);
        if (iters >= opts.max_iters)
            throw GmresStagnation("gmres iteration limit reached", best, best_res, iters);
        prev_cycle = beta;

        v[0] = r;
        scale(v[0], 1.0 / beta);
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        int cols = 0;
        for (int j = 0; j < m && iters < opts.max_iters; ++j) {
            z[j] = prec(v[j]);
            Vector w = op(z[j]);
            h[j].assign(j + 2, 0.0);
            for (int i = 0; i <= j; ++i) {
                h[j][i] = dot(w, v[i]);
                axpy(-h[j][i], v[i], w);
            }
            const double hnext = norm2(w);
            h[j][j + 1] = hnext;
            for (int i = 0; i < j; ++i) {
                const double t = cs[i] * h[j][i] + sn[i] * h[j][i + 1];
                h[j][i + 1] = -sn[i] * h[j][i] + cs[i] * h[j][i + 1];
                h[j][i] = t;
            }
            const double denom = std::hypot(h[j][j], h[j][j + 1]);
            if (denom == 0.0)
                throw GmresStagnation("gmres breakdown: zero Hessenberg column", best, best_res,
                                      iters);
            cs[j] = h[j][j] / denom;
            sn[j] = h[j][j + 1] / denom;
            h[j][j] = denom;
            h[j][j + 1] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            ++iters;
            cols = j + 1;

            const double res_est = std::abs(g[j + 1]);
            const bool lucky = hnext <= 1e-14 * denom;
            if (!lucky) {
                v[j + 1] = std::move(w);
                scale(v[j + 1], 1.0 / hnext);
            }
            if (res_est <= tol || lucky)
                break;
        }

        // y from the triangularized least-squares system, then x += Z y
        std::vector<double> y(cols);
        for (int i = cols - 1; i >= 0; --i) {
            double acc = g[i];
            for (int j = i + 1; j < cols; ++j)
                acc -= h[j][i] * y[j];
            y[i] = acc / h[i][i];
        }
        for (int j = 0; j < cols; ++j)
            axpy(y[j], z[j], x);
        x_is_zero = false;
    }
}

} // namespace snmg
