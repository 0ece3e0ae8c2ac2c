#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "snmg/cli/config.hpp"
#include "snmg/cli/flux_export.hpp"
#include "snmg/cli/generators.hpp"
#include "snmg/cli/report.hpp"
#include "snmg/multilevel/hierarchy.hpp"
#include "snmg/schwarz/partition.hpp"
#include "snmg/schwarz/ras.hpp"
#include "snmg/solver/eigen.hpp"
#include "snmg/transport/assembly.hpp"

namespace snmg {

struct RunConfig {
    // problem source: exactly one of these
    std::string config_path;
    std::string generator;
    GeneratorParams gen_params;

    int threads = 0; // 0 keeps the runtime default
    bool deterministic = false;
    unsigned seed = 0;
    std::string output_dir = ".";
    bool no_timing = false;

    int np1 = 1;
    int np2 = 1;

    int overlap = 0;
    std::string local_solver = "sor";
    int sor_sweeps = 2;
    double sor_omega = 1.0;

    std::string pc = "masm-sub";
    int levels = 10;
    double theta = 0.08;
    int coarsest_size = 200;
    int coarsen_block = 0;
    int pre_its = 1;
    int post_its = 1;

    std::string flux = "none"; // none | csv | vtk | both

    std::vector<int> np_list = {2, 4, 8, 16};
    std::vector<std::string> pc_list = {"masm", "masm-sub"};
};

struct PcBundle {
    Preconditioner prec;
    long long coarsened_rows = 0;
};

namespace driver {

inline RasOptions ras_options_from(const RunConfig& rc)
{
    RasOptions o;
    o.overlap = rc.overlap;
    o.solver = local_solver_from_name(rc.local_solver);
    o.sor_sweeps = rc.sor_sweeps;
    o.sor_omega = rc.sor_omega;
    return o;
}

inline PcBundle make_preconditioner(const RunConfig& rc, const TransportOperator& op,
                                    const Partition& part)
{
    PcBundle b;
    const auto t0 = detail::Clock::now();
    if (rc.pc == "none") {
        // identity: Preconditioner.apply stays empty
    } else if (rc.pc == "ras") {
        auto ras = std::make_shared<RasPreconditioner>();
        ras->setup(op.p, subdomain_sets(op.layout, part.vertex_owner, part.n_parts()),
                   ras_options_from(rc));
        b.prec.apply = [ras](const Vector& v) { return ras->apply(v); };
    } else if (rc.pc == "masm" || rc.pc == "masm-sub") {
        CoarsenOptions co;
        co.theta = rc.theta;
        co.max_levels = rc.levels;
        co.coarsest_size = rc.coarsest_size;
        co.pre_its = rc.pre_its;
        co.post_its = rc.post_its;
        co.coarsen_block = rc.coarsen_block;
        co.smoother = ras_options_from(rc);
        auto h = std::make_shared<MultilevelHierarchy>(
            rc.pc == "masm" ? setup_masm(op.p, op.layout, part.vertex_owner, part.n_parts(), co)
                            : setup_masm_sub(op.p, op.layout, part.vertex_owner, part.n_parts(),
                                             co));
        b.coarsened_rows = h->coarsened_rows();
        b.prec.apply = [h](const Vector& v) { return v_cycle(*h, v); };
    } else {
        throw ConfigError("unknown preconditioner '" + rc.pc + "'");
    }
    b.prec.setup_seconds = detail::seconds_between(t0, detail::Clock::now());
    return b;
}

inline ProblemSpec build_problem(const RunConfig& rc)
{
    const bool has_file = !rc.config_path.empty();
    const bool has_gen = !rc.generator.empty();
    if (has_file == has_gen)
        throw ConfigError("give exactly one problem source: --config or --generator");
    if (has_gen)
        return generate_problem(rc.generator, rc.gen_params);
    std::ifstream in(rc.config_path);
    if (!in)
        throw ConfigError("cannot read config file '" + rc.config_path + "'");
    Json root;
    try {
        root = Json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError("config: not valid json: " + std::string(e.what()));
    }
    return problem_from_json(root);
}

struct SolveResult {
    EigenState state;
    ConvergenceReport report;
    long long coarsened_rows = 0;
};

inline SolveResult solve_problem(const RunConfig& rc, const ProblemSpec& spec,
                                 const TransportOperator& op)
{
    Partition part = hierarchical_partition(spec.mesh, rc.np1, rc.np2);
    PcBundle pc = make_preconditioner(rc, op, part);

    EigenOperator eig;
    eig.dim = op.layout.dim();
    eig.apply_A = [&op](const Vector& v) { return op.apply_A(v); };
    eig.apply_B = [&op](const Vector& v) { return op.apply_B(v); };

    SolverOptions opts;
    opts.sign_measure = [&op](const Vector& psi) {
        const Vector phi = op.scalar_flux(psi);
        double s = 0.0;
        for (int i = 0; i < op.layout.n_space; ++i)
            s += phi[i];
        return s / op.layout.n_space;
    };

    auto [state, report] = newton_solve(eig, pc.prec, opts);
    return {std::move(state), report, pc.coarsened_rows};
}

inline std::filesystem::path output_file(const RunConfig& rc, const std::string& name)
{
    std::filesystem::path dir(rc.output_dir);
    std::filesystem::create_directories(dir);
    return dir / name;
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out)
        throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline void export_requested_flux(const RunConfig& rc, const ProblemSpec& spec,
                                  const TransportOperator& op, const Vector& psi)
{
    if (rc.flux == "none")
        return;
    const Vector phi = op.scalar_flux(psi);
    if (rc.flux == "csv" || rc.flux == "both")
        export_flux_csv(spec.mesh, op.layout.n_groups, phi,
                        output_file(rc, "flux.csv").string());
    if (rc.flux == "vtk" || rc.flux == "both")
        export_flux_vtk(spec.mesh, op.layout.n_groups, phi,
                        output_file(rc, "flux.vtk").string());
    if (rc.flux != "csv" && rc.flux != "vtk" && rc.flux != "both")
        throw ConfigError("unknown flux format '" + rc.flux + "'");
}

inline int cmd_solve(const RunConfig& rc)
{
    ProblemSpec spec = build_problem(rc);
    TransportOperator op = build_transport_operator(spec);
    SolveResult res = solve_problem(rc, spec, op);

    const auto path = output_file(rc, "report.json");
    write_text(path, report_to_json(res.report, !rc.no_timing).dump(2) + "\n");
    export_requested_flux(rc, spec, op, res.state.psi);

    std::printf("k = %.10f  iter_newton = %d  iter_gmres_avg = %.2f\n", res.state.k,
                res.report.iter_newton, res.report.iter_gmres_avg);
    std::printf("report: %s\n", path.string().c_str());
    return 0;
}

// np -> (np1, np2) with np1 >= np2 and np1*np2 = np, as square as possible
inline std::pair<int, int> split_np(int np)
{
    if (np < 1)
        throw ConfigError("np values must be positive");
    int d = static_cast<int>(std::floor(std::sqrt(static_cast<double>(np))));
    while (np % d != 0)
        --d;
    return {np / d, d};
}

inline int cmd_compare(const RunConfig& rc)
{
    if (rc.np_list.empty() || rc.pc_list.empty())
        throw ConfigError("--np-list and --pc-list must be non-empty");
    ProblemSpec spec = build_problem(rc);
    TransportOperator op = build_transport_operator(spec);

    std::vector<ComparisonRow> rows;
    for (const std::string& pc : rc.pc_list) {
        for (int np : rc.np_list) {
            RunConfig one = rc;
            one.pc = pc;
            std::tie(one.np1, one.np2) = split_np(np);
            SolveResult res = solve_problem(one, spec, op);
            ComparisonRow row;
            row.np = np;
            row.pc = pc;
            row.iter_newton = res.report.iter_newton;
            row.iter_gmres_avg = res.report.iter_gmres_avg;
            row.time_pcsetup = res.report.time_pcsetup;
            row.time_pcapply = res.report.time_pcapply;
            row.time_ksp = res.report.time_ksp;
            row.time_total = res.report.time_total;
            row.coarsened_rows = res.coarsened_rows;
            rows.push_back(std::move(row));
            std::printf("done: pc=%s np=%d iter_newton=%d iter_gmres_avg=%.2f\n", pc.c_str(),
                        np, rows.back().iter_newton, rows.back().iter_gmres_avg);
        }
    }
    fill_efficiency(rows, !rc.no_timing);

    const auto path = output_file(rc, "compare.json");
    write_text(path, comparison_to_json(rows, rc.np_list.front(), !rc.no_timing).dump(2) + "\n");

    std::printf("%-10s %4s %12s %15s %13s %12s %10s %9s %6s %15s\n", "pc", "np", "iter_newton",
                "iter_gmres_avg", "time_pcsetup", "time_pcapply", "time_ksp", "time_total",
                "eff", "coarsened_rows");
    for (const auto& r : rows)
        std::printf("%-10s %4d %12d %15.2f %13.3f %12.3f %10.3f %9.3f %6.1f %15lld\n",
                    r.pc.c_str(), r.np, r.iter_newton, r.iter_gmres_avg, r.time_pcsetup,
                    r.time_pcapply, r.time_ksp, r.time_total, r.eff, r.coarsened_rows);
    std::printf("comparison: %s\n", path.string().c_str());
    return 0;
}

inline int cmd_gen(const RunConfig& rc)
{
    if (rc.generator.empty())
        throw ConfigError("gen requires --kind");
    ProblemSpec spec = generate_problem(rc.generator, rc.gen_params);
    const auto path = output_file(rc, rc.generator + ".json");
    write_text(path, problem_to_json(spec).dump(2) + "\n");
    std::printf("wrote %s\n", path.string().c_str());
    return 0;
}

inline void add_common_options(CLI::App* cmd, RunConfig& rc, bool wants_problem)
{
    if (wants_problem) {
        cmd->add_option("--config", rc.config_path, "problem definition file (json)");
        cmd->add_option("--generator", rc.generator,
                        "built-in problem: infinite_medium, pure_absorber, mini_lattice");
        cmd->add_option("--groups", rc.gen_params.groups, "energy groups (infinite_medium)");
        cmd->add_option("--pins", rc.gen_params.pins, "pin cells per side (mini_lattice)");
    }
    cmd->add_option("--threads", rc.threads, "worker threads (0 = runtime default)");
    cmd->add_flag("--deterministic", rc.deterministic,
                  "fixed-order reductions (always on; flag kept for interface stability)");
    cmd->add_option("--seed", rc.seed, "seed for randomized harnesses (unused by solves)");
    cmd->add_option("--output", rc.output_dir, "output directory");
    cmd->add_flag("--no-timing", rc.no_timing, "zero out time_* fields in reports");
}

inline void add_solver_options(CLI::App* cmd, RunConfig& rc)
{
    cmd->add_option("--np1", rc.np1, "first-stage subdomain count");
    cmd->add_option("--np2", rc.np2, "second-stage subdomain count per first-stage part");
    cmd->add_option("--overlap", rc.overlap, "subdomain overlap layers");
    cmd->add_option("--local-solver", rc.local_solver, "subdomain solver: sor | lu");
    cmd->add_option("--sor-sweeps", rc.sor_sweeps, "sor sweeps per subdomain solve");
    cmd->add_option("--sor-omega", rc.sor_omega, "sor relaxation factor");
    cmd->add_option("--pc", rc.pc, "preconditioner: none | ras | masm | masm-sub");
    cmd->add_option("--levels", rc.levels, "max hierarchy levels");
    cmd->add_option("--theta", rc.theta, "aggregation strength threshold");
    cmd->add_option("--coarsest-size", rc.coarsest_size, "stop coarsening at this many rows");
    cmd->add_option("--coarsen-block", rc.coarsen_block, "block fed to the coarsener");
    cmd->add_option("--pre-its", rc.pre_its, "pre-smoothing iterations");
    cmd->add_option("--post-its", rc.post_its, "post-smoothing iterations");
}

} // namespace driver

inline int run(int argc, const char* const* argv)
{
    RunConfig rc;
    CLI::App app{"k-eigenvalue transport solver with Schwarz multilevel preconditioning"};
    app.require_subcommand(1);

    CLI::App* solve = app.add_subcommand("solve", "solve one problem, write report.json");
    driver::add_common_options(solve, rc, true);
    driver::add_solver_options(solve, rc);
    solve->add_option("--flux", rc.flux, "flux export: none | csv | vtk | both");

    CLI::App* compare =
        app.add_subcommand("compare", "solve across np and pc lists, write compare.json");
    driver::add_common_options(compare, rc, true);
    driver::add_solver_options(compare, rc);
    compare->add_option("--np-list", rc.np_list, "subdomain counts")->delimiter(',');
    compare->add_option("--pc-list", rc.pc_list, "preconditioners")->delimiter(',');

    CLI::App* gen = app.add_subcommand("gen", "write a generator's config to a file");
    gen->add_option("--kind", rc.generator, "generator kind")->required();
    gen->add_option("--groups", rc.gen_params.groups, "energy groups (infinite_medium)");
    gen->add_option("--pins", rc.gen_params.pins, "pin cells per side (mini_lattice)");
    gen->add_option("--output", rc.output_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

#ifdef _OPENMP
    if (rc.threads > 0)
        omp_set_num_threads(rc.threads);
#endif

    try {
        if (solve->parsed())
            return driver::cmd_solve(rc);
        if (compare->parsed())
            return driver::cmd_compare(rc);
        return driver::cmd_gen(rc);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NewtonFailure& e) {
        std::cerr << "error: solve did not converge: " << e.what()
                  << " (residual " << e.report.final_residual_norm << ")\n";
        return 3;
    } catch (const GmresStagnation& e) {
        std::cerr << "error: linear solver stagnated: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace snmg
