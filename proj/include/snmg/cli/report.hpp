#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "snmg/cli/config.hpp"
#include "snmg/solver/eigen.hpp"

namespace snmg {

// Timings are wall-clock seconds at millisecond resolution.
inline double round_ms(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

inline Json report_to_json(const ConvergenceReport& rep, bool with_timing)
{
    auto t = [with_timing](double s) { return with_timing ? round_ms(s) : 0.0; };
    Json j;
    j["iter_newton"] = rep.iter_newton;
    j["iter_gmres_avg"] = rep.iter_gmres_avg;
    j["time_pcsetup"] = t(rep.time_pcsetup);
    j["time_pcapply"] = t(rep.time_pcapply);
    j["time_ksp"] = t(rep.time_ksp);
    j["time_total"] = t(rep.time_total);
    j["time_func"] = t(rep.time_func);
    j["time_jac"] = t(rep.time_jac);
    j["time_ls"] = t(rep.time_ls);
    j["time_mf"] = t(rep.time_mf);
    j["final_k"] = rep.final_k;
    j["final_residual_norm"] = rep.final_residual_norm;
    return j;
}

struct ComparisonRow {
    int np = 1;
    std::string pc;
    int iter_newton = 0;
    double iter_gmres_avg = 0.0;
    double time_pcsetup = 0.0;
    double time_pcapply = 0.0;
    double time_ksp = 0.0;
    double time_total = 0.0;
    double eff = 0.0; // percent, 100 on each pc's baseline row
    long long coarsened_rows = 0;
};

// eff = 100 * (T_base * np_base) / (T * np), measured against the first row
// of the same pc; a desk-scale stand-in for strong-scaling efficiency.
inline void fill_efficiency(std::vector<ComparisonRow>& rows, bool with_timing)
{
    for (auto& row : rows) {
        const ComparisonRow* base = nullptr;
        for (const auto& prior : rows) {
            if (prior.pc == row.pc) {
                base = &prior;
                break;
            }
        }
        if (base == &row) {
            row.eff = 100.0;
        } else if (!with_timing || row.time_total <= 0.0) {
            row.eff = 0.0;
        } else {
            row.eff = 100.0 * (base->time_total * base->np) / (row.time_total * row.np);
        }
    }
}

inline Json comparison_to_json(const std::vector<ComparisonRow>& rows, int baseline_np,
                               bool with_timing)
{
    auto t = [with_timing](double s) { return with_timing ? round_ms(s) : 0.0; };
    Json j;
    j["eff_semantics"] = "desk_analog";
    j["baseline_np"] = baseline_np;
    Json jrows = Json::array();
    for (const auto& r : rows) {
        Json row;
        row["np"] = r.np;
        row["pc"] = r.pc;
        row["iter_newton"] = r.iter_newton;
        row["iter_gmres_avg"] = r.iter_gmres_avg;
        row["time_pcsetup"] = t(r.time_pcsetup);
        row["time_pcapply"] = t(r.time_pcapply);
        row["time_ksp"] = t(r.time_ksp);
        row["time_total"] = t(r.time_total);
        row["eff"] = with_timing ? std::round(r.eff * 10.0) / 10.0 : r.eff;
        row["coarsened_rows"] = r.coarsened_rows;
        jrows.push_back(std::move(row));
    }
    j["rows"] = std::move(jrows);
    return j;
}

} // namespace snmg
