#pragma once

// JSON views of reports, verdicts and trajectories.

#include <string>
#include <vector>

#include "json.hpp"

#include "wavegraph/criterion.hpp"
#include "wavegraph/cutoffs.hpp"
#include "wavegraph/dynamics.hpp"
#include "wavegraph/geometry.hpp"
#include "wavegraph/graph.hpp"

namespace wavegraph {

using Json = nlohmann::json;

inline Json to_json(const ValidationReport& r, const WeightedGraph& g) {
    Json out;
    out["valid"] = r.ok();
    out["components"] = r.component_count;
    out["violations"] = Json::array();
    for (const auto& v : r.violations) {
        Json labels = Json::array();
        for (VertexId x : v.vertices) labels.push_back(g.label(x));
        out["violations"].push_back({{"kind", std::string(to_string(v.kind))}, {"vertices", labels}, {"detail", v.detail}});
    }
    return out;
}

inline Json to_json(const AssumptionAReport& r, const WeightedGraph& g) {
    Json out;
    out["C1"] = r.C1;
    out["j"] = r.j;
    out["alpha"] = r.alpha;
    out["C2"] = r.C2;
    out["R0"] = r.R0;
    out["C2_bound"] = r.C2_bound ? Json(*r.C2_bound) : Json(nullptr);
    out["scanned"] = r.scanned;
    out["finite_balls"] = r.finite_balls;
    out["violations"] = Json::array();
    for (const auto& v : r.violations)
        out["violations"].push_back(
            {{"vertex", g.label(v.vertex)}, {"distance", v.distance}, {"laplacian", v.laplacian}, {"allowed", v.allowed}});
    Json excluded = Json::array();
    for (VertexId x : r.excluded_boundary) excluded.push_back(g.label(x));
    out["excluded_boundary"] = excluded;
    return out;
}

inline Json to_json(const AlphaFit& fit) {
    auto shells = [](const std::vector<ShellSample>& s) {
        Json arr = Json::array();
        for (const auto& sh : s)
            arr.push_back({{"r", sh.r}, {"max_positive_laplacian", sh.max_positive_laplacian}, {"count", sh.count}});
        return arr;
    };
    return {{"alpha_hat", fit.alpha_hat},
            {"C2_hat", fit.C2_hat},
            {"raw_slope", fit.raw_slope},
            {"residual", fit.residual},
            {"shells", shells(fit.used)},
            {"excluded_shells", shells(fit.excluded)}};
}

inline Json to_json(const Sec3LemmaResult& r) {
    return {{"family", "sec3"},
            {"R", r.R},
            {"C_lap", r.C_lap},
            {"C_dt", r.C_dt},
            {"C_dtt", r.C_dtt},
            {"C_lap_abs", r.C_lap_abs},
            {"C_dt_abs", r.C_dt_abs},
            {"C_dtt_abs", r.C_dtt_abs},
            {"outside_violation", r.outside_violation},
            {"outside_lap", r.outside_lap},
            {"outside_dt", r.outside_dt},
            {"outside_dtt", r.outside_dtt},
            {"grid_resolution", r.grid_resolution},
            {"time_samples", r.time_samples}};
}

inline Json to_json(const Sec4LemmaResult& r) {
    return {{"family", "sec4"},
            {"R", r.R},
            {"C_lap", r.C_lap},
            {"C_dt", r.C_dt},
            {"C_dtt", r.C_dtt},
            {"C_lap_signed", r.C_lap_signed},
            {"C_dt_signed", r.C_dt_signed},
            {"C_dtt_signed", r.C_dtt_signed},
            {"support_check", r.support_check},
            {"time_support_ok", r.time_support_ok},
            {"plateau_laplacian_ok", r.plateau_laplacian_ok},
            {"initial_velocity_ok", r.initial_velocity_ok},
            {"outside_violation", nullptr},
            {"grid_resolution", r.grid_resolution},
            {"time_samples", r.time_samples}};
}

inline Json to_json(const SystemParams& p) {
    return {{"p", p.p},         {"q", p.q},         {"theta1", p.theta1}, {"theta2", p.theta2},
            {"alpha", p.alpha}, {"delta", p.delta}, {"R0", p.R0}};
}

inline Json to_json(const CriterionVerdict& v, const SystemParams& params) {
    Json out;
    out["mode"] = v.mode;
    out["params"] = to_json(params);
    Json grid = Json::array(), series = Json::array();
    for (const auto& pt : v.series) {
        grid.push_back(pt.R);
        Json row{{"R", pt.R}};
        for (std::size_t k = 0; k < v.labels.size(); ++k) row[v.labels[k]] = pt.values[k];
        series.push_back(row);
    }
    out["R_grid"] = grid;
    out["series"] = series;
    out["exponents"] = v.exponents;
    out["exponent_estimate"] = v.exponent_estimate;
    out["critical_exponent"] = v.critical_exponent;
    out["satisfied"] = v.satisfied;
    out["tolerance"] = v.tolerance;
    out["fit_residual"] = v.fit_residual;
    out["notes"] = v.notes;
    return out;
}

inline Json to_json(const InitialDataReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"R", row.R},
                        {"liminf_u", row.liminf_u},
                        {"liminf_v", row.liminf_v},
                        {"printed_u", row.printed_u},
                        {"printed_v", row.printed_v},
                        {"tested_u", row.tested_u},
                        {"tested_v", row.tested_v}});
    return {{"total_u1", r.total_u1},
            {"total_v1", r.total_v1},
            {"total_u1_nonnegative", r.total_u1_nonnegative},
            {"total_v1_nonnegative", r.total_v1_nonnegative},
            {"liminf_proxy_u", r.liminf_proxy_u},
            {"liminf_proxy_v", r.liminf_proxy_v},
            {"liminf_ok", r.liminf_ok},
            {"printed_ok", r.printed_ok},
            {"rows", rows}};
}

inline Json to_json(const WeakFormReport& r) {
    return {{"lhs", r.lhs},
            {"rhs", r.rhs},
            {"residual", r.residual},
            {"terms",
             {{"dtt", r.dtt_term}, {"laplacian", r.laplacian_term}, {"u0", r.u0_term}, {"u1", r.u1_term}}},
            {"dt", r.dt},
            {"time_support", r.time_support}};
}

/// Blow-up event, or null when the trajectory completed.
inline Json blowup_json(const Trajectory& traj, const WeightedGraph& g) {
    if (!traj.blew_up()) return nullptr;
    return {{"t_b", traj.blowup_time}, {"vertex", g.label(traj.blowup_vertex)}, {"threshold", traj.blowup_threshold}};
}

inline Json error_json(const std::string& kind, const std::string& message) {
    return {{"error", {{"kind", kind}, {"message", message}}}};
}

} // namespace wavegraph
