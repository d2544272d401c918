#pragma once

// Subcommand implementations behind the command-line tool. Each command
// validates its configuration, runs one experiment, and leaves a manifest
// (run.cfg) plus its artifacts in the output directory, so any run can be
// reproduced from the directory alone.

#include <iomanip>
#include <iostream>

#include <json.hpp>

#include "ecodamp/config.hpp"
#include "ecodamp/experiments.hpp"
#include "ecodamp/io.hpp"
#include "ecodamp/stability.hpp"

namespace ecodamp {

inline RefugeProfile make_refuge(const RunConfig& cfg) {
    const RefugeSpec& r = cfg.refuge;
    if (r.kind == "zero") return RefugeProfile::zero();
    if (r.kind == "one") return RefugeProfile::one();
    if (r.kind == "tanh") return RefugeProfile::tanh_step(r.center, r.width);
    if (r.kind == "square") return RefugeProfile::square(r.halfwidth);
    if (r.kind == "circle") return RefugeProfile::circle(r.threshold);
    if (r.kind == "table") {
        std::ifstream is(r.table);
        if (!is) throw ConfigError("refuge.table: cannot open '" + r.table + "'");
        std::vector<double> xs, vals;
        std::string line;
        int line_no = 0;
        while (std::getline(is, line)) {
            ++line_no;
            line = cfgdetail::trim(line);
            if (line.empty() || line[0] == '#') continue;
            std::size_t comma = line.find(',');
            if (comma == std::string::npos)
                throw ConfigError("refuge.table line " + std::to_string(line_no) + ": expected 'x,value'");
            xs.push_back(cfgdetail::parse_double(cfgdetail::trim(line.substr(0, comma)), line_no));
            vals.push_back(cfgdetail::parse_double(cfgdetail::trim(line.substr(comma + 1)), line_no));
        }
        return RefugeProfile::tabulated(std::move(xs), std::move(vals));
    }
    throw ConfigError("unknown refuge.kind '" + r.kind + "'");
}

// Parameters with the d4 = k |c - w3/D3| convenience applied.
inline ParameterSet effective_params(const RunConfig& cfg) {
    ParameterSet p = cfg.params;
    if (cfg.experiment.k_scale > 0.0) p.d4 = overcrowding_d4(p, cfg.experiment.k_scale);
    return p;
}

inline ModelVariant make_variant(const RunConfig& cfg) {
    return make_family_variant(parse_variant_tag(cfg.model_variant), make_refuge(cfg));
}

inline StateField1D make_ic_1d(const RunConfig& cfg, std::shared_ptr<const ChebGrid> grid) {
    const IcSpec& ic = cfg.ic;
    if (ic.kind == "uniform" || ic.kind == "fig2-uniform")
        return StateField1D::constant(grid, ic.u0, ic.v0, ic.r0);
    if (ic.kind == "fig9-perturbed-equilibrium") {
        Equilibrium e = interior_equilibrium(effective_params(cfg));
        auto bump = [&](double base) {
            return [base, amp = ic.amp](double x) { return base + amp * sq(std::cos(x)); };
        };
        return StateField1D::sampled(grid, bump(e.u_star), bump(e.v_star), bump(e.r_star));
    }
    if (ic.kind == "chaos-pair") {
        auto bump = [&](double base) {
            return [base, amp = cfg.chaos.amp1](double x) { return base + amp * sq(std::cos(x)); };
        };
        return StateField1D::sampled(grid, bump(25.0), bump(13.0), bump(9.0));
    }
    if (ic.kind == "snapshot") return read_snapshot_1d(ic.snapshot).state;
    throw ConfigError("ic.kind '" + ic.kind + "' is not a 1-D initial condition");
}

inline StateField2D make_ic_2d(const RunConfig& cfg, std::shared_ptr<const FDGrid2D> grid) {
    const IcSpec& ic = cfg.ic;
    if (ic.kind == "uniform") return StateField2D::constant(grid, ic.u0, ic.v0, ic.r0);
    const double two_pi = 2.0 * std::acos(-1.0);
    if (ic.kind == "fig4-gaussian") {
        auto cosmode = [two_pi](double x, double y) { return std::cos(two_pi * x) * std::cos(two_pi * y); };
        return StateField2D::sampled(
            grid, [&](double x, double y) { return cosmode(x, y) + 30.0; },
            [&](double x, double y) { return cosmode(x, y) + 230.0; },
            [](double x, double y) { return 100.0 * std::exp(-10.0 * (x * x + y * y)); });
    }
    if (ic.kind == "area-cos") {
        auto cosmode = [two_pi](double x, double y) { return std::cos(two_pi * x) * std::cos(two_pi * y); };
        return StateField2D::sampled(
            grid, [&](double x, double y) { return cosmode(x, y) + 30.0; },
            [&](double x, double y) { return cosmode(x, y) + 230.0; },
            [&](double x, double y) { return cosmode(x, y) + 30.0; });
    }
    if (ic.kind == "snapshot") return read_snapshot_2d(ic.snapshot).state;
    throw ConfigError("ic.kind '" + ic.kind + "' is not a 2-D initial condition");
}

inline int workers_of(const RunConfig& cfg) { return cfg.workers > 0 ? cfg.workers : default_workers(); }

inline void write_manifest(const RunConfig& cfg) {
    ensure_dir(cfg.output.dir);
    std::ofstream os(cfg.output.dir + "/run.cfg");
    if (!os) throw IoError("cannot write manifest in '" + cfg.output.dir + "'");
    os << emit_config(cfg);
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write '" + path + "'");
    os << j.dump(2) << "\n";
}

inline nlohmann::json report_json(const BlowupReport& rep) {
    return {
        {"status", rep.blew_up ? "blew-up" : "survived"},
        {"t_star", rep.blew_up ? rep.t_star : 0.0},
        {"horizon", rep.horizon},
        {"terminal_sup_norm", rep.terminal_sup_norm},
        {"terminal_population", rep.terminal_population},
        {"rejections", rep.rejection_count},
        {"clamps", rep.clamp_count},
    };
}

inline void write_population_csv(const std::string& path, const PopulationTrace& tr) {
    CsvWriter csv(path, "t,total_u,total_v,total_r");
    for (std::size_t i = 0; i < tr.t.size(); ++i) csv.row(tr.t[i], tr.u[i], tr.v[i], tr.r[i]);
}

namespace clidetail {

inline std::string snap_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%06zu.snap", index);
    return buf;
}

// x-t contour images from 1-D snapshots (time on the vertical axis).
inline void write_xt_heatmaps(const RunConfig& cfg, const std::vector<StateField1D>& snaps,
                              nlohmann::json& report) {
    if (snaps.size() < 2) return;
    const int m = snaps.front().size();
    Matrix field(static_cast<Eigen::Index>(snaps.size()), m);
    const char* names[3] = {"xt_u.pgm", "xt_v.pgm", "xt_r.pgm"};
    for (int s = 0; s < 3; ++s) {
        for (std::size_t k = 0; k < snaps.size(); ++k) {
            const Vector& w = s == 0 ? snaps[k].u : s == 1 ? snaps[k].v : snaps[k].r;
            // nodes are stored descending; flip so columns run left to right
            for (int i = 0; i < m; ++i) field(static_cast<Eigen::Index>(k), i) = w(m - 1 - i);
        }
        PgmScaling sc = write_pgm(cfg.output.dir + "/" + names[s], field);
        report["heatmaps"][names[s]] = {{"min", sc.min}, {"max", sc.max}};
    }
}

inline void write_field_heatmaps(const RunConfig& cfg, const StateField2D& f, nlohmann::json& report) {
    const char* names[3] = {"heat_u.pgm", "heat_v.pgm", "heat_r.pgm"};
    const Matrix* fields[3] = {&f.u, &f.v, &f.r};
    for (int s = 0; s < 3; ++s) {
        PgmScaling sc = write_pgm(cfg.output.dir + "/" + names[s], fields[s]->transpose());
        report["heatmaps"][names[s]] = {{"min", sc.min}, {"max", sc.max}};
    }
}

}  // namespace clidetail

inline int cmd_simulate(const RunConfig& cfg, const std::string& resume_path, std::ostream& log) {
    write_manifest(cfg);
    nlohmann::json report;
    try {
        if (cfg.grid.dim == 1) {
            StateField1D ic;
            ResumeState resume;
            bool resuming = false;
            if (!resume_path.empty()) {
                Snapshot1D snap = read_snapshot_1d(resume_path);
                ic = snap.state;
                if (snap.has_resume) {
                    resume = snap.resume;
                    resuming = true;
                }
            } else {
                auto grid = std::make_shared<const ChebGrid>(cfg.grid.n, cfg.grid.lo, cfg.grid.hi);
                ic = make_ic_1d(cfg, grid);
            }
            SpectralSolver1D solver(ic.grid, make_variant(cfg), effective_params(cfg), cfg.solver);
            auto res = integrate_1d(solver, ic, cfg.time.horizon, resuming ? resume.dt : cfg.time.dt,
                                    cfg.controller, cfg.time.snapshot_stride, resuming ? &resume : nullptr);
            for (std::size_t k = 0; k < res.snapshots.size(); ++k)
                write_snapshot(cfg.output.dir + "/" + clidetail::snap_name(k), res.snapshots[k]);
            write_snapshot(cfg.output.dir + "/checkpoint.snap", res.final_state, &res.checkpoint);
            write_population_csv(cfg.output.dir + "/population.csv", res.populations);
            report = report_json(res.report);
            report["snapshots"] = res.snapshots.size();
            if (cfg.output.heatmaps) clidetail::write_xt_heatmaps(cfg, res.snapshots, report);
            log << (res.report.blew_up ? "blew up at t* = " + std::to_string(res.report.t_star)
                                       : "survived to t = " + std::to_string(res.report.horizon))
                << ", sup |r| = " << res.report.terminal_sup_norm << "\n";
        } else if (cfg.grid.dim == 2) {
            StateField2D ic;
            ResumeState resume;
            bool resuming = false;
            if (!resume_path.empty()) {
                Snapshot2D snap = read_snapshot_2d(resume_path);
                ic = snap.state;
                if (snap.has_resume) {
                    resume = snap.resume;
                    resuming = true;
                }
            } else {
                auto grid = std::make_shared<const FDGrid2D>(cfg.grid.n, cfg.grid.m);
                ic = make_ic_2d(cfg, grid);
            }
            AdiSolver2D solver(ic.grid, make_variant(cfg), effective_params(cfg));
            auto res = integrate_2d(solver, ic, cfg.time.horizon, resuming ? resume.dt : cfg.time.dt,
                                    cfg.controller, cfg.time.snapshot_stride, resuming ? &resume : nullptr);
            for (std::size_t k = 0; k < res.snapshots.size(); ++k)
                write_snapshot(cfg.output.dir + "/" + clidetail::snap_name(k), res.snapshots[k]);
            write_snapshot(cfg.output.dir + "/checkpoint.snap", res.final_state, &res.checkpoint);
            write_population_csv(cfg.output.dir + "/population.csv", res.populations);
            report = report_json(res.report);
            report["snapshots"] = res.snapshots.size();
            if (cfg.output.heatmaps) clidetail::write_field_heatmaps(cfg, res.final_state, report);
            log << (res.report.blew_up ? "blew up at t* = " + std::to_string(res.report.t_star)
                                       : "survived to t = " + std::to_string(res.report.horizon))
                << ", sup |r| = " << res.report.terminal_sup_norm << "\n";
        } else {
            throw ConfigError("grid.dim must be 1 or 2");
        }
    } catch (const SolverError& e) {
        report["status"] = "solver-failure";
        report["error"] = e.what();
        write_json(cfg.output.dir + "/report.json", report);
        log << "solver failure: " << e.what() << "\n";
        return 3;
    }
    write_json(cfg.output.dir + "/report.json", report);
    return 0;
}

inline Run1DSpec run1d_spec(const RunConfig& cfg) {
    require(cfg.grid.dim == 1, "this experiment needs grid.dim = 1");
    Run1DSpec spec;
    spec.n = cfg.grid.n;
    spec.lo = cfg.grid.lo;
    spec.hi = cfg.grid.hi;
    spec.family = parse_variant_tag(cfg.model_variant);
    spec.refuge_width = cfg.refuge.width;
    spec.params = effective_params(cfg);
    spec.u0 = cfg.ic.u0;
    spec.v0 = cfg.ic.v0;
    spec.r0 = cfg.ic.r0;
    spec.dt = cfg.time.dt;
    spec.horizon = cfg.time.horizon;
    spec.controller = cfg.controller;
    spec.solver = cfg.solver;
    return spec;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
    write_manifest(cfg);
    Run1DSpec spec = run1d_spec(cfg);
    auto points = refuge_sweep(spec, cfg.experiment.a_values, workers_of(cfg));

    CsvWriter csv(cfg.output.dir + "/sweep.csv",
                  "a,verdict,t_star,terminal_sup_norm,terminal_population,rejections,error");
    bool seen_survival = false;
    for (const auto& pt : points) {
        std::string verdict = pt.failed ? "failed" : pt.report.blew_up ? "blew-up" : "survived";
        csv.row(pt.a, verdict, pt.failed ? std::nan("") : (pt.report.blew_up ? pt.report.t_star : std::nan("")),
                pt.report.terminal_sup_norm, pt.report.terminal_population, pt.report.rejection_count,
                pt.error);
        if (!pt.failed) {
            if (pt.report.blew_up && seen_survival)
                log << "warning: non-monotone survival across the sweep near a = " << pt.a
                    << " (resolution?)\n";
            seen_survival = seen_survival || !pt.report.blew_up;
        }
    }
    log << "sweep: " << points.size() << " points written\n";
    return 0;
}

inline int cmd_critical(const RunConfig& cfg, std::ostream& log) {
    write_manifest(cfg);
    Run1DSpec spec = run1d_spec(cfg);
    double a = critical_refuge_size(spec, cfg.experiment.bracket_lo, cfg.experiment.bracket_hi,
                                    cfg.experiment.tol, workers_of(cfg));
    write_json(cfg.output.dir + "/critical.json",
               {{"critical_a", a},
                {"bracket_lo", cfg.experiment.bracket_lo},
                {"bracket_hi", cfg.experiment.bracket_hi},
                {"tol", cfg.experiment.tol}});
    log << "critical refuge size a = " << std::setprecision(10) << a << "\n";
    return 0;
}

inline int cmd_critical_v0(const RunConfig& cfg, std::ostream& log) {
    write_manifest(cfg);
    Run1DSpec spec = run1d_spec(cfg);
    CriticalCurve curve = critical_vs_initial_v(spec, cfg.experiment.v0_values, cfg.experiment.bracket_lo,
                                                cfg.experiment.bracket_hi, cfg.experiment.tol,
                                                workers_of(cfg));
    CsvWriter csv(cfg.output.dir + "/critical_v0.csv", "v0,critical_a,status,error");
    for (const auto& pt : curve.points)
        csv.row(pt.v0, pt.failed ? std::nan("") : pt.critical_a, pt.failed ? "failed" : "ok", pt.error);
    nlohmann::json j = {{"points", curve.points.size()}};
    if (curve.fit.fitted) {
        j["fit"] = {{"alpha", curve.fit.alpha},
                    {"beta", curve.fit.beta},
                    {"rms_residual", curve.fit.rms_residual},
                    {"curve_range", curve.fit.curve_range}};
        log << "log fit: a ~ " << curve.fit.alpha << " ln(v0) + " << curve.fit.beta
            << " (rms residual " << curve.fit.rms_residual << ")\n";
    }
    write_json(cfg.output.dir + "/critical_v0.json", j);
    return 0;
}

inline int cmd_area(const RunConfig& cfg, std::ostream& log) {
    write_manifest(cfg);
    require(cfg.grid.dim == 2, "cmd_area needs grid.dim = 2");
    Run2DSpec spec;
    spec.nx = cfg.grid.n;
    spec.ny = cfg.grid.m;
    spec.family = parse_variant_tag(cfg.model_variant);
    spec.params = effective_params(cfg);
    {
        RunConfig icfg = cfg;
        if (icfg.ic.kind == "uniform") icfg.ic.kind = "area-cos";
        auto grid = std::make_shared<const FDGrid2D>(spec.nx, spec.ny);
        StateField2D probe = make_ic_2d(icfg, grid);
        // sample the ic once and close over the node values
        auto lookup = [grid](Matrix field) {
            return [grid, field = std::move(field)](double x, double y) {
                int i = static_cast<int>(std::lround((x + 1.0) / grid->hx));
                int j = static_cast<int>(std::lround((y + 1.0) / grid->hy));
                return field(i, j);
            };
        };
        spec.ic_u = lookup(probe.u);
        spec.ic_v = lookup(probe.v);
        spec.ic_r = lookup(probe.r);
    }
    spec.dt = cfg.time.dt;
    spec.horizon = cfg.time.horizon;
    spec.controller = cfg.controller;

    RefugeShape shape;
    if (cfg.experiment.shape == "square")
        shape = RefugeShape::Square;
    else if (cfg.experiment.shape == "circle")
        shape = RefugeShape::Circle;
    else
        throw ConfigError("experiment.shape must be 'square' or 'circle'");

    CriticalArea area = critical_area_2d(spec, shape, cfg.experiment.bracket_lo, cfg.experiment.bracket_hi,
                                         cfg.experiment.tol, workers_of(cfg));
    write_json(cfg.output.dir + "/area.json", {{"shape", cfg.experiment.shape},
                                               {"size", area.size},
                                               {"critical_area", area.critical_area},
                                               {"fraction_of_domain", area.fraction_of_domain}});
    log << "critical " << cfg.experiment.shape << " area = " << std::setprecision(8) << area.critical_area
        << " (" << 100.0 * area.fraction_of_domain << "% of the domain)\n";
    return 0;
}

inline int cmd_stability(const RunConfig& cfg, std::ostream& log) {
    write_manifest(cfg);
    ParameterSet p = effective_params(cfg);
    Equilibrium e = interior_equilibrium(p);
    JacobianMatrix J = jacobian(p, e);
    AzizBound aziz = aziz_bound(p);

    char buf[96];
    std::snprintf(buf, sizeof(buf), "E6 = (%.6f, %.6f, %.6f)", e.u_star, e.v_star, e.r_star);
    log << buf << "\n";
    log << "aziz bound on c: " << aziz.bound << (aziz.satisfied ? " (satisfied)" : " (violated)") << "\n";

    nlohmann::json j = {{"u_star", e.u_star},
                        {"v_star", e.v_star},
                        {"r_star", e.r_star},
                        {"jacobian", {J.a11, J.a12, J.a13, J.a21, J.a22, J.a23, J.a31, J.a32, J.a33}},
                        {"aziz_bound", aziz.bound},
                        {"aziz_satisfied", aziz.satisfied}};
    if (p.w3 / p.c - p.D3 > 0.0 && cfg.ic.v0 > 0.0 && cfg.ic.r0 > 0.0) {
        A2Threshold th = a2_global_threshold(p, cfg.ic.r0, cfg.ic.v0);
        j["a2_threshold"] = th.threshold;
        j["t_star_star"] = th.t_star_star;
        log << "a2 global-existence threshold for (r0=" << cfg.ic.r0 << ", v0=" << cfg.ic.v0
            << "): " << th.threshold << "\n";
    }
    write_json(cfg.output.dir + "/stability.json", j);
    return 0;
}

inline int cmd_dispersion(const RunConfig& cfg, std::ostream& log) {
    write_manifest(cfg);
    ParameterSet p = effective_params(cfg);
    Equilibrium e = interior_equilibrium(p);

    std::vector<DispersionResult> sweep;
    sweep.reserve(cfg.dispersion.k_steps + 1);
    for (int i = 0; i <= cfg.dispersion.k_steps; ++i) {
        double k = cfg.dispersion.k_max * i / cfg.dispersion.k_steps;
        sweep.push_back(dispersion(p, e, cfg.dispersion.d4, k * k));
    }

    CsvWriter csv(cfg.output.dir + "/dispersion.csv",
                  "k_squared,A0,A1,A2,A1A2_minus_A0,max_real_part,routh_hurwitz,pattern_case");
    for (const auto& d : sweep) {
        std::string row_case;
        if (d.max_real_part > 0.0) {
            double mid = d.a2a1_minus_a0();
            if (d.A0 > 0.0 && mid < 0.0 && d.A1 < 0.0)
                row_case = "spatio-temporal";
            else if (d.A0 < 0.0 && mid > 0.0 && d.A1 > 0.0)
                row_case = "fixed-spatial";
            else
                row_case = "ambiguous";
        }
        csv.row(d.k_squared, d.A0, d.A1, d.A2, d.a2a1_minus_a0(), d.max_real_part,
                routh_hurwitz_stable(d) ? "stable" : "unstable", row_case);
    }

    PatternType cls = classify_pattern(sweep);
    double band_lo = 0.0, band_hi = 0.0;
    for (const auto& d : sweep)
        if (d.k_squared > 0.0 && d.max_real_part > 0.0) {
            if (band_lo == 0.0) band_lo = std::sqrt(d.k_squared);
            band_hi = std::sqrt(d.k_squared);
        }
    write_json(cfg.output.dir + "/dispersion.json",
               {{"classification", pattern_name(cls)},
                {"d4", cfg.dispersion.d4},
                {"unstable_band_k", {band_lo, band_hi}}});
    log << "pattern classification (d4 = " << cfg.dispersion.d4 << "): " << pattern_name(cls) << "\n";
    return 0;
}

inline int cmd_chaos(const RunConfig& cfg, std::ostream& log) {
    write_manifest(cfg);
    require(cfg.grid.dim == 1, "cmd_chaos needs grid.dim = 1");
    ChaosSpec spec;
    spec.n = cfg.grid.n;
    spec.lo = cfg.grid.lo;
    spec.hi = cfg.grid.hi;
    spec.params = effective_params(cfg);
    spec.amp1 = cfg.chaos.amp1;
    spec.amp2 = cfg.chaos.amp2;
    spec.dt = cfg.time.dt;
    spec.horizon = cfg.time.horizon;
    spec.fit_t0 = cfg.chaos.fit_t0;
    spec.fit_t1 = cfg.chaos.fit_t1;
    spec.solver = cfg.solver;

    DivergenceSeries series = chaos_divergence(spec);
    CsvWriter csv(cfg.output.dir + "/chaos.csv", "t,d_l1,d_l2,d_linf");
    for (std::size_t i = 0; i < series.times.size(); ++i)
        csv.row(series.times[i], series.d_l1[i], series.d_l2[i], series.d_linf[i]);
    write_json(cfg.output.dir + "/chaos.json", {{"rate_l2", series.fitted_rate},
                                                {"rate_l1", series.fitted_rate_l1},
                                                {"rate_linf", series.fitted_rate_linf}});
    log << "divergence rates: L2 " << series.fitted_rate << ", L1 " << series.fitted_rate_l1 << ", Linf "
        << series.fitted_rate_linf << "\n";
    return 0;
}

inline int run_command(const RunConfig& cfg, const std::string& resume_path, std::ostream& log) {
    if (cfg.command == "simulate") return cmd_simulate(cfg, resume_path, log);
    if (cfg.command == "sweep") return cmd_sweep(cfg, log);
    if (cfg.command == "critical") return cmd_critical(cfg, log);
    if (cfg.command == "critical-v0") return cmd_critical_v0(cfg, log);
    if (cfg.command == "area") return cmd_area(cfg, log);
    if (cfg.command == "stability") return cmd_stability(cfg, log);
    if (cfg.command == "dispersion") return cmd_dispersion(cfg, log);
    if (cfg.command == "chaos") return cmd_chaos(cfg, log);
    throw ConfigError("unknown command '" + cfg.command + "'");
}

// 0 success, 2 config error, 3 solver failure, 4 bracket/experiment failure.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ExperimentError*>(&e)) return 4;
    if (dynamic_cast<const SolverError*>(&e)) return 3;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const IoError*>(&e)) return 2;
    return 1;
}

}  // namespace ecodamp
