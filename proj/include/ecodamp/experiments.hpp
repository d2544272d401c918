#pragma once

// The experiment suite: refuge sweeps, critical-size bisections, 2-D
// critical areas, population traces, and twin-run chaos diagnostics.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ecodamp/pool.hpp"
#include "ecodamp/solver1d.hpp"
#include "ecodamp/solver2d.hpp"

namespace ecodamp {

// ---------------------------------------------------------------------------
// 1-D refuge experiments

// A complete 1-D run definition minus the refuge size: uniform initial data
// on a Chebyshev grid, tanh-step refuge of the given width centered at the
// sweep parameter a.
struct Run1DSpec {
    int n = 128;
    double lo = 0.0;
    double hi = std::acos(-1.0);
    VariantTag family = VariantTag::RefugeOnly;
    double refuge_width = 0.04;
    ParameterSet params;
    double u0 = 10.0, v0 = 2000.0, r0 = 10.0;
    double dt = 1e-3;
    double horizon = 10.0;
    ControllerConfig controller;
    SolverConfig1D solver;
};

inline ModelVariant make_family_variant(VariantTag family, RefugeProfile profile) {
    switch (family) {
        case VariantTag::Classical: return ModelVariant::classical();
        case VariantTag::RefugeOnly: return ModelVariant::refuge_only(std::move(profile));
        case VariantTag::RefugeOvercrowd: return ModelVariant::refuge_overcrowd(std::move(profile));
        case VariantTag::RefugeRoleReversalOvercrowd:
            return ModelVariant::refuge_role_reversal_overcrowd(std::move(profile));
    }
    return ModelVariant::classical();
}

// One blow-up run at refuge size a. The grid is rebuilt per call so that
// sweep points stay independent across workers.
inline BlowupReport run_refuge_point(const Run1DSpec& spec, double a) {
    auto grid = std::make_shared<const ChebGrid>(spec.n, spec.lo, spec.hi);
    ModelVariant variant = make_family_variant(spec.family, RefugeProfile::tanh_step(a, spec.refuge_width));
    SpectralSolver1D solver(grid, std::move(variant), spec.params, spec.solver);
    StateField1D ic = StateField1D::constant(grid, spec.u0, spec.v0, spec.r0);
    return integrate_1d(solver, ic, spec.horizon, spec.dt, spec.controller).report;
}

struct SweepPoint {
    double a = 0.0;
    BlowupReport report;
    bool failed = false;       // solver failure; the sweep continues
    std::string error;
};

inline std::vector<SweepPoint> refuge_sweep(const Run1DSpec& spec, const std::vector<double>& a_grid,
                                            int workers = 1) {
    std::vector<SweepPoint> out(a_grid.size());
    parallel_for(static_cast<int>(a_grid.size()), workers, [&](int i) {
        out[i].a = a_grid[i];
        try {
            out[i].report = run_refuge_point(spec, a_grid[i]);
        } catch (const Error& e) {
            out[i].failed = true;
            out[i].error = e.what();
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Bisection on a monotone blow-up/survival transition

// blows(size) must be true at lo and false at hi; the bracket is verified
// first. Returns the midpoint of the final bracket of width <= tol.
template <typename VerdictFn>
double bisect_transition(double lo, double hi, double tol, VerdictFn blows, int workers = 1) {
    require(lo < hi, "bisect_transition: need lo < hi");
    require(tol > 0.0, "bisect_transition: tol must be positive");

    bool lo_blows = true, hi_blows = false;
    parallel_for(2, workers, [&](int i) {
        if (i == 0)
            lo_blows = blows(lo);
        else
            hi_blows = blows(hi);
    });
    if (!lo_blows || hi_blows)
        throw BracketInvalid("bisect_transition: endpoints do not straddle the blow-up/survival transition");

    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (blows(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double critical_refuge_size(const Run1DSpec& spec, double a_lo, double a_hi, double tol,
                                   int workers = 1) {
    return bisect_transition(
        a_lo, a_hi, tol, [&](double a) { return run_refuge_point(spec, a).blew_up; }, workers);
}

// ---------------------------------------------------------------------------
// Critical refuge size versus the initial middle-predator level

struct LogFit {
    double alpha = 0.0;     // a_crit ~ alpha ln(v0) + beta
    double beta = 0.0;
    double rms_residual = 0.0;
    double curve_range = 0.0;
    bool fitted = false;
};

struct CriticalCurvePoint {
    double v0 = 0.0;
    double critical_a = 0.0;
    bool failed = false;
    std::string error;
};

struct CriticalCurve {
    std::vector<CriticalCurvePoint> points;
    LogFit fit;
};

inline LogFit fit_log_curve(const std::vector<double>& v0, const std::vector<double>& a_crit) {
    LogFit fit;
    const std::size_t n = v0.size();
    if (n < 2) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = std::log(v0[i]);
        sx += x;
        sy += a_crit[i];
        sxx += x * x;
        sxy += x * a_crit[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return fit;
    fit.alpha = (n * sxy - sx * sy) / denom;
    fit.beta = (sy - fit.alpha * sx) / n;
    double ss = 0, amin = a_crit[0], amax = a_crit[0];
    for (std::size_t i = 0; i < n; ++i) {
        double resid = a_crit[i] - (fit.alpha * std::log(v0[i]) + fit.beta);
        ss += resid * resid;
        amin = std::min(amin, a_crit[i]);
        amax = std::max(amax, a_crit[i]);
    }
    fit.rms_residual = std::sqrt(ss / n);
    fit.curve_range = amax - amin;
    fit.fitted = true;
    return fit;
}

inline CriticalCurve critical_vs_initial_v(const Run1DSpec& base, const std::vector<double>& v0_grid,
                                           double a_lo, double a_hi, double tol, int workers = 1) {
    CriticalCurve curve;
    curve.points.resize(v0_grid.size());
    parallel_for(static_cast<int>(v0_grid.size()), workers, [&](int i) {
        CriticalCurvePoint& pt = curve.points[i];
        pt.v0 = v0_grid[i];
        Run1DSpec spec = base;
        spec.v0 = v0_grid[i];
        try {
            pt.critical_a = critical_refuge_size(spec, a_lo, a_hi, tol);
        } catch (const Error& e) {
            pt.failed = true;
            pt.error = e.what();
        }
    });
    std::vector<double> xs, ys;
    for (const auto& pt : curve.points)
        if (!pt.failed) {
            xs.push_back(pt.v0);
            ys.push_back(pt.critical_a);
        }
    curve.fit = fit_log_curve(xs, ys);
    return curve;
}

// ---------------------------------------------------------------------------
// 2-D critical areas

enum class RefugeShape { Square, Circle };

// Run definition for the 2-D experiments; the initial fields are sampled
// from callables so the presets stay data-driven.
struct Run2DSpec {
    int nx = 50, ny = 50;
    VariantTag family = VariantTag::RefugeOnly;
    ParameterSet params;
    std::function<double(double, double)> ic_u, ic_v, ic_r;
    double dt = 1e-3;
    double horizon = 6.0;
    ControllerConfig controller;
};

inline RefugeProfile make_shape_profile(RefugeShape shape, double size) {
    return shape == RefugeShape::Square ? RefugeProfile::square(size) : RefugeProfile::circle(size);
}

// Refuge area from the shape's size parameter: (2 halfwidth)^2 for the
// square, pi * threshold for the circle (threshold bounds x^2 + y^2).
inline double shape_area(RefugeShape shape, double size) {
    return shape == RefugeShape::Square ? 4.0 * size * size : std::acos(-1.0) * size;
}

inline BlowupReport run_area_point(const Run2DSpec& spec, RefugeShape shape, double size) {
    auto grid = std::make_shared<const FDGrid2D>(spec.nx, spec.ny);
    ModelVariant variant = size > 0.0
                               ? make_family_variant(spec.family, make_shape_profile(shape, size))
                               : ModelVariant::classical();
    AdiSolver2D solver(grid, std::move(variant), spec.params);
    StateField2D ic = StateField2D::sampled(grid, spec.ic_u, spec.ic_v, spec.ic_r);
    return integrate_2d(solver, ic, spec.horizon, spec.dt, spec.controller).report;
}

struct CriticalArea {
    double size = 0.0;                // halfwidth or squared-radius threshold
    double critical_area = 0.0;
    double fraction_of_domain = 0.0;  // of the 2x2 square
};

inline CriticalArea critical_area_2d(const Run2DSpec& spec, RefugeShape shape, double size_lo, double size_hi,
                                     double tol, int workers = 1) {
    double size = bisect_transition(
        size_lo, size_hi, tol, [&](double s) { return run_area_point(spec, shape, s).blew_up; }, workers);
    CriticalArea out;
    out.size = size;
    out.critical_area = shape_area(shape, size);
    out.fraction_of_domain = out.critical_area / 4.0;
    return out;
}

// ---------------------------------------------------------------------------
// Twin-run chaos diagnostics

struct ChaosSpec {
    int n = 128;
    double lo = 0.0;
    double hi = std::acos(-1.0);
    ParameterSet params;
    double u_star = 25.0, v_star = 13.0, r_star = 9.0;  // chaotic base state
    double amp1 = 0.10, amp2 = 0.11;                    // cos^2 perturbation amplitudes
    double dt = 1e-2;
    double horizon = 1000.0;
    double fit_t0 = 0.0, fit_t1 = 1000.0;
    SolverConfig1D solver;
};

struct DivergenceSeries {
    std::vector<double> times;
    std::vector<double> d_l1, d_l2, d_linf;
    double fitted_rate = 0.0;       // least-squares slope of ln d_l2 over the window
    double fitted_rate_l1 = 0.0;
    double fitted_rate_linf = 0.0;
};

namespace detail {
inline double fit_log_slope(const std::vector<double>& t, const std::vector<double>& d, double t0, double t1) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 || t[i] > t1 || d[i] <= 0.0) continue;
        double y = std::log(d[i]);
        sx += t[i];
        sy += y;
        sxx += t[i] * t[i];
        sxy += t[i] * y;
        ++n;
    }
    if (n < 2) return 0.0;
    const double denom = n * sxx - sx * sx;
    return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}
}  // namespace detail

// Two runs from base + amp cos^2(x) perturbations on identical grids and
// fixed steps; d(t) is the r-difference in the three norms per step.
inline DivergenceSeries chaos_divergence(const ChaosSpec& spec) {
    require(std::isfinite(spec.amp1) && std::isfinite(spec.amp2), "chaos_divergence: amplitudes must be finite");
    require(spec.dt > 0.0 && spec.horizon > 0.0, "chaos_divergence: dt and horizon must be positive");
    auto grid = std::make_shared<const ChebGrid>(spec.n, spec.lo, spec.hi);
    auto perturbed = [&](double amp) {
        return StateField1D::sampled(
            grid, [&](double x) { return spec.u_star + amp * sq(std::cos(x)); },
            [&](double x) { return spec.v_star + amp * sq(std::cos(x)); },
            [&](double x) { return spec.r_star + amp * sq(std::cos(x)); });
    };
    SpectralSolver1D solver_a(grid, ModelVariant::classical(), spec.params, spec.solver);
    SpectralSolver1D solver_b(grid, ModelVariant::classical(), spec.params, spec.solver);
    StateField1D a = perturbed(spec.amp1);
    StateField1D b = perturbed(spec.amp2);

    const long steps = static_cast<long>(std::llround(spec.horizon / spec.dt));
    DivergenceSeries out;
    out.times.reserve(steps + 1);
    out.d_l1.reserve(steps + 1);
    out.d_l2.reserve(steps + 1);
    out.d_linf.reserve(steps + 1);

    auto record = [&]() {
        Vector diff = a.r - b.r;
        Vector absd = diff.cwiseAbs();
        out.times.push_back(a.time);
        out.d_l1.push_back(grid->integrate(absd));
        out.d_l2.push_back(std::sqrt(grid->integrate(diff.cwiseProduct(diff))));
        out.d_linf.push_back(absd.maxCoeff());
    };
    record();

    for (long k = 0; k < steps; ++k) {
        try {
            a = solver_a.step_am2(a, spec.dt);
            b = solver_b.step_am2(b, spec.dt);
        } catch (const SolverError& e) {
            throw SolverError(std::string("chaos_divergence: twin run failed at t=") +
                              std::to_string(a.time) + ": " + e.what());
        }
        if (a.sup_norm_r() > 1e6 || b.sup_norm_r() > 1e6)
            throw SolverError("chaos_divergence: a twin run blew up; chaos fit is undefined");
        record();
    }

    out.fitted_rate = detail::fit_log_slope(out.times, out.d_l2, spec.fit_t0, spec.fit_t1);
    out.fitted_rate_l1 = detail::fit_log_slope(out.times, out.d_l1, spec.fit_t0, spec.fit_t1);
    out.fitted_rate_linf = detail::fit_log_slope(out.times, out.d_linf, spec.fit_t0, spec.fit_t1);
    return out;
}

// ---------------------------------------------------------------------------
// Population series from stored snapshots

template <typename State, typename IntegrateFn>
PopulationTrace population_series(const std::vector<State>& snapshots, IntegrateFn integrate3) {
    PopulationTrace out;
    for (const State& s : snapshots) {
        SpeciesIntegrals p = integrate3(s);
        out.t.push_back(s.time);
        out.u.push_back(p.u);
        out.v.push_back(p.v);
        out.r.push_back(p.r);
    }
    return out;
}

inline PopulationTrace population_series(const ChebGrid& grid, const std::vector<StateField1D>& snapshots) {
    return population_series(snapshots, [&](const StateField1D& s) {
        return SpeciesIntegrals{grid.integrate(s.u), grid.integrate(s.v), grid.integrate(s.r)};
    });
}

inline PopulationTrace population_series(const AdiSolver2D& solver, const std::vector<StateField2D>& snapshots) {
    return population_series(snapshots, [&](const StateField2D& s) {
        return SpeciesIntegrals{solver.integrate(s.u), solver.integrate(s.v), solver.integrate(s.r)};
    });
}

}  // namespace ecodamp
