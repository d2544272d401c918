#pragma once

// Shared time-integration driver: advances a stepper under the adaptive
// step controller, watches for blow-up, and records snapshots plus the
// per-step population trace. Used by both the 1-D spectral and the 2-D
// ADI solvers.

#include <vector>

#include "ecodamp/blowup.hpp"

namespace ecodamp {

struct PopulationTrace {
    std::vector<double> t, u, v, r;
};

struct SpeciesIntegrals {
    double u = 0.0, v = 0.0, r = 0.0;
};

// Controller and detector state carried across a checkpoint so a resumed
// run reproduces the uninterrupted one bit for bit.
struct ResumeState {
    double dt = 0.0;
    int streak = 0;
    long rejections = 0;
    long accepted = 0;
    long clamps = 0;
    std::vector<std::pair<double, double>> detector_window;
};

template <typename State>
struct IntegrateResult {
    BlowupReport report;
    std::vector<State> snapshots;
    PopulationTrace populations;
    State final_state;
    ResumeState checkpoint;  // controller state at the end of the run
};

template <typename State, typename StepFn, typename SupFn, typename PopFn>
IntegrateResult<State> integrate_driver(const State& ic, double horizon, double dt0,
                                        const ControllerConfig& cc, int snapshot_stride, StepFn step,
                                        SupFn sup_r, PopFn populations, const ResumeState* resume = nullptr) {
    require(std::isfinite(horizon) && horizon >= ic.time, "integrate: horizon must not precede the initial time");
    require(dt0 > 0.0, "integrate: dt must be positive");

    StepController ctrl(dt0, cc);
    BlowupDetector det(cc.threshold);
    long accepted = 0;

    if (resume) {
        ctrl.restore(resume->dt, resume->streak, resume->rejections);
        accepted = resume->accepted;
        det.restore(resume->detector_window);
    } else {
        det.push(ic.time, sup_r(ic));
    }

    IntegrateResult<State> out;
    out.snapshots.push_back(ic);
    {
        SpeciesIntegrals p = populations(ic);
        out.populations.t.push_back(ic.time);
        out.populations.u.push_back(p.u);
        out.populations.v.push_back(p.v);
        out.populations.r.push_back(p.r);
    }

    State cur = ic;
    bool blew_up = false;
    double t_star = 0.0;

    while (true) {
        const double remaining = horizon - cur.time;
        if (remaining <= 1e-12 * std::max(1.0, std::abs(horizon))) break;
        const double dt_eff = std::min(ctrl.dt(), remaining);

        bool ok = true;
        State next;
        try {
            next = step(cur, dt_eff);
        } catch (const SolverError&) {
            ok = false;
        }
        double sup = 0.0;
        if (ok) {
            sup = sup_r(next);
            const double prev = sup_r(cur);
            if (!std::isfinite(sup) || sup > cc.growth_factor * std::max(prev, 1.0)) ok = false;
        }
        if (!ok) {
            if (!ctrl.reject()) {
                if (det.norm_growing()) {
                    blew_up = true;
                    t_star = std::min(det.extrapolate_t_star(), horizon);
                    break;
                }
                throw SolverError("integrate: step size collapsed below dt_min without norm growth");
            }
            continue;
        }

        cur = next;
        ++accepted;
        ctrl.accept();
        det.push(cur.time, sup);

        SpeciesIntegrals p = populations(cur);
        out.populations.t.push_back(cur.time);
        out.populations.u.push_back(p.u);
        out.populations.v.push_back(p.v);
        out.populations.r.push_back(p.r);
        if (snapshot_stride > 0 && accepted % snapshot_stride == 0) out.snapshots.push_back(cur);

        if (det.threshold_crossed()) {
            blew_up = true;
            t_star = std::min(det.extrapolate_t_star(), horizon);
            break;
        }
    }

    if (out.snapshots.back().time != cur.time) out.snapshots.push_back(cur);
    out.final_state = cur;

    out.report.blew_up = blew_up;
    out.report.t_star = t_star;
    out.report.horizon = horizon;
    out.report.terminal_sup_norm = sup_r(cur);
    out.report.terminal_population = populations(cur).r;
    out.report.rejection_count = ctrl.rejections();

    out.checkpoint.dt = ctrl.dt();
    out.checkpoint.streak = ctrl.streak();
    out.checkpoint.rejections = ctrl.rejections();
    out.checkpoint.accepted = accepted;
    out.checkpoint.detector_window.assign(det.window().begin(), det.window().end());
    return out;
}

}  // namespace ecodamp
