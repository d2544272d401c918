#pragma once

// 1-D Chebyshev spectral-collocation solver. Time stepping is the implicit
// second-order Adams-Moulton (trapezoidal) rule; the nonlinear system per
// step is solved by Newton-Raphson with an analytic Jacobian, and each
// linear correction by restarted GMRES, left-preconditioned by the LU of
// I - (dt/2) * (diffusion part).
//
// No-flux boundaries are imposed by boundary bordering: for every species
// with a diffusive term, the boundary rows of the implicit system are
// replaced by the constraint rows (d1 w)|_{ends} = 0.

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "ecodamp/blowup.hpp"
#include "ecodamp/chebyshev.hpp"
#include "ecodamp/gmres.hpp"
#include "ecodamp/integrate.hpp"
#include "ecodamp/kinetics.hpp"

namespace ecodamp {

struct StateField1D {
    std::shared_ptr<const ChebGrid> grid;
    Vector u, v, r;
    double time = 0.0;

    int size() const { return grid ? grid->size() : 0; }

    void validate() const {
        require(grid != nullptr, "StateField1D: missing grid");
        const int m = grid->size();
        require(u.size() == m && v.size() == m && r.size() == m, "StateField1D: array sizes must match the grid");
        if (!(all_finite(u) && all_finite(v) && all_finite(r) && std::isfinite(time)))
            throw ConfigError("StateField1D: non-finite entries");
    }

    static StateField1D constant(std::shared_ptr<const ChebGrid> grid, double u0, double v0, double r0) {
        const int m = grid->size();
        return {grid, Vector::Constant(m, u0), Vector::Constant(m, v0), Vector::Constant(m, r0), 0.0};
    }

    template <typename Fu, typename Fv, typename Fr>
    static StateField1D sampled(std::shared_ptr<const ChebGrid> grid, Fu fu, Fv fv, Fr fr) {
        const int m = grid->size();
        StateField1D s{grid, Vector(m), Vector(m), Vector(m), 0.0};
        for (int i = 0; i < m; ++i) {
            double x = grid->node(i);
            s.u(i) = fu(x);
            s.v(i) = fv(x);
            s.r(i) = fr(x);
        }
        return s;
    }

    double sup_norm_r() const { return r.lpNorm<Eigen::Infinity>(); }
};

struct NewtonConfig {
    double tol = 1e-9;   // max-norm residual, relative to max(1, ||W||_inf)
    int max_iter = 25;
};

struct SolverConfig1D {
    NewtonConfig newton;
    GmresConfig gmres;            // restart 30, rel tol 1e-10, 10 restarts
    bool precondition = true;
    bool jacobian_free = false;   // finite-difference matvec fallback
};

class SpectralSolver1D {
public:
    SpectralSolver1D(std::shared_ptr<const ChebGrid> grid, ModelVariant variant, ParameterSet params,
                     SolverConfig1D cfg = {})
        : grid_(std::move(grid)), variant_(std::move(variant)), params_(params), cfg_(cfg), m_(grid_->size()) {
        params_.validate();
        b1_ = Vector(m_);
        for (int i = 0; i < m_; ++i) b1_(i) = variant_.refuge.eval({grid_->node(i)});
        overcrowd_ = variant_.has_overcrowding() && params_.d4 > 0.0;
        constrained_[0] = params_.d1 > 0.0;
        constrained_[1] = params_.d2 > 0.0;
        constrained_[2] = params_.d3 > 0.0 || overcrowd_;
    }

    const ChebGrid& grid() const { return *grid_; }
    std::shared_ptr<const ChebGrid> grid_ptr() const { return grid_; }
    const ModelVariant& variant() const { return variant_; }
    const ParameterSet& params() const { return params_; }
    const Vector& refuge_values() const { return b1_; }
    long clamp_count() const { return clamp_count_; }
    void restore_clamp_count(long n) { clamp_count_ = n; }
    int last_newton_iterations() const { return last_newton_iters_; }
    double last_newton_residual() const { return last_newton_residual_; }

    // Full semi-discrete right-hand side: diffusion + reactions + (for the
    // overcrowding variants) the d4 (r^2)_xx flux. Boundary rows carry the
    // plain collocation values; the no-flux closure lives in the stepper.
    void rhs(const Vector& u, const Vector& v, const Vector& r, Vector& du, Vector& dv, Vector& dr) {
        if (!(all_finite(u) && all_finite(v) && all_finite(r)))
            throw SolverError("apply_rhs_1d: non-finite state");
        clamp_count_ += (u.array() < 0.0).count() + (v.array() < 0.0).count() + (r.array() < 0.0).count();
        Vector ucl = u.cwiseMax(0.0), vcl = v.cwiseMax(0.0), rcl = r.cwiseMax(0.0);
        du.resize(m_);
        dv.resize(m_);
        dr.resize(m_);
        for (int i = 0; i < m_; ++i) {
            Reaction rx = reaction_at(variant_.tag, params_, ucl(i), vcl(i), rcl(i), b1_(i));
            du(i) = rx.f;
            dv(i) = rx.g;
            dr(i) = rx.h;
        }
        const Matrix& D2 = grid_->d2();
        if (params_.d1 > 0.0) du.noalias() += params_.d1 * (D2 * u);
        if (params_.d2 > 0.0) dv.noalias() += params_.d2 * (D2 * v);
        if (params_.d3 > 0.0) dr.noalias() += params_.d3 * (D2 * r);
        // the flux keeps the raw sign of r; squaring needs no clamp
        if (overcrowd_) dr.noalias() += params_.d4 * (D2 * r.cwiseProduct(r));
    }

    // One implicit AM2 step: solves W+ = W + (dt/2)(RHS(W) + RHS(W+)).
    // Throws NewtonDivergence / LinearSolveStall to signal step rejection.
    StateField1D step_am2(const StateField1D& field, double dt) {
        require(dt > 0.0 && std::isfinite(dt), "step_am2: dt must be positive");
        field.validate();

        Vector W = pack(field);
        Vector F0 = packed_rhs(W);
        Vector Wp = W;

        if (cfg_.precondition) ensure_preconditioner(dt, W.segment(2 * m_, m_));

        Vector R(3 * m_), F1(3 * m_);
        for (int iter = 0; iter <= cfg_.newton.max_iter; ++iter) {
            F1 = packed_rhs(Wp);
            residual(Wp, W, F0, F1, dt, R);
            if (!all_finite(R)) throw NewtonDivergence("step_am2: non-finite Newton residual");
            const double res = R.lpNorm<Eigen::Infinity>();
            const double scale = std::max(1.0, Wp.lpNorm<Eigen::Infinity>());
            last_newton_iters_ = iter;
            last_newton_residual_ = res;
            if (res <= cfg_.newton.tol * scale) {
                StateField1D out{grid_, Wp.segment(0, m_), Wp.segment(m_, m_), Wp.segment(2 * m_, m_),
                                 field.time + dt};
                return out;
            }
            if (iter == cfg_.newton.max_iter) break;

            Vector delta = Vector::Zero(3 * m_);
            GmresStats st = solve_linear(Wp, W, F0, dt, R, delta);
            if (!st.converged)
                throw LinearSolveStall("step_am2: GMRES failed to converge within the restart budget");
            Wp += delta;
            if (!all_finite(Wp)) throw NewtonDivergence("step_am2: Newton iterate became non-finite");
        }
        throw NewtonDivergence("step_am2: Newton failed to reach tolerance");
    }

private:
    Vector pack(const StateField1D& f) const {
        Vector W(3 * m_);
        W << f.u, f.v, f.r;
        return W;
    }

    Vector packed_rhs(const Vector& W) {
        Vector du, dv, dr;
        rhs(W.segment(0, m_), W.segment(m_, m_), W.segment(2 * m_, m_), du, dv, dr);
        Vector F(3 * m_);
        F << du, dv, dr;
        return F;
    }

    void residual(const Vector& Wp, const Vector& W, const Vector& F0, const Vector& F1, double dt,
                  Vector& R) const {
        R = Wp - W - 0.5 * dt * (F0 + F1);
        const Matrix& D1 = grid_->d1();
        for (int s = 0; s < 3; ++s) {
            if (!constrained_[s]) continue;
            auto seg = Wp.segment(s * m_, m_);
            R(s * m_) = D1.row(0).dot(seg);
            R(s * m_ + m_ - 1) = D1.row(m_ - 1).dot(seg);
        }
    }

    struct JacobianData {
        Vector fu, fv, fr, gu, gv, gr, hu, hv, hr;
        Vector r_raw;  // overcrowding block uses the unclamped field
    };

    JacobianData jacobian_data(const Vector& Wp) const {
        JacobianData jd;
        for (Vector* p : {&jd.fu, &jd.fv, &jd.fr, &jd.gu, &jd.gv, &jd.gr, &jd.hu, &jd.hv, &jd.hr})
            p->resize(m_);
        auto u = Wp.segment(0, m_), v = Wp.segment(m_, m_), r = Wp.segment(2 * m_, m_);
        jd.r_raw = r;
        Vector rcl = r.cwiseMax(0.0);
        for (int i = 0; i < m_; ++i) {
            const double mu = u(i) >= 0.0 ? 1.0 : 0.0;
            const double mv = v(i) >= 0.0 ? 1.0 : 0.0;
            const double mr = r(i) >= 0.0 ? 1.0 : 0.0;
            ReactionJacobian J = reaction_jacobian(variant_.tag, params_, std::max(u(i), 0.0),
                                                   std::max(v(i), 0.0), rcl(i), b1_(i));
            jd.fu(i) = J.fu * mu;
            jd.fv(i) = J.fv * mv;
            jd.fr(i) = J.fr * mr;
            jd.gu(i) = J.gu * mu;
            jd.gv(i) = J.gv * mv;
            jd.gr(i) = J.gr * mr;
            jd.hu(i) = J.hu * mu;
            jd.hv(i) = J.hv * mv;
            jd.hr(i) = J.hr * mr;
        }
        return jd;
    }

    // y = (I - (dt/2) J_rhs) x with constraint rows overriding the boundary
    // entries of every diffused species.
    Vector apply_jacobian(const JacobianData& jd, double dt, const Vector& x) const {
        const Matrix& D2 = grid_->d2();
        const Matrix& D1 = grid_->d1();
        auto xu = x.segment(0, m_), xv = x.segment(m_, m_), xr = x.segment(2 * m_, m_);
        Vector y(3 * m_);

        Vector tu = jd.fu.cwiseProduct(xu) + jd.fv.cwiseProduct(xv) + jd.fr.cwiseProduct(xr);
        if (params_.d1 > 0.0) tu.noalias() += params_.d1 * (D2 * xu);
        y.segment(0, m_) = xu - 0.5 * dt * tu;

        Vector tv = jd.gu.cwiseProduct(xu) + jd.gv.cwiseProduct(xv) + jd.gr.cwiseProduct(xr);
        if (params_.d2 > 0.0) tv.noalias() += params_.d2 * (D2 * xv);
        y.segment(m_, m_) = xv - 0.5 * dt * tv;

        Vector tr = jd.hu.cwiseProduct(xu) + jd.hv.cwiseProduct(xv) + jd.hr.cwiseProduct(xr);
        if (params_.d3 > 0.0) tr.noalias() += params_.d3 * (D2 * xr);
        if (overcrowd_) tr.noalias() += 2.0 * params_.d4 * (D2 * jd.r_raw.cwiseProduct(xr));
        y.segment(2 * m_, m_) = xr - 0.5 * dt * tr;

        for (int s = 0; s < 3; ++s) {
            if (!constrained_[s]) continue;
            auto seg = x.segment(s * m_, m_);
            y(s * m_) = D1.row(0).dot(seg);
            y(s * m_ + m_ - 1) = D1.row(m_ - 1).dot(seg);
        }
        return y;
    }

    void ensure_preconditioner(double dt, const Vector& r_hat) {
        if (!overcrowd_ && precond_dt_ == dt) return;
        const Matrix& D2 = grid_->d2();
        const Matrix& D1 = grid_->d1();
        const double ds[3] = {params_.d1, params_.d2, params_.d3};
        for (int s = 0; s < 3; ++s) {
            Matrix M = Matrix::Identity(m_, m_);
            if (ds[s] > 0.0) M.noalias() -= (0.5 * dt * ds[s]) * D2;
            if (s == 2 && overcrowd_) M.noalias() -= (dt * params_.d4) * (D2 * r_hat.asDiagonal());
            if (constrained_[s]) {
                M.row(0) = D1.row(0);
                M.row(m_ - 1) = D1.row(m_ - 1);
            }
            lu_[s].emplace(M);
        }
        precond_dt_ = dt;
    }

    GmresStats solve_linear(const Vector& Wp, const Vector& W, const Vector& F0, double dt, const Vector& R,
                            Vector& delta) {
        Vector b = -R;
        auto precond = [this](const Vector& x) -> Vector {
            if (!cfg_.precondition) return x;
            Vector y(3 * m_);
            for (int s = 0; s < 3; ++s) y.segment(s * m_, m_) = lu_[s]->solve(x.segment(s * m_, m_));
            return y;
        };
        if (cfg_.jacobian_free) {
            Vector F1(3 * m_), Rp(3 * m_), Fp(3 * m_);
            const double base = 1.0 + Wp.lpNorm<Eigen::Infinity>();
            auto matvec = [&](const Vector& x) -> Vector {
                const double xn = x.lpNorm<Eigen::Infinity>();
                if (xn == 0.0) return Vector::Zero(3 * m_);
                const double eps = std::sqrt(2.2e-16) * base / xn;
                Vector Wx = Wp + eps * x;
                Fp = packed_rhs_const(Wx);
                residual(Wx, W, F0, Fp, dt, Rp);
                return (Rp - R) / eps;
            };
            return gmres_solve(matvec, precond, b, delta, cfg_.gmres);
        }
        JacobianData jd = jacobian_data(Wp);
        auto matvec = [&](const Vector& x) { return apply_jacobian(jd, dt, x); };
        return gmres_solve(matvec, precond, b, delta, cfg_.gmres);
    }

    // rhs without touching the clamp counter (finite-difference probes).
    Vector packed_rhs_const(const Vector& W) {
        long saved = clamp_count_;
        Vector F = packed_rhs(W);
        clamp_count_ = saved;
        return F;
    }

    std::shared_ptr<const ChebGrid> grid_;
    ModelVariant variant_;
    ParameterSet params_;
    SolverConfig1D cfg_;
    int m_;
    Vector b1_;
    bool overcrowd_ = false;
    bool constrained_[3] = {false, false, false};
    long clamp_count_ = 0;
    int last_newton_iters_ = 0;
    double last_newton_residual_ = 0.0;
    std::optional<Eigen::PartialPivLU<Matrix>> lu_[3];
    double precond_dt_ = -1.0;
};

struct Rhs1D {
    Vector du, dv, dr;
};

inline Rhs1D apply_rhs_1d(const ModelVariant& variant, const ParameterSet& params, const StateField1D& field) {
    field.validate();
    SpectralSolver1D solver(field.grid, variant, params);
    Rhs1D out;
    solver.rhs(field.u, field.v, field.r, out.du, out.dv, out.dr);
    return out;
}

using IntegrateResult1D = IntegrateResult<StateField1D>;

// Advance until the horizon is reached or blow-up is declared. Snapshots are
// recorded every snapshot_stride accepted steps (0 keeps only the endpoints).
inline IntegrateResult1D integrate_1d(SpectralSolver1D& solver, const StateField1D& ic, double horizon,
                                      double dt, const ControllerConfig& controller = {},
                                      int snapshot_stride = 0, const ResumeState* resume = nullptr) {
    if (resume) solver.restore_clamp_count(resume->clamps);
    auto result = integrate_driver<StateField1D>(
        ic, horizon, dt, controller, snapshot_stride,
        [&](const StateField1D& s, double h) { return solver.step_am2(s, h); },
        [](const StateField1D& s) { return s.sup_norm_r(); },
        [&](const StateField1D& s) {
            const ChebGrid& g = solver.grid();
            return SpeciesIntegrals{g.integrate(s.u), g.integrate(s.v), g.integrate(s.r)};
        },
        resume);
    result.report.clamp_count = solver.clamp_count();
    result.checkpoint.clamps = solver.clamp_count();
    return result;
}

}  // namespace ecodamp
