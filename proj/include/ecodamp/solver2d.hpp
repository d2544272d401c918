#pragma once

// 2-D solver on (-1,1)^2: second-order central differences with ghost-point
// Neumann closure, advanced by Peaceman-Rachford splitting. Each step is the
// pair of half-sweeps
//
//   (I - (dt/2) A) w~ = (I + (dt/2) B) w  + (dt/2) f(t_k)
//   (I - (dt/2) B) w+ = (I + (dt/2) A) w~ + (dt/2) f(t_{k+1})
//
// with A/B the per-species x/y diffusion operators, solved line by line with
// the Thomas algorithm. f(t_{k+1}) is evaluated on the intermediate field
// (first-order predictor lag), which keeps the step second order overall.
// Only the Classical and RefugeOnly variants are supported here.

#include <functional>
#include <memory>
#include <vector>

#include "ecodamp/integrate.hpp"
#include "ecodamp/kinetics.hpp"
#include "ecodamp/tridiagonal.hpp"

namespace ecodamp {

struct FDGrid2D {
    int nx, ny;
    double hx, hy;

    FDGrid2D(int nx_, int ny_) : nx(nx_), ny(ny_) {
        require(nx >= 3 && ny >= 3, "FDGrid2D: need at least 3 nodes per axis");
        hx = 2.0 / (nx - 1);
        hy = 2.0 / (ny - 1);
    }

    double x(int i) const { return -1.0 + i * hx; }
    double y(int j) const { return -1.0 + j * hy; }

    // Trapezoidal quadrature weights along one axis.
    static Vector trapezoid_weights(int n, double h) {
        Vector w = Vector::Constant(n, h);
        w(0) = w(n - 1) = 0.5 * h;
        return w;
    }
};

struct StateField2D {
    std::shared_ptr<const FDGrid2D> grid;
    Matrix u, v, r;  // nx rows (x index) by ny cols (y index)
    double time = 0.0;

    void validate() const {
        require(grid != nullptr, "StateField2D: missing grid");
        require(u.rows() == grid->nx && u.cols() == grid->ny && v.rows() == grid->nx && v.cols() == grid->ny &&
                    r.rows() == grid->nx && r.cols() == grid->ny,
                "StateField2D: array shapes must match the grid");
        if (!(all_finite(u) && all_finite(v) && all_finite(r) && std::isfinite(time)))
            throw ConfigError("StateField2D: non-finite entries");
    }

    template <typename Fu, typename Fv, typename Fr>
    static StateField2D sampled(std::shared_ptr<const FDGrid2D> grid, Fu fu, Fv fv, Fr fr) {
        StateField2D s{grid, Matrix(grid->nx, grid->ny), Matrix(grid->nx, grid->ny), Matrix(grid->nx, grid->ny),
                       0.0};
        for (int i = 0; i < grid->nx; ++i)
            for (int j = 0; j < grid->ny; ++j) {
                double x = grid->x(i), y = grid->y(j);
                s.u(i, j) = fu(x, y);
                s.v(i, j) = fv(x, y);
                s.r(i, j) = fr(x, y);
            }
        return s;
    }

    static StateField2D constant(std::shared_ptr<const FDGrid2D> grid, double u0, double v0, double r0) {
        return {grid, Matrix::Constant(grid->nx, grid->ny, u0), Matrix::Constant(grid->nx, grid->ny, v0),
                Matrix::Constant(grid->nx, grid->ny, r0), 0.0};
    }

    double sup_norm_r() const { return r.cwiseAbs().maxCoeff(); }
};

class AdiSolver2D {
public:
    // Optional forcing(species, x, y, t) is added to the reaction of the
    // given species; used by manufactured-solution tests.
    using Forcing = std::function<double(int, double, double, double)>;

    AdiSolver2D(std::shared_ptr<const FDGrid2D> grid, ModelVariant variant, ParameterSet params,
                Forcing forcing = nullptr)
        : grid_(std::move(grid)), variant_(std::move(variant)), params_(params), forcing_(std::move(forcing)) {
        params_.validate();
        require(variant_.tag == VariantTag::Classical || variant_.tag == VariantTag::RefugeOnly,
                "AdiSolver2D: only the Classical and RefugeOnly variants are solved in 2-D");
        b1_ = Matrix(grid_->nx, grid_->ny);
        for (int i = 0; i < grid_->nx; ++i)
            for (int j = 0; j < grid_->ny; ++j) b1_(i, j) = variant_.refuge.eval({grid_->x(i), grid_->y(j)});
        wx_ = FDGrid2D::trapezoid_weights(grid_->nx, grid_->hx);
        wy_ = FDGrid2D::trapezoid_weights(grid_->ny, grid_->hy);
        lap_x_ = {neumann_laplacian(grid_->nx, grid_->hx, params_.d1),
                  neumann_laplacian(grid_->nx, grid_->hx, params_.d2),
                  neumann_laplacian(grid_->nx, grid_->hx, params_.d3)};
        lap_y_ = {neumann_laplacian(grid_->ny, grid_->hy, params_.d1),
                  neumann_laplacian(grid_->ny, grid_->hy, params_.d2),
                  neumann_laplacian(grid_->ny, grid_->hy, params_.d3)};
    }

    const FDGrid2D& grid() const { return *grid_; }
    std::shared_ptr<const FDGrid2D> grid_ptr() const { return grid_; }
    const ModelVariant& variant() const { return variant_; }
    const ParameterSet& params() const { return params_; }
    const Matrix& refuge_values() const { return b1_; }
    long clamp_count() const { return clamp_count_; }
    void restore_clamp_count(long n) { clamp_count_ = n; }

    double integrate(const Matrix& field) const { return wx_.dot(field * wy_); }

    StateField2D step_peaceman_rachford(const StateField2D& field, double dt) {
        require(dt > 0.0 && std::isfinite(dt), "step_peaceman_rachford: dt must be positive");
        field.validate();
        ensure_factorization(dt);

        const Matrix* W[3] = {&field.u, &field.v, &field.r};
        Matrix f[3], half[3], out[3];
        reactions(field.u, field.v, field.r, field.time, f);

        for (int s = 0; s < 3; ++s) {
            // x implicit, y explicit, reaction at t_k
            Matrix R1 = *W[s] + 0.5 * dt * (apply_y(lap_y_[s], *W[s]) + f[s]);
            half[s] = R1;
            for (int j = 0; j < grid_->ny; ++j) fac_x_[s].solve_in_place(half[s].col(j));
        }
        if (!(all_finite(half[0]) && all_finite(half[1]) && all_finite(half[2])))
            throw SolverError("step_peaceman_rachford: non-finite intermediate field");

        reactions(half[0], half[1], half[2], field.time + dt, f);
        for (int s = 0; s < 3; ++s) {
            // y implicit, x explicit, reaction at t_{k+1} on the intermediate
            Matrix R2 = (half[s] + 0.5 * dt * (apply_x(lap_x_[s], half[s]) + f[s])).transpose();
            for (int i = 0; i < grid_->nx; ++i) fac_y_[s].solve_in_place(R2.col(i));
            out[s] = R2.transpose();
        }
        if (!(all_finite(out[0]) && all_finite(out[1]) && all_finite(out[2])))
            throw SolverError("step_peaceman_rachford: non-finite field after step");

        return {grid_, std::move(out[0]), std::move(out[1]), std::move(out[2]), field.time + dt};
    }

private:
    // tri applied along the x index (each column independently)
    static Matrix apply_x(const Tridiagonal& t, const Matrix& W) {
        const int n = t.size();
        Matrix Y = W.array().colwise() * t.diag.array();
        Y.topRows(n - 1).array() += W.bottomRows(n - 1).array().colwise() * t.super.array();
        Y.bottomRows(n - 1).array() += W.topRows(n - 1).array().colwise() * t.sub.array();
        return Y;
    }

    // tri applied along the y index (each row independently)
    static Matrix apply_y(const Tridiagonal& t, const Matrix& W) {
        const int n = t.size();
        Matrix Y = W * t.diag.asDiagonal();
        Y.leftCols(n - 1) += W.rightCols(n - 1) * t.super.asDiagonal();
        Y.rightCols(n - 1) += W.leftCols(n - 1) * t.sub.asDiagonal();
        return Y;
    }

    void reactions(const Matrix& u, const Matrix& v, const Matrix& r, double t, Matrix f[3]) {
        clamp_count_ += (u.array() < 0.0).count() + (v.array() < 0.0).count() + (r.array() < 0.0).count();
        for (int s = 0; s < 3; ++s) f[s].resize(grid_->nx, grid_->ny);
        for (int j = 0; j < grid_->ny; ++j)
            for (int i = 0; i < grid_->nx; ++i) {
                Reaction rx = reaction_at(variant_.tag, params_, std::max(u(i, j), 0.0), std::max(v(i, j), 0.0),
                                          std::max(r(i, j), 0.0), b1_(i, j));
                f[0](i, j) = rx.f;
                f[1](i, j) = rx.g;
                f[2](i, j) = rx.h;
            }
        if (forcing_)
            for (int s = 0; s < 3; ++s)
                for (int j = 0; j < grid_->ny; ++j)
                    for (int i = 0; i < grid_->nx; ++i) f[s](i, j) += forcing_(s, grid_->x(i), grid_->y(j), t);
    }

    void ensure_factorization(double dt) {
        if (dt == factored_dt_) return;
        fac_x_.clear();
        fac_y_.clear();
        for (int s = 0; s < 3; ++s) {
            fac_x_.emplace_back(shifted_identity_minus(lap_x_[s], 0.5 * dt));
            fac_y_.emplace_back(shifted_identity_minus(lap_y_[s], 0.5 * dt));
        }
        factored_dt_ = dt;
    }

    std::shared_ptr<const FDGrid2D> grid_;
    ModelVariant variant_;
    ParameterSet params_;
    Forcing forcing_;
    Matrix b1_;
    Vector wx_, wy_;
    std::vector<Tridiagonal> lap_x_, lap_y_;
    std::vector<ThomasSolver> fac_x_, fac_y_;
    double factored_dt_ = -1.0;
    long clamp_count_ = 0;
};

using IntegrateResult2D = IntegrateResult<StateField2D>;

inline IntegrateResult2D integrate_2d(AdiSolver2D& solver, const StateField2D& ic, double horizon, double dt,
                                      const ControllerConfig& controller = {}, int snapshot_stride = 0,
                                      const ResumeState* resume = nullptr) {
    if (resume) solver.restore_clamp_count(resume->clamps);
    auto result = integrate_driver<StateField2D>(
        ic, horizon, dt, controller, snapshot_stride,
        [&](const StateField2D& s, double h) { return solver.step_peaceman_rachford(s, h); },
        [](const StateField2D& s) { return s.sup_norm_r(); },
        [&](const StateField2D& s) {
            return SpeciesIntegrals{solver.integrate(s.u), solver.integrate(s.v), solver.integrate(s.r)};
        },
        resume);
    result.report.clamp_count = solver.clamp_count();
    result.checkpoint.clamps = solver.clamp_count();
    return result;
}

}  // namespace ecodamp
