#include <catch2/catch_amalgamated.hpp>

#include "ecodamp/solver1d.hpp"
#include "ecodamp/stability.hpp"
#include "fixtures.hpp"

using namespace ecodamp;
using ecodamp::fixtures::fig2_params;
using ecodamp::fixtures::fig9_params;

namespace {

const double pi = std::acos(-1.0);

ParameterSet diffusion_only(double d) {
    ParameterSet p;
    p.d1 = p.d2 = p.d3 = d;
    return p;
}

}  // namespace

TEST_CASE("rhs of a constant field reduces to the pointwise reactions") {
    auto grid = std::make_shared<const ChebGrid>(24, 0.0, pi);
    ParameterSet p = fig2_params();
    StateField1D f = StateField1D::constant(grid, 10.0, 2000.0, 10.0);
    Rhs1D rhs = apply_rhs_1d(ModelVariant::classical(), p, f);

    Reaction rx = reaction_at(VariantTag::Classical, p, 10.0, 2000.0, 10.0, 0.0);
    for (int i = 0; i < grid->size(); ++i) {
        CHECK(rhs.du(i) == Catch::Approx(rx.f).margin(1e-8));
        CHECK(rhs.dv(i) == Catch::Approx(rx.g).margin(2e-7));  // D2 * const is O(N^4 eps)
        CHECK(rhs.dr(i) == Catch::Approx(rx.h).margin(1e-8));
    }
}

TEST_CASE("overcrowding flux of r = x is 2 d4 at interior nodes") {
    auto grid = std::make_shared<const ChebGrid>(20, -1.0, 1.0);
    ParameterSet p;  // all reactions zero
    p.d4 = 0.7;
    ModelVariant variant = ModelVariant::refuge_overcrowd(RefugeProfile::zero());
    // d4 (r^2)_xx with r = x: (x^2)'' = 2 at every interior node
    StateField1D f{grid, Vector::Zero(grid->size()), Vector::Zero(grid->size()), grid->nodes(), 0.0};
    Rhs1D rhs = apply_rhs_1d(variant, p, f);
    for (int i = 1; i < grid->size() - 1; ++i)
        CHECK(rhs.dr(i) == Catch::Approx(2.0 * p.d4).margin(1e-8));
}

TEST_CASE("rhs vanishes at the interior equilibrium") {
    ParameterSet p = fig9_params(true);
    Equilibrium e = interior_equilibrium(p);
    auto grid = std::make_shared<const ChebGrid>(16, 0.0, pi);
    StateField1D f = StateField1D::constant(grid, e.u_star, e.v_star, e.r_star);
    Rhs1D rhs = apply_rhs_1d(ModelVariant::classical(), p, f);
    CHECK(rhs.du.lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK(rhs.dv.lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK(rhs.dr.lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("non-finite input is rejected") {
    auto grid = std::make_shared<const ChebGrid>(8, 0.0, 1.0);
    StateField1D f = StateField1D::constant(grid, 1.0, 1.0, 1.0);
    f.u(3) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS(apply_rhs_1d(ModelVariant::classical(), ParameterSet{}, f));
}

TEST_CASE("zero right-hand side is a fixed point of the step") {
    auto grid = std::make_shared<const ChebGrid>(12, 0.0, pi);
    ParameterSet p;  // everything zero, no diffusion
    SpectralSolver1D solver(grid, ModelVariant::classical(), p);
    StateField1D f = StateField1D::constant(grid, 3.0, 1.0, 2.0);
    StateField1D g = solver.step_am2(f, 0.1);
    CHECK((g.u - f.u).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((g.v - f.v).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((g.r - f.r).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(g.time == Catch::Approx(0.1));
}

TEST_CASE("heat-mode decay matches the analytic rate") {
    const double d = 1.0, T = 0.1, dt = 1e-3;
    auto grid = std::make_shared<const ChebGrid>(32, 0.0, pi);
    SpectralSolver1D solver(grid, ModelVariant::classical(), diffusion_only(d));
    auto cosx = [](double x) { return std::cos(x); };
    StateField1D f = StateField1D::sampled(grid, cosx, cosx, cosx);
    // shift to stay in the nonnegative orthant: u = 2 + cos(x) decays to 2
    f.u.array() += 2.0;
    f.v.array() += 2.0;
    f.r.array() += 2.0;

    int steps = static_cast<int>(std::llround(T / dt));
    for (int k = 0; k < steps; ++k) f = solver.step_am2(f, dt);

    double err = 0.0;
    for (int i = 0; i < grid->size(); ++i) {
        double exact = 2.0 + std::exp(-d * T) * std::cos(grid->node(i));
        err = std::max(err, std::abs(f.u(i) - exact));
    }
    CHECK(err / (2.0 + std::exp(-d * T)) < 1e-4);
}

TEST_CASE("scalar Riccati growth tracks the exact solution") {
    // r' = c r^2 with diffusion off; exact r(t) = r0 / (1 - c r0 t)
    ParameterSet p;
    p.c = 0.055;
    auto grid = std::make_shared<const ChebGrid>(8, 0.0, pi);
    SpectralSolver1D solver(grid, ModelVariant::classical(), p);
    StateField1D f = StateField1D::constant(grid, 0.0, 0.0, 10.0);

    const double t_blow = 1.0 / (p.c * 10.0);
    const double T = 0.9 * t_blow;
    const double dt = 1e-3;
    int steps = static_cast<int>(T / dt);
    for (int k = 0; k < steps; ++k) {
        f = solver.step_am2(f, dt);
        double exact = 10.0 / (1.0 - p.c * 10.0 * f.time);
        CHECK(std::abs(f.r(0) - exact) / exact < 0.01);
    }
}

TEST_CASE("spectral convergence on a smooth diffusion problem") {
    const double d = 0.5, T = 0.05, dt = 2e-4;
    auto exact = [&](double x, double t) { return 4.0 + std::exp(-d * t) * std::cos(x) + 0.3 * std::exp(-9.0 * d * t) * std::cos(3.0 * x); };
    std::vector<double> errs;
    for (int N : {8, 16, 24, 32}) {
        auto grid = std::make_shared<const ChebGrid>(N, 0.0, pi);
        SpectralSolver1D solver(grid, ModelVariant::classical(), diffusion_only(d));
        auto ic = [&](double x) { return exact(x, 0.0); };
        StateField1D f = StateField1D::sampled(grid, ic, ic, ic);
        int steps = static_cast<int>(std::llround(T / dt));
        for (int k = 0; k < steps; ++k) f = solver.step_am2(f, dt);
        double err = 0.0;
        for (int i = 0; i < grid->size(); ++i) err = std::max(err, std::abs(f.u(i) - exact(grid->node(i), T)));
        errs.push_back(err);
    }
    // decays faster than any fixed order: halving the resolution gap must
    // beat order 10 between N=8 and N=16, then sit near the roundoff floor
    CHECK(errs[1] < errs[0] / 1024.0);
    CHECK(errs[1] < 1e-7);
    CHECK(errs[2] < 1e-8);
    CHECK(errs[3] < 1e-8);
}

TEST_CASE("mass is conserved under pure diffusion") {
    const double dt = 1e-3;
    auto grid = std::make_shared<const ChebGrid>(32, 0.0, pi);
    SpectralSolver1D solver(grid, ModelVariant::classical(), diffusion_only(0.4));
    auto ic = [](double x) { return 2.0 + std::cos(x); };
    StateField1D f = StateField1D::sampled(grid, ic, ic, ic);
    const double mass0 = grid->integrate(f.u);
    for (int k = 0; k < 1000; ++k) f = solver.step_am2(f, dt);
    const double mass1 = grid->integrate(f.u);
    CHECK(std::abs(mass1 - mass0) / std::abs(mass0) < 1e-6);  // per unit time
}

TEST_CASE("no-flux rows hold on an accepted nonlinear step") {
    auto grid = std::make_shared<const ChebGrid>(48, 0.0, pi);
    ParameterSet p = fig2_params();
    ModelVariant variant = ModelVariant::refuge_only(RefugeProfile::tanh_step(2.0, 0.04));
    SpectralSolver1D solver(grid, variant, p);
    StateField1D f = StateField1D::constant(grid, 10.0, 2000.0, 10.0);
    for (int k = 0; k < 100; ++k) f = solver.step_am2(f, 1e-3);

    const Matrix& D1 = grid->d1();
    const double scale = std::max({1.0, f.u.lpNorm<Eigen::Infinity>(), f.v.lpNorm<Eigen::Infinity>(),
                                   f.r.lpNorm<Eigen::Infinity>()});
    for (const Vector* w : {&f.u, &f.v, &f.r}) {
        CHECK(std::abs(D1.row(0).dot(*w)) <= 1e-9 * scale);
        CHECK(std::abs(D1.row(grid->size() - 1).dot(*w)) <= 1e-9 * scale);
    }
}

TEST_CASE("observed temporal order of the AM2 stepping is at least 1.9") {
    auto grid = std::make_shared<const ChebGrid>(32, 0.0, pi);
    ParameterSet p = fig2_params();
    const double T = 0.5;  // pre-blow-up for the Fig. 2 configuration

    auto run = [&](double dt) {
        SpectralSolver1D solver(grid, ModelVariant::classical(), p);
        StateField1D f = StateField1D::constant(grid, 10.0, 2000.0, 10.0);
        int steps = static_cast<int>(std::llround(T / dt));
        for (int k = 0; k < steps; ++k) f = solver.step_am2(f, dt);
        return f;
    };

    const double h = 1e-3;
    StateField1D f4 = run(4 * h), f2 = run(2 * h), f1 = run(h);
    double e42 = (f4.r - f2.r).lpNorm<Eigen::Infinity>();
    double e21 = (f2.r - f1.r).lpNorm<Eigen::Infinity>();
    double order = std::log2(e42 / e21);
    CHECK(order >= 1.9);
}

TEST_CASE("jacobian-free fallback reproduces the analytic-Jacobian step") {
    auto grid = std::make_shared<const ChebGrid>(16, 0.0, pi);
    ParameterSet p = fig2_params();
    SolverConfig1D fd_cfg;
    fd_cfg.jacobian_free = true;
    SpectralSolver1D solver_an(grid, ModelVariant::classical(), p);
    SpectralSolver1D solver_fd(grid, ModelVariant::classical(), p, fd_cfg);
    StateField1D f = StateField1D::constant(grid, 10.0, 2000.0, 10.0);

    StateField1D a = solver_an.step_am2(f, 1e-3);
    StateField1D b = solver_fd.step_am2(f, 1e-3);
    CHECK((a.r - b.r).lpNorm<Eigen::Infinity>() < 1e-7 * a.r.lpNorm<Eigen::Infinity>());
}

TEST_CASE("Newton divergence is signalled") {
    auto grid = std::make_shared<const ChebGrid>(8, 0.0, pi);
    ParameterSet p = fig2_params();
    SolverConfig1D cfg;
    cfg.newton.max_iter = 0;
    SpectralSolver1D solver(grid, ModelVariant::classical(), p, cfg);
    StateField1D f = StateField1D::constant(grid, 10.0, 2000.0, 10.0);
    CHECK_THROWS_AS(solver.step_am2(f, 1e-2), NewtonDivergence);
}

TEST_CASE("integrate_1d basics") {
    auto grid = std::make_shared<const ChebGrid>(16, 0.0, pi);
    ParameterSet p = fig2_params();
    SpectralSolver1D solver(grid, ModelVariant::classical(), p);

    SECTION("zero initial data stays zero") {
        StateField1D zero = StateField1D::constant(grid, 0.0, 0.0, 0.0);
        auto res = integrate_1d(solver, zero, 0.5, 1e-2);
        CHECK_FALSE(res.report.blew_up);
        CHECK(res.report.terminal_sup_norm == 0.0);
        CHECK(res.final_state.u.lpNorm<Eigen::Infinity>() == 0.0);
    }

    SECTION("zero-horizon run emits only the initial snapshot") {
        StateField1D f = StateField1D::constant(grid, 1.0, 2.0, 3.0);
        auto res = integrate_1d(solver, f, 0.0, 1e-2, {}, 5);
        CHECK(res.snapshots.size() == 1);
        CHECK_FALSE(res.report.blew_up);
    }

    SECTION("snapshot stride and population trace") {
        StateField1D f = StateField1D::constant(grid, 1.0, 10.0, 0.5);
        auto res = integrate_1d(solver, f, 0.05, 1e-2, {}, 2);
        CHECK(res.snapshots.size() >= 3);
        CHECK(res.populations.t.size() >= 5);
        // uniform field: population = value * |domain|
        CHECK(res.populations.u.front() == Catch::Approx(1.0 * pi).epsilon(1e-12));
    }
}
