#include <catch2/catch_amalgamated.hpp>

#include "ecodamp/experiments.hpp"
#include "fixtures.hpp"

using namespace ecodamp;
using ecodamp::fixtures::chaos_params;
using ecodamp::fixtures::fig2_params;

namespace {
const double pi = std::acos(-1.0);
}

TEST_CASE("stream-form blow-up detection") {
    SECTION("a decaying series survives") {
        std::vector<double> t, s;
        for (int k = 0; k <= 100; ++k) {
            t.push_back(0.01 * k);
            s.push_back(10.0 * std::exp(-0.1 * k));
        }
        BlowupReport rep = detect_blowup(t, s, 1e6, 1.0);
        CHECK_FALSE(rep.blew_up);
        CHECK(rep.terminal_sup_norm < 10.0);
    }

    SECTION("a Riccati series reports the exact blow-up time within 2%") {
        const double c = 0.055, r0 = 10.0, t_exact = 1.0 / (c * r0);
        std::vector<double> t, s;
        double dt = 1e-3;
        for (double tk = 0.0; tk < t_exact; tk += dt) {
            double rk = r0 / (1.0 - c * r0 * tk);
            t.push_back(tk);
            s.push_back(rk);
            if (rk >= 1e6) break;
        }
        BlowupReport rep = detect_blowup(t, s, 1e6, 3.0);
        REQUIRE(rep.blew_up);
        CHECK(std::abs(rep.t_star - t_exact) / t_exact < 0.02);
        CHECK(rep.t_star <= 3.0);
    }
}

TEST_CASE("integrated ODE blow-up matches the Riccati time") {
    // spatially constant classical run with only c active
    Run1DSpec spec;
    spec.n = 8;
    spec.family = VariantTag::Classical;
    spec.params = ParameterSet{};
    spec.params.c = 0.055;
    spec.u0 = 0.0;
    spec.v0 = 0.0;
    spec.r0 = 10.0;
    spec.dt = 1e-3;
    spec.horizon = 3.0;
    BlowupReport rep = run_refuge_point(spec, 1.0);
    REQUIRE(rep.blew_up);
    const double t_exact = 1.0 / (0.055 * 10.0);
    CHECK(std::abs(rep.t_star - t_exact) / t_exact < 0.02);
    CHECK(rep.terminal_sup_norm >= 1e6);
}

TEST_CASE("bisection on a synthetic transition") {
    int calls = 0;
    auto blows = [&](double a) {
        ++calls;
        return a < 2.7;
    };

    SECTION("tol 0.5 needs at most two refinement evaluations") {
        double a = bisect_transition(2.0, 3.1, 0.5, blows);
        CHECK(calls <= 4);  // two bracket checks + at most two refinements
        CHECK(a == Catch::Approx(2.6875));
    }

    SECTION("tight tolerance converges to the transition") {
        double a = bisect_transition(2.0, 3.1, 1e-6, blows);
        CHECK(a == Catch::Approx(2.7).margin(1e-5));
    }

    SECTION("invalid brackets are rejected") {
        CHECK_THROWS_AS(bisect_transition(2.8, 3.1, 0.1, blows), BracketInvalid);  // lo survives
        CHECK_THROWS_AS(bisect_transition(2.0, 2.5, 0.1, blows), BracketInvalid);  // hi blows
    }
}

TEST_CASE("log fit recovers a synthetic logarithmic curve") {
    std::vector<double> v0, a;
    for (double v : {200.0, 500.0, 1000.0, 2000.0, 5000.0}) {
        v0.push_back(v);
        a.push_back(0.31 * std::log(v) + 0.4);
    }
    LogFit fit = fit_log_curve(v0, a);
    REQUIRE(fit.fitted);
    CHECK(fit.alpha == Catch::Approx(0.31).margin(1e-12));
    CHECK(fit.beta == Catch::Approx(0.4).margin(1e-10));
    CHECK(fit.rms_residual < 1e-12);

    LogFit single = fit_log_curve({100.0}, {1.0});
    CHECK_FALSE(single.fitted);
}

TEST_CASE("population series") {
    SECTION("unit field on the square integrates to 4") {
        auto grid = std::make_shared<const FDGrid2D>(50, 50);
        AdiSolver2D solver(grid, ModelVariant::classical(), ParameterSet{});
        std::vector<StateField2D> snaps = {StateField2D::constant(grid, 1.0, 1.0, 1.0)};
        PopulationTrace tr = population_series(solver, snaps);
        CHECK(tr.r[0] == Catch::Approx(4.0).epsilon(1e-12));
    }

    SECTION("pure diffusion keeps the 1-D population constant to 1e-8") {
        auto grid = std::make_shared<const ChebGrid>(32, 0.0, pi);
        ParameterSet p;
        p.d1 = p.d2 = p.d3 = 0.3;
        SpectralSolver1D solver(grid, ModelVariant::classical(), p);
        auto ic = [](double x) { return 2.0 + std::cos(2.0 * x); };
        StateField1D f = StateField1D::sampled(grid, ic, ic, ic);
        auto res = integrate_1d(solver, f, 1.0, 1e-3, {}, 100);
        PopulationTrace tr = population_series(*grid, res.snapshots);
        for (double m : tr.r) CHECK(m == Catch::Approx(tr.r.front()).epsilon(1e-8));
    }
}

TEST_CASE("shape areas") {
    CHECK(shape_area(RefugeShape::Square, 0.5) == Catch::Approx(1.0));
    CHECK(shape_area(RefugeShape::Circle, 0.5) == Catch::Approx(0.5 * pi));
}

TEST_CASE("twin runs with identical amplitudes never diverge") {
    ChaosSpec spec;
    spec.n = 32;
    spec.params = chaos_params();
    spec.amp1 = spec.amp2 = 0.1;
    spec.dt = 1e-2;
    spec.horizon = 2.0;
    spec.fit_t1 = 2.0;
    DivergenceSeries series = chaos_divergence(spec);
    for (double d : series.d_l2) CHECK(d == 0.0);
    for (double d : series.d_linf) CHECK(d == 0.0);
    CHECK(series.fitted_rate == 0.0);
}

TEST_CASE("sweep results are deterministic across worker counts") {
    Run1DSpec spec;
    spec.n = 32;
    spec.family = VariantTag::RefugeOnly;
    spec.params = fig2_params();
    spec.dt = 2e-3;
    spec.horizon = 0.5;  // short smoke horizon; all points blow up later than this
    std::vector<double> grid_a = {1.0, 2.0, 2.9};

    auto one = refuge_sweep(spec, grid_a, 1);
    auto two = refuge_sweep(spec, grid_a, 2);
    REQUIRE(one.size() == two.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].report.blew_up == two[i].report.blew_up);
        CHECK(one[i].report.terminal_sup_norm == two[i].report.terminal_sup_norm);
        CHECK(one[i].report.t_star == two[i].report.t_star);
    }
}

TEST_CASE("overcrowding alone does not prevent blow-up") {
    // d4 > 0 with b1 == 0 on the Fig. 2 data still blows up
    Run1DSpec spec;
    spec.n = 64;
    spec.family = VariantTag::RefugeOvercrowd;
    spec.params = fig2_params();
    spec.params.d4 = 0.5 * std::abs(spec.params.c - spec.params.w3 / spec.params.D3);
    spec.dt = 1e-3;
    spec.horizon = 6.0;
    // a far left of the domain: b1 ~ 0 everywhere that matters
    BlowupReport rep = run_refuge_point(spec, -1.0);
    CHECK(rep.blew_up);
}
