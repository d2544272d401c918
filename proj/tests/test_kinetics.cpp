#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ecodamp/kinetics.hpp"
#include "ecodamp/stability.hpp"
#include "fixtures.hpp"

using namespace ecodamp;
using ecodamp::fixtures::fig2_params;
using ecodamp::fixtures::fig9_params;

TEST_CASE("refuge profiles evaluate within [0,1]") {
    auto tanh_ref = RefugeProfile::tanh_step(2.0, 0.04);
    CHECK(tanh_ref.eval({2.0}) == Catch::Approx(0.5).margin(1e-15));
    // saturation 10 widths past the center
    CHECK(tanh_ref.eval({2.0 + 10 * 0.04}) < 1e-8);
    CHECK(tanh_ref.eval({2.0 - 10 * 0.04}) > 1.0 - 1e-8);

    // monotone nonincreasing in x
    double prev = 2.0;
    for (double x = -1.0; x <= 5.0; x += 0.01) {
        double val = tanh_ref.eval({x});
        CHECK(val <= prev + 1e-15);
        CHECK((val >= 0.0 && val <= 1.0));
        prev = val;
    }

    auto circle = RefugeProfile::circle(0.5);
    CHECK(circle.eval({0.0, 0.0}) == 1.0);
    CHECK(circle.eval({1.0, 0.0}) == 0.0);

    auto square = RefugeProfile::square(0.25);
    CHECK(square.eval({0.0, 0.0}) == 1.0);
    CHECK(square.eval({0.3, 0.0}) == 0.0);

    auto table = RefugeProfile::tabulated({0.0, 1.0, 2.0}, {0.0, 2.0, -1.0});
    CHECK(table.eval({0.5}) == Catch::Approx(1.0));  // clamped midpoint of 0 and 2
    CHECK(table.eval({-5.0}) == 0.0);
    CHECK(table.eval({1.9}) >= 0.0);
}

TEST_CASE("classical r-reaction at the Fig. 2 state") {
    auto p = fig2_params();
    Reaction rx = reaction(ModelVariant::classical(), p, 10.0, 2000.0, 10.0, {0.0});
    // h = 0.055*100 - 1.2*100/2020, hand-checked arithmetic
    CHECK(rx.h == Catch::Approx(5.4405940594059405).epsilon(1e-14));
}

TEST_CASE("classical reactions vanish at the interior equilibrium") {
    auto p = fig9_params();
    Equilibrium e = interior_equilibrium(p);
    Reaction rx = reaction(ModelVariant::classical(), p, e.u_star, e.v_star, e.r_star, {0.0});
    CHECK(std::abs(rx.f) < 1e-10 * std::max(1.0, p.a1 * e.u_star));
    CHECK(std::abs(rx.g) < 1e-10 * std::max(1.0, p.a2 * e.v_star));
    CHECK(std::abs(rx.h) < 1e-10 * std::max(1.0, p.c * e.r_star * e.r_star));
}

TEST_CASE("full refuge removes v from the r^2 coefficient") {
    auto p = fig2_params();
    for (double v : {0.0, 1.0, 50.0, 2000.0}) {
        Reaction rx = reaction_at(VariantTag::RefugeOnly, p, 10.0, v, 7.0, 1.0);
        double coeff = rx.h / (7.0 * 7.0);
        CHECK(coeff == Catch::Approx(p.c - p.w3 / p.D3).epsilon(1e-13));
    }
}

TEST_CASE("refuge sign switch under subcritical parameters") {
    auto p = fig2_params();
    REQUIRE(p.subcritical());
    // wherever b1 = 1 the r^2 coefficient is strictly negative
    Reaction inside = reaction_at(VariantTag::RefugeOnly, p, 5.0, 2000.0, 3.0, 1.0);
    CHECK(inside.h < 0.0);
    // in the open area with plentiful v it is positive
    Reaction open = reaction_at(VariantTag::RefugeOnly, p, 5.0, 2000.0, 3.0, 0.0);
    CHECK(open.h > 0.0);
}

TEST_CASE("variant degenerations") {
    auto p = fig2_params();
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> U(0.0, 50.0);

    SECTION("refuge-only with b1 == 0 reproduces classical pointwise") {
        for (int i = 0; i < 200; ++i) {
            double u = U(rng), v = U(rng), r = U(rng);
            Reaction a = reaction_at(VariantTag::Classical, p, u, v, r, 0.0);
            Reaction b = reaction_at(VariantTag::RefugeOnly, p, u, v, r, 0.0);
            CHECK(a.f == b.f);
            CHECK(a.g == b.g);
            CHECK(a.h == b.h);
        }
    }

    SECTION("role reversal with b1 == 1 drops the r-predation term from g") {
        for (int i = 0; i < 200; ++i) {
            double u = U(rng), v = U(rng), r = U(rng);
            Reaction a = reaction_at(VariantTag::RefugeRoleReversalOvercrowd, p, u, v, r, 1.0);
            double expected_g = -p.a2 * v + p.w1 * u * v / (u + p.D1);
            CHECK(a.g == Catch::Approx(expected_g).margin(1e-12));
        }
    }
}

TEST_CASE("quasi-positivity on the nonnegative orthant") {
    auto p = fig2_params();
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> logu(-3.0, 3.0);
    std::uniform_real_distribution<double> b1dist(0.0, 1.0);

    const VariantTag tags[] = {VariantTag::Classical, VariantTag::RefugeOnly, VariantTag::RefugeOvercrowd,
                               VariantTag::RefugeRoleReversalOvercrowd};
    for (int i = 0; i < 2500; ++i) {
        double v = std::pow(10.0, logu(rng));
        double r = std::pow(10.0, logu(rng));
        double u = std::pow(10.0, logu(rng));
        double b1 = b1dist(rng);
        for (VariantTag tag : tags) {
            CHECK(reaction_at(tag, p, 0.0, v, r, b1).f >= 0.0);
            CHECK(reaction_at(tag, p, u, 0.0, r, b1).g >= 0.0);
            CHECK(reaction_at(tag, p, u, v, 0.0, b1).h == 0.0);
        }
    }
}

TEST_CASE("negative states are rejected") {
    auto p = fig2_params();
    CHECK_THROWS_AS(reaction_at(VariantTag::Classical, p, -1.0, 1.0, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(reaction_at(VariantTag::RefugeOnly, p, 1.0, -1.0, 1.0, 0.5), ConfigError);
}

TEST_CASE("analytic reaction Jacobian matches central differences") {
    auto p = fig2_params();
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> U(0.5, 40.0);
    std::uniform_real_distribution<double> b1dist(0.0, 1.0);
    const VariantTag tags[] = {VariantTag::Classical, VariantTag::RefugeOnly,
                               VariantTag::RefugeRoleReversalOvercrowd};

    for (int trial = 0; trial < 100; ++trial) {
        double u = U(rng), v = U(rng), r = U(rng), b1 = b1dist(rng);
        for (VariantTag tag : tags) {
            ReactionJacobian J = reaction_jacobian(tag, p, u, v, r, b1);
            auto fd = [&](int comp, int wrt) {
                double h = 1e-6 * std::max({u, v, r, 1.0});
                double s[3] = {u, v, r};
                double sp[3] = {u, v, r}, sm[3] = {u, v, r};
                sp[wrt] = s[wrt] + h;
                sm[wrt] = s[wrt] - h;
                Reaction rp = reaction_at(tag, p, sp[0], sp[1], sp[2], b1);
                Reaction rm = reaction_at(tag, p, sm[0], sm[1], sm[2], b1);
                double dp = comp == 0 ? rp.f : comp == 1 ? rp.g : rp.h;
                double dm = comp == 0 ? rm.f : comp == 1 ? rm.g : rm.h;
                return (dp - dm) / (2.0 * h);
            };
            const double entries[9] = {J.fu, J.fv, J.fr, J.gu, J.gv, J.gr, J.hu, J.hv, J.hr};
            for (int comp = 0; comp < 3; ++comp)
                for (int wrt = 0; wrt < 3; ++wrt) {
                    double expected = fd(comp, wrt);
                    double got = entries[comp * 3 + wrt];
                    CHECK(got == Catch::Approx(expected).margin(1e-5).epsilon(1e-5));
                }
        }
    }
}

TEST_CASE("parameter validation") {
    ParameterSet p = fig2_params();
    CHECK_NOTHROW(p.validate());
    CHECK(p.subcritical());

    ParameterSet bad = p;
    bad.D3 = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = p;
    bad.a1 = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    ParameterSet super = p;
    super.c = 0.07;  // above w3/D3 = 0.06
    CHECK_FALSE(super.subcritical());
}
