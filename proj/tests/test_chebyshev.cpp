#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include "ecodamp/chebyshev.hpp"

using namespace ecodamp;

TEST_CASE("node layout on the reference interval") {
    ChebGrid g2(2, -1.0, 1.0);
    CHECK(g2.node(0) == Catch::Approx(1.0).margin(1e-15));
    CHECK(g2.node(1) == Catch::Approx(0.0).margin(1e-15));
    CHECK(g2.node(2) == Catch::Approx(-1.0).margin(1e-15));

    ChebGrid g4(4, -1.0, 1.0);
    const double s = std::sqrt(2.0) / 2.0;
    CHECK(g4.node(0) == Catch::Approx(1.0).margin(1e-15));
    CHECK(g4.node(1) == Catch::Approx(s).margin(1e-15));
    CHECK(g4.node(2) == Catch::Approx(0.0).margin(1e-15));
    CHECK(g4.node(3) == Catch::Approx(-s).margin(1e-15));
    CHECK(g4.node(4) == Catch::Approx(-1.0).margin(1e-15));

    for (int j = 1; j < g4.size(); ++j) CHECK(g4.node(j) < g4.node(j - 1));

    CHECK_THROWS_AS(ChebGrid(1, -1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(ChebGrid(4, 1.0, -1.0), ConfigError);
}

TEST_CASE("differentiation matrices are exact on low-degree polynomials") {
    ChebGrid g(16, -1.0, 1.0);
    const int m = g.size();
    Vector ones = Vector::Ones(m), x = g.nodes();
    Vector x2 = x.cwiseProduct(x), x3 = x2.cwiseProduct(x);

    Vector d2_one = g.d2() * ones;
    Vector d2_x = g.d2() * x;
    Vector d2_x2 = g.d2() * x2;
    Vector d2_x3 = g.d2() * x3;
    Vector d1_x3 = g.d1() * x3;

    for (int i = 1; i < m - 1; ++i) {
        CHECK(std::abs(d2_one(i)) < 1e-10);
        CHECK(std::abs(d2_x(i)) < 1e-10);
        CHECK(d2_x2(i) == Catch::Approx(2.0).epsilon(1e-10));
        CHECK(d2_x3(i) == Catch::Approx(6.0 * x(i)).margin(1e-8));
        CHECK(d1_x3(i) == Catch::Approx(3.0 * x2(i)).margin(1e-8));
    }
}

TEST_CASE("affine map rescales derivatives and weights") {
    const double pi = std::acos(-1.0);
    ChebGrid g(32, 0.0, pi);
    CHECK(g.node(0) == Catch::Approx(pi));
    CHECK(g.node(g.size() - 1) == Catch::Approx(0.0).margin(1e-15));

    // d^2/dx^2 sin(x) = -sin(x)
    Vector s(g.size()), d2s_exact(g.size());
    for (int i = 0; i < g.size(); ++i) {
        s(i) = std::sin(g.node(i));
        d2s_exact(i) = -std::sin(g.node(i));
    }
    Vector d2s = g.d2() * s;
    for (int i = 1; i < g.size() - 1; ++i) CHECK(d2s(i) == Catch::Approx(d2s_exact(i)).margin(1e-9));

    // quadrature: weights sum to the interval length, sin integrates to 2
    CHECK(g.quadrature_weights().sum() == Catch::Approx(pi).epsilon(1e-13));
    CHECK(g.integrate(s) == Catch::Approx(2.0).epsilon(1e-12));

    ChebGrid ref(12, -1.0, 1.0);
    Vector x2 = ref.nodes().cwiseProduct(ref.nodes());
    CHECK(ref.integrate(x2) == Catch::Approx(2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("Neumann-closed second derivative has real nonpositive spectrum growing like N^4") {
    double prev_max = 0.0;
    int idx = 0;
    double maxabs[2] = {0.0, 0.0};
    for (int N : {16, 32}) {
        ChebGrid g(N, -1.0, 1.0);
        Matrix A = g.neumann_closed_d2();
        Eigen::EigenSolver<Matrix> es(A);
        double max_re = -1e300, max_im = 0.0, max_mag = 0.0;
        for (int i = 0; i < A.rows(); ++i) {
            max_re = std::max(max_re, es.eigenvalues()(i).real());
            max_im = std::max(max_im, std::abs(es.eigenvalues()(i).imag()));
            max_mag = std::max(max_mag, std::abs(es.eigenvalues()(i)));
        }
        // real (up to roundoff of the dense eigensolver) and nonpositive
        CHECK(max_im < 1e-7 * max_mag);
        CHECK(max_re < 1e-7 * max_mag);
        maxabs[idx++] = max_mag;
        prev_max = max_mag;
    }
    (void)prev_max;
    // doubling N multiplies the extreme eigenvalue by roughly 2^4
    double growth = maxabs[1] / maxabs[0];
    CHECK(growth > 8.0);
    CHECK(growth < 40.0);
}
