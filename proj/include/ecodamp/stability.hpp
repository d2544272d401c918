#pragma once

// Linear stability machinery around the interior equilibrium E6: closed-form
// equilibrium, Jacobian entries, dispersion-relation coefficients for the
// cubic P(lambda) = A3 l^3 + A2 l^2 + A1 l + A0, Routh-Hurwitz and pattern
// classification, plus the closed-form global-existence/blow-up predicates.

#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ecodamp/chebyshev.hpp"
#include "ecodamp/kinetics.hpp"

namespace ecodamp {

struct Equilibrium {
    double u_star = 0.0, v_star = 0.0, r_star = 0.0;
};

// E6 = (u*, v*, r*): v* = w3/c - D3 closes h = 0 for r != 0; u* and r* follow
// from the f = 0 and g = 0 branches.
inline Equilibrium interior_equilibrium(const ParameterSet& p) {
    p.validate();
    if (p.c <= 0.0) throw NoPositiveEquilibrium("interior_equilibrium: c must be positive");
    const double v_star = p.w3 / p.c - p.D3;
    if (!(v_star > 0.0))
        throw NoPositiveEquilibrium("interior_equilibrium: w3/c - D3 <= 0 (no positive v*)");
    if (p.b2 <= 0.0) throw NoPositiveEquilibrium("interior_equilibrium: b2 must be positive");
    const double half = (p.a1 - p.b2 * p.D0) / (2.0 * p.b2);
    const double disc = half * half - (p.w0 * v_star - p.a1 * p.D0) / p.b2;
    if (!(disc >= 0.0))
        throw NoPositiveEquilibrium("interior_equilibrium: negative discriminant (no real u*)");
    const double u_star = half + std::sqrt(disc);
    if (!(u_star > 0.0)) throw NoPositiveEquilibrium("interior_equilibrium: u* is not positive");
    if (p.w2 <= 0.0) throw NoPositiveEquilibrium("interior_equilibrium: w2 must be positive");
    const double r_star = (v_star + p.D2) / p.w2 * (p.w1 * u_star / (u_star + p.D1) - p.a2);
    if (!(r_star >= 0.0)) throw NoPositiveEquilibrium("interior_equilibrium: r* is negative");
    return {u_star, v_star, r_star};
}

struct JacobianMatrix {
    double a11 = 0, a12 = 0, a13 = 0;
    double a21 = 0, a22 = 0, a23 = 0;
    double a31 = 0, a32 = 0, a33 = 0;

    Eigen::Matrix3d as_matrix() const {
        Eigen::Matrix3d m;
        m << a11, a12, a13, a21, a22, a23, a31, a32, a33;
        return m;
    }
};

inline JacobianMatrix jacobian(const ParameterSet& p, const Equilibrium& e) {
    JacobianMatrix J;
    J.a11 = e.u_star * (-p.b2 + p.w0 * e.v_star / sq(e.u_star + p.D0));
    J.a12 = -e.u_star * p.w0 / (e.u_star + p.D0);
    J.a21 = e.v_star * p.D1 * p.w1 / sq(e.u_star + p.D1);
    J.a22 = e.v_star * p.w2 * e.r_star / sq(e.v_star + p.D2);
    J.a23 = -e.v_star * p.w2 / (e.v_star + p.D2);
    J.a32 = sq(e.r_star) * p.w3 / sq(e.v_star + p.D3);
    return J;
}

// Largest real part among the roots of l^3 + A2 l^2 + A1 l + A0, computed
// from the companion-matrix eigenvalues (robust near repeated roots).
inline double cubic_max_real_part(double A2, double A1, double A0) {
    Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
    C(1, 0) = 1.0;
    C(2, 1) = 1.0;
    C(0, 2) = -A0;
    C(1, 2) = -A1;
    C(2, 2) = -A2;
    Eigen::EigenSolver<Eigen::Matrix3d> es(C, false);
    return es.eigenvalues().real().maxCoeff();
}

struct DispersionResult {
    double k_squared = 0.0;
    double A3 = 1.0, A2 = 0.0, A1 = 0.0, A0 = 0.0;
    double max_real_part = 0.0;

    double a2a1_minus_a0() const { return A2 * A1 - A0; }
};

// Coefficients of |J - lambda I - k^2 D| = 0 with the overcrowding-augmented
// diffusion entry d3 + 2 d4 r* in the r slot.
inline DispersionResult dispersion(const ParameterSet& p, const Equilibrium& e, double d4, double k_squared) {
    const JacobianMatrix J = jacobian(p, e);
    const double k2 = k_squared;
    const double dr = p.d3 + 2.0 * d4 * e.r_star;

    DispersionResult out;
    out.k_squared = k2;
    out.A3 = 1.0;
    out.A2 = (p.d1 + p.d2 + dr) * k2 - J.a11 - J.a22 - J.a33;
    out.A1 = J.a22 * J.a33 - J.a22 * dr * k2 - J.a23 * J.a32 - J.a12 * J.a21 - p.d2 * J.a33 * k2 +
             p.d2 * dr * k2 * k2 +
             (p.d1 * k2 - J.a11) * (p.d2 * k2 + dr * k2 - J.a22 - J.a33);
    out.A0 = (p.d1 * k2 - J.a11) *
                 (J.a22 * J.a33 - J.a22 * dr * k2 - J.a23 * J.a32 - J.a33 * p.d2 * k2 + p.d2 * dr * k2 * k2) -
             J.a12 * J.a21 * dr * k2 + J.a12 * J.a21 * J.a33;
    out.max_real_part = cubic_max_real_part(out.A2, out.A1, out.A0);
    return out;
}

// Routh-Hurwitz for a monic cubic: all coefficients positive and A1 A2 > A0.
inline bool routh_hurwitz_stable(double A3, double A2, double A1, double A0) {
    require(A3 == 1.0, "routh_hurwitz_stable: expects a monic cubic (A3 = 1)");
    return A2 > 0.0 && A1 > 0.0 && A0 > 0.0 && A1 * A2 > A0;
}

inline bool routh_hurwitz_stable(const DispersionResult& d) {
    return routh_hurwitz_stable(d.A3, d.A2, d.A1, d.A0);
}

enum class PatternType { None, SpatioTemporal, FixedSpatial };

inline const char* pattern_name(PatternType t) {
    switch (t) {
        case PatternType::None: return "none";
        case PatternType::SpatioTemporal: return "spatio-temporal";
        case PatternType::FixedSpatial: return "fixed-spatial";
    }
    return "none";
}

// Turing classification of a dispersion sweep: requires a stable k = 0 and
// an unstable k > 0; the sign triple (A0, A2 A1 - A0, A1) at the most
// unstable wavenumber selects the pattern type.
inline PatternType classify_pattern(const std::vector<DispersionResult>& sweep) {
    const DispersionResult* at_zero = nullptr;
    for (const auto& d : sweep)
        if (d.k_squared == 0.0) at_zero = &d;
    require(at_zero != nullptr, "classify_pattern: sweep must include k = 0");

    if (at_zero->max_real_part > 0.0) return PatternType::None;

    const DispersionResult* peak = nullptr;
    for (const auto& d : sweep) {
        if (d.k_squared <= 0.0 || d.max_real_part <= 0.0) continue;
        if (!peak || d.max_real_part > peak->max_real_part) peak = &d;
    }
    if (!peak) return PatternType::None;

    const double mid = peak->a2a1_minus_a0();
    if (peak->A0 > 0.0 && mid < 0.0 && peak->A1 < 0.0) return PatternType::SpatioTemporal;
    if (peak->A0 < 0.0 && mid > 0.0 && peak->A1 > 0.0) return PatternType::FixedSpatial;
    throw AmbiguousSigns("classify_pattern: sign triple (A0=" + std::to_string(peak->A0) +
                         ", A2A1-A0=" + std::to_string(mid) + ", A1=" + std::to_string(peak->A1) +
                         ") at k^2=" + std::to_string(peak->k_squared) + " matches neither pattern case");
}

struct AzizBound {
    double bound = 0.0;
    bool satisfied = false;  // c < bound
};

// Uniform-boundedness bound on c for the spatially independent model.
inline AzizBound aziz_bound(const ParameterSet& p) {
    p.validate();
    require(p.a2 > 0.0 && p.D3 > 0.0, "aziz_bound: a2 and D3 must be positive");
    const double denom = p.w1 * (p.a1 + sq(p.a1) / (4.0 * p.a2)) + p.w0 * p.b2 * p.D3;
    require(denom > 0.0, "aziz_bound: degenerate parameters");
    const double bound = (p.w0 * p.b2 * p.D3 / denom) * (p.w3 / p.D3);
    return {bound, p.c < bound};
}

struct A2Threshold {
    double threshold = 0.0;    // a2 at or above this gives global existence
    double t_star = 0.0;       // time for v to fall below w3/c - D3 (inf if a2 <= w1)
    double t_star_star = 0.0;  // blow-up time of r' = c r^2
};

// Global-existence threshold on a2 for given initial data bounds. The log
// term is clamped at zero when v0 already sits below w3/c - D3.
inline A2Threshold a2_global_threshold(const ParameterSet& p, double r0_max, double v0_max) {
    require(p.c > 0.0, "a2_global_threshold: c must be positive");
    const double v_bar = p.w3 / p.c - p.D3;
    require(v_bar > 0.0, "a2_global_threshold: requires w3/c - D3 > 0");
    require(r0_max > 0.0 && v0_max > 0.0, "a2_global_threshold: data bounds must be positive");

    const double log_term = std::max(0.0, std::log(v0_max / v_bar));
    A2Threshold out;
    out.threshold = p.w1 + p.c * r0_max * log_term;
    out.t_star = (p.a2 > p.w1) ? log_term / (p.a2 - p.w1) : std::numeric_limits<double>::infinity();
    out.t_star_star = 1.0 / (p.c * r0_max);
    return out;
}

struct EnergyDiagnostics {
    double e0 = 0.0;            // ||r0_x||^2 - (2/3) ||r0||_3^3
    double t_star_upper = 0.0;  // 3 / ||r0||_2^2, meaningful when e0 < 0
    bool small_data_ok = false; // ||r0_x||^2 >= (2/3) ||r0||_3^3
};

// Energy functional of the blow-up comparison argument, with plain
// (unaveraged) integrals over the grid's interval.
inline EnergyDiagnostics energy_diagnostics(const ChebGrid& grid, const Vector& r0) {
    require(r0.size() == grid.size(), "energy_diagnostics: array size must match the grid");
    const Vector dr = grid.d1() * r0;
    const double grad_sq = grid.integrate(dr.cwiseProduct(dr));
    const double cube = grid.integrate(r0.cwiseAbs().array().pow(3).matrix());
    const double l2_sq = grid.integrate(r0.cwiseProduct(r0));

    EnergyDiagnostics out;
    out.e0 = grad_sq - (2.0 / 3.0) * cube;
    out.t_star_upper = (l2_sq > 0.0) ? 3.0 / l2_sq : std::numeric_limits<double>::infinity();
    out.small_data_ok = grad_sq >= (2.0 / 3.0) * cube;
    return out;
}

}  // namespace ecodamp
