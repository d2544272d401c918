#pragma once

// Parameter sets used across the test suites, matching the preset tables in
// ecodamp/config.hpp.

#include "ecodamp/kinetics.hpp"

namespace ecodamp::fixtures {

// 1-D refuge/blow-up configuration (uniform ic u=r=10, v=2000 on (0,pi)).
inline ParameterSet fig2_params() {
    ParameterSet p;
    p.a1 = 1.0;
    p.a2 = 1.0;
    p.b2 = 0.5;
    p.c = 0.055;
    p.w0 = 0.55;
    p.w1 = 0.1;
    p.w2 = 0.25;
    p.w3 = 1.2;
    p.w4 = 100.0;
    p.w5 = 0.55;
    p.D0 = 10.0;
    p.D1 = 13.0;
    p.D2 = 10.0;
    p.D3 = 20.0;
    p.D4 = 10.0;
    p.d1 = p.d2 = p.d3 = 0.1;
    return p;
}

// Turing-pattern configuration; admits the interior equilibrium
// (10.110031, 10, 2.997897).
inline ParameterSet fig9_params(bool with_diffusion = false) {
    ParameterSet p;
    p.a1 = 1.79;
    p.a2 = 0.8;
    p.b2 = 0.15;
    p.c = 0.04;
    p.w0 = 0.55;
    p.w1 = 2.0;
    p.w2 = 0.5;
    p.w3 = 1.2;
    p.D0 = 10.0;
    p.D1 = 13.0;
    p.D2 = 10.0;
    p.D3 = 20.0;
    if (with_diffusion) {
        p.d1 = 1e-2;
        p.d2 = 1e-5;
        p.d3 = 1e-7;
    }
    return p;
}

// Twin-run chaos configuration with base state (25, 13, 9).
inline ParameterSet chaos_params() {
    ParameterSet p;
    p.a1 = 1.93;
    p.a2 = 1.89;
    p.b2 = 0.06;
    p.c = 0.03;
    p.w0 = 1.0;
    p.w1 = 0.5;
    p.w2 = 0.405;
    p.w3 = 1.0;
    p.D0 = 10.0;
    p.D1 = 10.0;
    p.D2 = 10.0;
    p.D3 = 20.0;
    p.d1 = p.d2 = p.d3 = 1e-5;
    return p;
}

// 2-D avoided-blow-up configuration (gaussian r, circular refuge R = 0.5).
inline ParameterSet fig4_params() {
    ParameterSet p;
    p.a1 = 5.0;
    p.a2 = 0.75;
    p.b2 = 0.5;
    p.c = 0.055;
    p.w0 = 0.55;
    p.w1 = 1.0;
    p.w2 = 0.25;
    p.w3 = 1.2;
    p.D0 = 20.0;
    p.D1 = 13.0;
    p.D2 = 10.0;
    p.D3 = 20.0;
    p.d1 = p.d2 = p.d3 = 0.1;
    return p;
}

}  // namespace ecodamp::fixtures
