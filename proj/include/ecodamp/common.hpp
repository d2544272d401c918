#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ecodamp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Spatial coordinate; y is ignored on 1-D domains.
struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent run configuration (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

// A solve that failed after the retry ladder was exhausted (CLI exit code 3).
struct SolverError : Error {
    using Error::Error;
};

struct NewtonDivergence : SolverError {
    using SolverError::SolverError;
};

struct LinearSolveStall : SolverError {
    using SolverError::SolverError;
};

// Experiment-level failures such as invalid bisection brackets (CLI exit code 4).
struct ExperimentError : Error {
    using Error::Error;
};

struct BracketInvalid : ExperimentError {
    using ExperimentError::ExperimentError;
};

struct NoPositiveEquilibrium : ExperimentError {
    using ExperimentError::ExperimentError;
};

struct AmbiguousSigns : ExperimentError {
    using ExperimentError::ExperimentError;
};

struct IoError : Error {
    using Error::Error;
};

inline double sq(double x) { return x * x; }

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ConfigError(msg);
}

}  // namespace ecodamp
