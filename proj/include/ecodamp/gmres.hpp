#pragma once

// Restarted GMRES with modified Gram-Schmidt Arnoldi and Givens rotations.
// Left preconditioning: the iteration runs on M^{-1} A x = M^{-1} b and the
// convergence test uses the preconditioned residual norm.

#include <functional>

#include "ecodamp/common.hpp"

namespace ecodamp {

struct GmresConfig {
    int restart = 30;
    double tol = 1e-10;       // relative residual
    int max_restarts = 10;
};

struct GmresStats {
    bool converged = false;
    int iterations = 0;
    int restarts = 0;
    double relative_residual = 0.0;
};

// A: y = A(x); Minv: y = M^{-1}(x). x holds the initial guess on entry.
template <typename MatVec, typename Precond>
GmresStats gmres_solve(const MatVec& A, const Precond& Minv, const Vector& b, Vector& x,
                       const GmresConfig& cfg = {}) {
    const int n = static_cast<int>(b.size());
    const int m = std::min(cfg.restart, n);
    GmresStats stats;

    const double ref = Minv(b).norm();
    if (ref == 0.0) {
        x.setZero();
        stats.converged = true;
        return stats;
    }

    Matrix V(n, m + 1);
    Matrix H = Matrix::Zero(m + 1, m);
    Vector cs(m), sn(m), g(m + 1);

    for (int cycle = 0; cycle <= cfg.max_restarts; ++cycle) {
        Vector r = Minv(b - A(x));
        double beta = r.norm();
        stats.relative_residual = beta / ref;
        if (stats.relative_residual <= cfg.tol) {
            stats.converged = true;
            return stats;
        }
        if (cycle == cfg.max_restarts) break;
        stats.restarts = cycle;

        V.col(0) = r / beta;
        g.setZero();
        g(0) = beta;

        int j = 0;
        for (; j < m; ++j) {
            Vector w = Minv(A(V.col(j)));
            for (int i = 0; i <= j; ++i) {
                H(i, j) = V.col(i).dot(w);
                w -= H(i, j) * V.col(i);
            }
            H(j + 1, j) = w.norm();
            const bool breakdown = H(j + 1, j) <= 1e-300;
            if (!breakdown) V.col(j + 1) = w / H(j + 1, j);

            for (int i = 0; i < j; ++i) {
                double t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
                H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
                H(i, j) = t;
            }
            double denom = std::hypot(H(j, j), H(j + 1, j));
            cs(j) = (denom == 0.0) ? 1.0 : H(j, j) / denom;
            sn(j) = (denom == 0.0) ? 0.0 : H(j + 1, j) / denom;
            H(j, j) = denom;
            H(j + 1, j) = 0.0;
            g(j + 1) = -sn(j) * g(j);
            g(j) = cs(j) * g(j);

            ++stats.iterations;
            stats.relative_residual = std::abs(g(j + 1)) / ref;
            if (stats.relative_residual <= cfg.tol || breakdown) {
                ++j;
                break;
            }
        }

        // y = H(0:j,0:j)^{-1} g(0:j), back substitution on the rotated system
        Vector y(j);
        for (int i = j - 1; i >= 0; --i) {
            double s = g(i);
            for (int k = i + 1; k < j; ++k) s -= H(i, k) * y(k);
            y(i) = s / H(i, i);
        }
        x += V.leftCols(j) * y;

        if (stats.relative_residual <= cfg.tol) {
            stats.converged = true;
            return stats;
        }
    }
    return stats;
}

inline auto identity_preconditioner() {
    return [](const Vector& v) { return v; };
}

}  // namespace ecodamp
