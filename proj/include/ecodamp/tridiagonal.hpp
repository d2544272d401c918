#pragma once

// Tridiagonal operators and the Thomas algorithm. The Neumann 1-D Laplacian
// uses ghost-point elimination: the central no-flux condition doubles the
// off-diagonal entry of each boundary row, keeping every row sum at zero.

#include "ecodamp/common.hpp"

namespace ecodamp {

struct Tridiagonal {
    Vector sub;   // length n-1
    Vector diag;  // length n
    Vector super; // length n-1

    int size() const { return static_cast<int>(diag.size()); }

    Vector apply(const Vector& x) const {
        const int n = size();
        Vector y = diag.cwiseProduct(x);
        y.head(n - 1) += super.cwiseProduct(x.tail(n - 1));
        y.tail(n - 1) += sub.cwiseProduct(x.head(n - 1));
        return y;
    }
};

// d * Laplacian on n equispaced nodes with spacing h and no-flux ends.
inline Tridiagonal neumann_laplacian(int n, double h, double d) {
    require(n >= 3, "neumann_laplacian: need at least 3 nodes");
    require(h > 0.0, "neumann_laplacian: spacing must be positive");
    const double s = d / (h * h);
    Tridiagonal L;
    L.sub = Vector::Constant(n - 1, s);
    L.diag = Vector::Constant(n, -2.0 * s);
    L.super = Vector::Constant(n - 1, s);
    L.super(0) = 2.0 * s;     // ghost elimination at the left wall
    L.sub(n - 2) = 2.0 * s;   // and at the right wall
    return L;
}

// I - alpha * L, the implicit half-sweep operator.
inline Tridiagonal shifted_identity_minus(const Tridiagonal& L, double alpha) {
    Tridiagonal out;
    out.sub = -alpha * L.sub;
    out.diag = Vector::Ones(L.size()) - alpha * L.diag;
    out.super = -alpha * L.super;
    return out;
}

// Thomas factorization reused across many right-hand sides that share the
// same operator (one per grid line in an ADI half-sweep).
class ThomasSolver {
public:
    explicit ThomasSolver(const Tridiagonal& t) : sub_(t.sub), cfac_(t.size()), pivot_(t.size()) {
        const int n = t.size();
        pivot_(0) = t.diag(0);
        if (pivot_(0) == 0.0) throw SolverError("thomas_solve: zero pivot (system not diagonally dominant)");
        if (n > 1) cfac_(0) = t.super(0) / pivot_(0);
        for (int i = 1; i < n; ++i) {
            pivot_(i) = t.diag(i) - t.sub(i - 1) * cfac_(i - 1);
            if (pivot_(i) == 0.0) throw SolverError("thomas_solve: zero pivot (system not diagonally dominant)");
            if (i < n - 1) cfac_(i) = t.super(i) / pivot_(i);
        }
    }

    Vector solve(const Vector& rhs) const {
        const int n = static_cast<int>(pivot_.size());
        Vector x(n);
        x(0) = rhs(0) / pivot_(0);
        for (int i = 1; i < n; ++i) x(i) = (rhs(i) - sub_(i - 1) * x(i - 1)) / pivot_(i);
        for (int i = n - 2; i >= 0; --i) x(i) -= cfac_(i) * x(i + 1);
        return x;
    }

    // In-place column solve, used by the batched ADI sweeps.
    void solve_in_place(Eigen::Ref<Vector> x) const {
        const int n = static_cast<int>(pivot_.size());
        x(0) /= pivot_(0);
        for (int i = 1; i < n; ++i) x(i) = (x(i) - sub_(i - 1) * x(i - 1)) / pivot_(i);
        for (int i = n - 2; i >= 0; --i) x(i) -= cfac_(i) * x(i + 1);
    }

private:
    Vector sub_, cfac_, pivot_;
};

inline Vector thomas_solve(const Tridiagonal& t, const Vector& rhs) {
    require(t.size() == rhs.size(), "thomas_solve: dimension mismatch");
    return ThomasSolver(t).solve(rhs);
}

}  // namespace ecodamp
