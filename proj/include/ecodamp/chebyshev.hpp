#pragma once

// Chebyshev Gauss-Lobatto collocation grid: nodes x_j = cos(j pi / N),
// dense first/second derivative matrices, and Clenshaw-Curtis weights for
// unweighted quadrature, all affinely mapped onto a physical interval.

#include "ecodamp/common.hpp"

namespace ecodamp {

class ChebGrid {
public:
    // N+1 nodes on [lo, hi]; nodes are stored descending (node(0) = hi).
    ChebGrid(int N, double lo, double hi) : n_(N), lo_(lo), hi_(hi) {
        require(N >= 2, "ChebGrid: N must be at least 2");
        require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "ChebGrid: need lo < hi");

        const int m = N + 1;
        const double pi = std::acos(-1.0);

        Vector xi(m);
        for (int j = 0; j <= N; ++j) xi(j) = std::cos(j * pi / N);
        xi(0) = 1.0;
        xi(N) = -1.0;

        // First-derivative matrix on the reference interval, with the
        // negative-sum trick on the diagonal.
        Matrix D(m, m);
        auto cj = [N](int j) { return (j == 0 || j == N) ? 2.0 : 1.0; };
        for (int i = 0; i <= N; ++i) {
            double rowsum = 0.0;
            for (int j = 0; j <= N; ++j) {
                if (i == j) continue;
                double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
                D(i, j) = (cj(i) / cj(j)) * sign / (xi(i) - xi(j));
                rowsum += D(i, j);
            }
            D(i, i) = -rowsum;
        }

        // Clenshaw-Curtis weights for the unweighted integral on [-1,1].
        Vector w = Vector::Zero(m);
        if (N % 2 == 0) {
            w(0) = w(N) = 1.0 / (N * N - 1.0);
        } else {
            w(0) = w(N) = 1.0 / (N * N);
        }
        for (int i = 1; i < N; ++i) {
            double theta = i * pi / N;
            double v = 1.0;
            if (N % 2 == 0) {
                for (int k = 1; k <= N / 2 - 1; ++k) v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
                v -= std::cos(N * theta) / (N * N - 1.0);
            } else {
                for (int k = 1; k <= (N - 1) / 2; ++k) v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
            }
            w(i) = 2.0 * v / N;
        }

        const double jac = 2.0 / (hi - lo);  // d(xi)/dx
        nodes_ = Vector(m);
        for (int j = 0; j <= N; ++j) nodes_(j) = lo + (hi - lo) * (xi(j) + 1.0) / 2.0;
        d1_ = D * jac;
        d2_ = d1_ * d1_;
        weights_ = w / jac;
    }

    int order() const { return n_; }          // the N in x_j = cos(j pi / N)
    int size() const { return n_ + 1; }       // number of nodes
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double node(int j) const { return nodes_(j); }
    const Vector& nodes() const { return nodes_; }
    const Vector& quadrature_weights() const { return weights_; }
    const Matrix& d1() const { return d1_; }
    const Matrix& d2() const { return d2_; }

    double integrate(const Vector& values) const { return weights_.dot(values); }

    // Second-derivative operator restricted to interior nodes after
    // eliminating the boundary values through the no-flux rows
    // (d1 w)(lo) = (d1 w)(hi) = 0.
    Matrix neumann_closed_d2() const {
        const int m = n_ + 1;
        Eigen::Matrix2d B;
        B << d1_(0, 0), d1_(0, m - 1), d1_(m - 1, 0), d1_(m - 1, m - 1);
        Matrix Rint(2, m - 2);
        for (int j = 1; j < m - 1; ++j) {
            Rint(0, j - 1) = d1_(0, j);
            Rint(1, j - 1) = d1_(m - 1, j);
        }
        // boundary values = -B^{-1} Rint * interior values
        Matrix bc = -B.inverse() * Rint;
        Matrix out(m - 2, m - 2);
        for (int i = 1; i < m - 1; ++i)
            for (int j = 1; j < m - 1; ++j)
                out(i - 1, j - 1) = d2_(i, j) + d2_(i, 0) * bc(0, j - 1) + d2_(i, m - 1) * bc(1, j - 1);
        return out;
    }

private:
    int n_;
    double lo_, hi_;
    Vector nodes_;
    Vector weights_;
    Matrix d1_, d2_;
};

inline ChebGrid build_cheb_grid(int N, double lo, double hi) { return ChebGrid(N, lo, hi); }

}  // namespace ecodamp
