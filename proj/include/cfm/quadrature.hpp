#pragma once

// Gauss-Legendre rules on [0,1], affine segments and tensor rectangles.

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cfm/errors.hpp"
#include "cfm/grid.hpp"

namespace cfm {

struct QuadratureRule {
    std::vector<double> nodes;    // in [0,1]
    std::vector<double> weights;  // sum to 1
    int size() const { return static_cast<int>(nodes.size()); }
};

/// n-point Gauss-Legendre rule on [0,1]; exact for degree <= 2n-1.
/// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix.
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw InvalidArgument("quadrature needs at least one point");
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double beta = k / std::sqrt(4.0 * k * k - 1.0);
        jac(k, k - 1) = beta;
        jac(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        const double v0 = eig.eigenvectors()(0, k);
        rule.nodes[k] = 0.5 * (1.0 + eig.eigenvalues()(k));
        rule.weights[k] = v0 * v0;  // 2 v0^2 on [-1,1], halved for [0,1]
    }
    return rule;
}

/// Memoized rule for the small point counts used by the local solvers.
inline const QuadratureRule& gauss_rule(int n) {
    static const std::vector<QuadratureRule> table = [] {
        std::vector<QuadratureRule> t;
        for (int k = 0; k <= 32; ++k) t.push_back(k == 0 ? QuadratureRule{} : gauss_legendre(k));
        return t;
    }();
    if (n < 1 || n > 32) throw InvalidArgument("quadrature point count must be in [1, 32]");
    return table[n];
}

struct QuadPoint {
    Vec2 x;
    double w;
};

/// Affine Gauss rule on the straight segment a->b (weights sum to |b-a|).
inline std::vector<QuadPoint> gauss_segment(int n, const Vec2& a, const Vec2& b) {
    const auto& rule = gauss_rule(n);
    const double len = (b - a).norm();
    std::vector<QuadPoint> pts;
    pts.reserve(n);
    for (int k = 0; k < n; ++k) pts.push_back({a + rule.nodes[k] * (b - a), rule.weights[k] * len});
    return pts;
}

/// n x n tensor rule on an axis-aligned rectangle.
inline std::vector<QuadPoint> gauss_rectangle(int n, const Rect& r) {
    const auto& rule = gauss_rule(n);
    const double area = r.width() * r.height();
    std::vector<QuadPoint> pts;
    pts.reserve(static_cast<std::size_t>(n) * n);
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a)
            pts.push_back({{r.x_lo + rule.nodes[a] * r.width(), r.y_lo + rule.nodes[b] * r.height()},
                           rule.weights[a] * rule.weights[b] * area});
    return pts;
}

}  // namespace cfm
