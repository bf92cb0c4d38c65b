#pragma once

// Global finite-difference systems (compact 9-point 4th order, 5-point 2nd
// order), correction terms on the right-hand side, linear solve and gradient
// recovery with ghost substitution.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "cfm/cases.hpp"
#include "cfm/errors.hpp"
#include "cfm/grid.hpp"

namespace cfm {

/// Coefficient of node (i+di, j+dj) in the discrete Laplacian at (i, j).
inline double stencil_coefficient(StencilKind kind, double hx, double hy, int di, int dj) {
    const double ix2 = 1.0 / (hx * hx), iy2 = 1.0 / (hy * hy);
    if (kind == StencilKind::FivePoint) {
        if (di == 0 && dj == 0) return -2.0 * ix2 - 2.0 * iy2;
        if (dj == 0 && std::abs(di) == 1) return ix2;
        if (di == 0 && std::abs(dj) == 1) return iy2;
        return 0.0;
    }
    // L5 u + (hx^2 + hy^2)/12 * dxx dyy u
    const double cross = (hx * hx + hy * hy) / 12.0 * ix2 * iy2;
    if (di == 0 && dj == 0) return -2.0 * ix2 - 2.0 * iy2 + 4.0 * cross;
    if (dj == 0 && std::abs(di) == 1) return ix2 - 2.0 * cross;
    if (di == 0 && std::abs(dj) == 1) return iy2 - 2.0 * cross;
    if (std::abs(di) == 1 && std::abs(dj) == 1) return cross;
    return 0.0;
}

/// Right-hand side of the scheme at a point for the source f of one region.
inline double scheme_source(StencilKind kind, double hx, double hy, const Jet2& f) {
    if (kind == StencilKind::FivePoint) return f.v;
    return f.v + (hx * hx * f.dxx + hy * hy * f.dyy) / 12.0;
}

struct PoissonSystem {
    Grid grid;
    StencilKind scheme = StencilKind::NinePoint;
    Eigen::SparseMatrix<double> A;  // interior nodes, row-major numbering
    Eigen::VectorXd rhs;
    std::vector<double> g;  // Dirichlet values on boundary nodes (0 elsewhere)

    int unknown(int i, int j) const { return (j - 1) * (grid.nx() - 2) + (i - 1); }
};

/// Assembles the interface-free operator with each node's own source term.
/// The matrix never depends on the jumps.
inline PoissonSystem assemble_system(const Grid& grid, const SideMap& sides, const CaseDefinition& c,
                                     StencilKind scheme) {
    PoissonSystem sys{grid, scheme, {}, {}, std::vector<double>(grid.size(), 0.0)};
    const int nx = grid.nx(), ny = grid.ny();
    const int n = (nx - 2) * (ny - 2);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (grid.is_boundary(i, j)) sys.g[grid.index(i, j)] = c.boundary(grid.point(i, j), sides.at(i, j));
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 9);
    sys.rhs = Eigen::VectorXd::Zero(n);
    const auto offsets = stencil_offsets(scheme);
    for (int j = 1; j < ny - 1; ++j)
        for (int i = 1; i < nx - 1; ++i) {
            const int row = sys.unknown(i, j);
            const Jet2 f = c.f(sides.at(i, j))(grid.point(i, j));
            if (!std::isfinite(f.v) || (scheme == StencilKind::NinePoint && (!std::isfinite(f.dxx) || !std::isfinite(f.dyy))))
                throw InvalidArgument("source term or its second derivatives unavailable");
            double r = scheme_source(scheme, grid.hx(), grid.hy(), f);
            trip.emplace_back(row, row, stencil_coefficient(scheme, grid.hx(), grid.hy(), 0, 0));
            for (auto [di, dj] : offsets) {
                const double a = stencil_coefficient(scheme, grid.hx(), grid.hy(), di, dj);
                if (grid.is_boundary(i + di, j + dj)) r -= a * sys.g[grid.index(i + di, j + dj)];
                else trip.emplace_back(row, sys.unknown(i + di, j + dj), a);
            }
            sys.rhs(row) = r;
        }
    sys.A.resize(n, n);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    return sys;
}

struct CorrectionEntry {
    NodeId node;
    double coefficient;
    double offset;  // u_centre_region - u_node_region at the node
};

struct StencilCorrection {
    NodeId center;
    double value = 0.0;  // C, added to the right-hand side
    std::vector<CorrectionEntry> entries;
};

/// C = -sum_n a_n (u_centre_region - u_node_region)(n) over opposite nodes.
inline StencilCorrection correction_term(const IrregularStencil& st, const std::vector<double>& offsets,
                                         const Grid& grid) {
    if (offsets.size() != st.opposite.size()) throw InvalidArgument("missing correction value");
    StencilCorrection sc{st.center, 0.0, {}};
    for (std::size_t m = 0; m < offsets.size(); ++m) {
        const int di = st.opposite[m].i - st.center.i, dj = st.opposite[m].j - st.center.j;
        const double a = stencil_coefficient(st.kind, grid.hx(), grid.hy(), di, dj);
        sc.value -= a * offsets[m];
        sc.entries.push_back({st.opposite[m], a, offsets[m]});
    }
    return sc;
}

/// Two-region form: d_values hold D = u+ - u- at the opposite nodes.
inline StencilCorrection correction_term(const IrregularStencil& st, const std::map<NodeId, double>& d_values,
                                         const SideMap& sides, const Grid& grid) {
    const double sigma = sides.at(st.center) == kPlus ? 1.0 : -1.0;
    std::vector<double> offsets;
    for (const auto& n : st.opposite) {
        auto it = d_values.find(n);
        if (it == d_values.end()) throw InvalidArgument("missing correction value");
        offsets.push_back(sigma * it->second);
    }
    return correction_term(st, offsets, grid);
}

inline std::vector<StencilCorrection> correction_terms(const std::vector<IrregularStencil>& stencils,
                                                       const std::vector<std::vector<double>>& offsets,
                                                       const Grid& grid) {
    std::vector<StencilCorrection> out;
    out.reserve(stencils.size());
    for (std::size_t s = 0; s < stencils.size(); ++s) out.push_back(correction_term(stencils[s], offsets.at(s), grid));
    return out;
}

inline Eigen::VectorXd corrected_rhs(const PoissonSystem& sys, const std::vector<StencilCorrection>& corr) {
    Eigen::VectorXd r = sys.rhs;
    for (const auto& c : corr) r(sys.unknown(c.center.i, c.center.j)) += c.value;
    return r;
}

enum class LinearSolver { Direct, ConjugateGradient };

struct LinearSolveInfo {
    double relative_residual = 0.0;
    bool used_cg = false;
};

/// Solves A u = rhs and returns nodal values including boundary data.
inline std::vector<double> solve_linear(const PoissonSystem& sys, const Eigen::VectorXd& rhs,
                                        LinearSolver method = LinearSolver::Direct, LinearSolveInfo* info = nullptr) {
    Eigen::VectorXd x;
    const double bn = std::max(rhs.norm(), 1e-300);
    double res = std::numeric_limits<double>::infinity();
    bool cg = method == LinearSolver::ConjugateGradient;
    if (!cg) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.A);
        if (ldlt.info() == Eigen::Success) {
            x = ldlt.solve(rhs);
            res = (sys.A * x - rhs).norm() / bn;
        }
        if (!(res <= 1e-11)) cg = true;
    }
    if (cg) {
        // -A is SPD
        Eigen::SparseMatrix<double> neg = -sys.A;
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>>
            solver(neg);
        solver.setTolerance(1e-12);
        solver.setMaxIterations(std::max<Eigen::Index>(1000, 20 * neg.rows()));
        Eigen::VectorXd guess = x.size() == rhs.size() ? Eigen::VectorXd(x) : Eigen::VectorXd::Zero(rhs.size());
        x = solver.solveWithGuess(-rhs, guess);
        res = (sys.A * x - rhs).norm() / bn;
        if (solver.info() != Eigen::Success || !(res <= 1e-10))
            throw SolverFailure("linear solve did not converge", res);
    }
    if (info) *info = {res, cg};
    std::vector<double> u = sys.g;
    for (int j = 1; j < sys.grid.ny() - 1; ++j)
        for (int i = 1; i < sys.grid.nx() - 1; ++i) u[sys.grid.index(i, j)] = x(sys.unknown(i, j));
    return u;
}

namespace detail {

// Weights of the first derivative on integer offsets (unit spacing).
inline std::vector<double> fd_first_derivative(const std::vector<int>& offs) {
    const int n = static_cast<int>(offs.size());
    Eigen::MatrixXd V(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) V(m, k) = std::pow(static_cast<double>(offs[static_cast<std::size_t>(k)]), m);
    rhs(1) = 1.0;
    const Eigen::VectorXd w = V.colPivHouseholderQr().solve(rhs);
    return {w.data(), w.data() + n};
}

// Offsets for a p-point first-derivative window at index i in [lo, hi].
// Shrinks when fewer than p indices are available.
inline std::vector<int> fd_window(int i, int lo, int hi, int p) {
    p = std::min(p, hi - lo + 1);
    const int half = p / 2;
    int start = std::clamp(i - half, lo, hi - p + 1);
    std::vector<int> o;
    for (int k = 0; k < p; ++k) o.push_back(start + k - i);
    return o;
}

}  // namespace detail

struct GradientField {
    std::vector<double> ux, uy;
};

/// Nodal gradient. Interior nodes: order 4 uses
///   u_x = dx u + hx^2/6 (dyy dx u - f_x),  u_y = dy u + hy^2/6 (dxx dy u - f_y)
/// and order 2 plain centred differences; values across the interface are
/// ghost-substituted with the stencil offsets. Boundary nodes use one-sided
/// differences of matching order.
inline GradientField gradient_field(const Grid& grid, const std::vector<double>& u, const SideMap& sides,
                                    const std::vector<IrregularStencil>& stencils,
                                    const std::vector<std::vector<double>>& offsets, const CaseDefinition& c,
                                    int order) {
    if (order != 2 && order != 4) throw InvalidArgument("gradient order must be 2 or 4");
    const int nx = grid.nx(), ny = grid.ny();
    const double hx = grid.hx(), hy = grid.hy();
    std::vector<int> owner(grid.size(), -1);
    for (std::size_t s = 0; s < stencils.size(); ++s) {
        if (offsets.at(s).size() != stencils[s].opposite.size()) throw InvalidArgument("missing correction value");
        owner[grid.index(stencils[s].center)] = static_cast<int>(s);
    }
    GradientField gf{std::vector<double>(grid.size()), std::vector<double>(grid.size())};
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const auto idx = grid.index(i, j);
            if (grid.is_boundary(i, j)) {
                // one-sided, kept inside the node's own region
                const int p = order == 4 ? 5 : 3;
                const int r = sides.at(i, j);
                int xl = i, xh = i, yl = j, yh = j;
                while (xl > 0 && sides.at(xl - 1, j) == r) --xl;
                while (xh < nx - 1 && sides.at(xh + 1, j) == r) ++xh;
                while (yl > 0 && sides.at(i, yl - 1) == r) --yl;
                while (yh < ny - 1 && sides.at(i, yh + 1) == r) ++yh;
                auto diff = [&](const std::vector<int>& o, auto at) {
                    if (o.size() < 2) return 0.0;
                    const auto w = detail::fd_first_derivative(o);
                    double d = 0.0;
                    for (std::size_t k = 0; k < o.size(); ++k) d += w[k] * at(o[k]);
                    return d;
                };
                gf.ux[idx] = diff(detail::fd_window(i, xl, xh, p), [&](int o) { return u[grid.index(i + o, j)]; }) / hx;
                gf.uy[idx] = diff(detail::fd_window(j, yl, yh, p), [&](int o) { return u[grid.index(i, j + o)]; }) / hy;
                continue;
            }
            const int s = owner[idx];
            auto v = [&](int di, int dj) {
                double val = u[grid.index(i + di, j + dj)];
                if (s >= 0) {
                    const auto& st = stencils[static_cast<std::size_t>(s)];
                    for (std::size_t m = 0; m < st.opposite.size(); ++m)
                        if (st.opposite[m].i == i + di && st.opposite[m].j == j + dj)
                            val += offsets[static_cast<std::size_t>(s)][m];
                }
                return val;
            };
            double ux = (v(1, 0) - v(-1, 0)) / (2.0 * hx);
            double uy = (v(0, 1) - v(0, -1)) / (2.0 * hy);
            if (order == 4) {
                const Jet2 f = c.f(sides.at(i, j))(grid.point(i, j));
                const double dyy_dx = ((v(1, 1) - 2.0 * v(1, 0) + v(1, -1)) - (v(-1, 1) - 2.0 * v(-1, 0) + v(-1, -1))) /
                                      (2.0 * hx * hy * hy);
                const double dxx_dy = ((v(1, 1) - 2.0 * v(0, 1) + v(-1, 1)) - (v(1, -1) - 2.0 * v(0, -1) + v(-1, -1))) /
                                      (2.0 * hy * hx * hx);
                ux += hx * hx / 6.0 * (dyy_dx - f.dx);
                uy += hy * hy / 6.0 * (dxx_dy - f.dy);
            }
            gf.ux[idx] = ux;
            gf.uy[idx] = uy;
        }
    return gf;
}

}  // namespace cfm
