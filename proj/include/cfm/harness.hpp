#pragma once

// Full pipeline per grid, error norms, convergence studies and CSV output.

#include <chrono>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cfm/assembly.hpp"
#include "cfm/cases.hpp"
#include "cfm/cauchy.hpp"
#include "cfm/grid.hpp"

namespace cfm {

struct SolveOptions {
    int order = 4;
    CauchyConfig cauchy;
    LinearSolver solver = LinearSolver::Direct;
    bool gradient = true;

    StencilKind scheme() const { return order == 2 ? StencilKind::FivePoint : StencilKind::NinePoint; }
    static SolveOptions defaults(int order) {
        SolveOptions o;
        o.order = order;
        o.cauchy = order == 2 ? CauchyConfig::defaults(BasisKind::ModifiedBilinear5, OmegaStrategy::Free)
                              : CauchyConfig::defaults(BasisKind::Bicubic12);
        return o;
    }
};

struct Solution {
    Grid grid;
    SideMap sides;
    std::shared_ptr<const Interface> rep;
    std::vector<IrregularStencil> stencils;
    CorrectionSet corrections;
    std::vector<double> u;
    GradientField grad;
    LinearSolveInfo linear;
    double seconds = 0.0;
};

inline Solution solve_case(const CaseDefinition& c, int nx, int ny, const SolveOptions& opt) {
    if (opt.order != 2 && opt.order != 4) throw InvalidArgument("order must be 2 or 4");
    const auto t0 = std::chrono::steady_clock::now();
    Grid grid = create_grid(nx, ny, c.domain);
    auto rep = c.make_interface(grid);
    SideMap sides = classify_nodes(grid, *rep);
    auto stencils = irregular_stencils(grid, sides, opt.scheme());
    auto corr = compute_corrections(grid, sides, stencils, *rep, c.jumps, opt.cauchy);
    const auto sys = assemble_system(grid, sides, c, opt.scheme());
    const auto terms = correction_terms(stencils, corr.offsets, grid);
    LinearSolveInfo info;
    auto u = solve_linear(sys, corrected_rhs(sys, terms), opt.solver, &info);
    GradientField gf;
    if (opt.gradient) gf = gradient_field(grid, u, sides, stencils, corr.offsets, c, opt.order);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {grid, std::move(sides), std::move(rep), std::move(stencils), std::move(corr), std::move(u), std::move(gf),
            info, secs};
}

struct NormPair {
    double l2 = 0.0, linf = 0.0;
};

/// L2 = root mean square, Linf = max absolute value.
inline NormPair norms_of(const std::vector<double>& e) {
    NormPair n;
    double s = 0.0;
    for (double v : e) {
        s += v * v;
        n.linf = std::max(n.linf, std::abs(v));
    }
    n.l2 = e.empty() ? 0.0 : std::sqrt(s / static_cast<double>(e.size()));
    return n;
}

struct ErrorNorms {
    double l2_u = 0.0, linf_u = 0.0, l2_grad = 0.0, linf_grad = 0.0;
};

/// Nodal errors against the exact solution of each node's region. The
/// gradient error at a node is the Euclidean norm of the error vector, taken
/// over interior nodes only (boundary values are one-sided estimates).
inline ErrorNorms error_norms(const Solution& s, const CaseDefinition& c) {
    std::vector<double> eu(s.grid.size()), eg;
    const bool grad = !s.grad.ux.empty();
    for (int j = 0; j < s.grid.ny(); ++j)
        for (int i = 0; i < s.grid.nx(); ++i) {
            const auto idx = s.grid.index(i, j);
            const Jet2 ex = c.u(s.sides.at(i, j))(s.grid.point(i, j));
            eu[idx] = s.u[idx] - ex.v;
            if (grad && !s.grid.is_boundary(i, j))
                eg.push_back(std::hypot(s.grad.ux[idx] - ex.dx, s.grad.uy[idx] - ex.dy));
        }
    const auto nu = norms_of(eu), ng = norms_of(eg);
    return {nu.l2, nu.linf, ng.l2, ng.linf};
}

/// Least-squares slope of log(err) against log(h); NaN if any error is not positive.
inline double fit_slope(const std::vector<double>& h, const std::vector<double>& err) {
    const std::size_t n = h.size();
    if (n < 2 || err.size() != n) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!(err[k] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double x = std::log(h[k]), y = std::log(err[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Largest distance, in decades, between the errors and their fitted line.
inline double fit_deviation(const std::vector<double>& h, const std::vector<double>& err) {
    const double p = fit_slope(h, err);
    if (std::isnan(p)) return p;
    double c = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) c += std::log10(err[k]) - p * std::log10(h[k]);
    c /= static_cast<double>(h.size());
    double d = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) d = std::max(d, std::abs(std::log10(err[k]) - p * std::log10(h[k]) - c));
    return d;
}

inline std::string basis_name(BasisKind b) {
    switch (b) {
        case BasisKind::Bicubic12: return "bicubic";
        case BasisKind::ModifiedBilinear5: return "mb";
        default: return "sb";
    }
}
inline std::string strategy_name(OmegaStrategy s) {
    switch (s) {
        case OmegaStrategy::Naive: return "naive";
        case OmegaStrategy::Compact: return "compact";
        case OmegaStrategy::Free: return "free";
        default: return "node";
    }
}

struct ConvergenceRow {
    int nx = 0, ny = 0;
    double h = 0.0;
    ErrorNorms err;
    double seconds = 0.0;
    std::size_t boxes = 0;
    double median_condition = 0.0;
};

struct ConvergenceReport {
    std::string case_name, scheme, strategy, basis;
    std::vector<ConvergenceRow> rows;
    ErrorNorms slope;      // fitted orders, one per column
    ErrorNorms deviation;  // worst distance from the fit, decades

    double total_seconds() const {
        double s = 0.0;
        for (const auto& r : rows) s += r.seconds;
        return s;
    }

    void fit() {
        std::vector<double> h, a, b, c, d;
        for (const auto& r : rows) {
            h.push_back(r.h);
            a.push_back(r.err.l2_u);
            b.push_back(r.err.linf_u);
            c.push_back(r.err.l2_grad);
            d.push_back(r.err.linf_grad);
        }
        slope = {fit_slope(h, a), fit_slope(h, b), fit_slope(h, c), fit_slope(h, d)};
        deviation = {fit_deviation(h, a), fit_deviation(h, b), fit_deviation(h, c), fit_deviation(h, d)};
    }

    /// With `timing` false the seconds column is written as 0 so that
    /// repeated runs produce identical bytes.
    void write_csv(std::ostream& os, bool timing = true) const {
        os << "case,scheme,strategy,basis,nx,ny,h,L2_u,Linf_u,L2_grad,Linf_grad,seconds\n";
        std::ostringstream line;
        line.precision(17);
        line << std::scientific;
        for (const auto& r : rows) {
            line.str("");
            line << case_name << ',' << scheme << ',' << strategy << ',' << basis << ',' << r.nx << ',' << r.ny << ','
                 << r.h << ',' << r.err.l2_u << ',' << r.err.linf_u << ',' << r.err.l2_grad << ',' << r.err.linf_grad
                 << ',' << (timing ? r.seconds : 0.0) << '\n';
            os << line.str();
        }
    }

    void write_slopes(std::ostream& os) const {
        std::ostringstream s;
        s.precision(3);
        s << std::fixed;
        s << case_name << " (" << scheme << ", " << strategy << ", " << basis << ")\n";
        s << "  slope   L2_u " << slope.l2_u << "  Linf_u " << slope.linf_u << "  L2_grad " << slope.l2_grad
          << "  Linf_grad " << slope.linf_grad << '\n';
        os << s.str();
    }
};

inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Runs the pipeline on square grids n x n for each n in `grids`.
/// A failure on one grid propagates; rows solved so far stay in `partial`.
/// `on_solution` sees every solved grid, e.g. for dumps.
inline ConvergenceReport convergence_study(const CaseDefinition& c, const std::vector<int>& grids,
                                           const SolveOptions& opt, ConvergenceReport* partial = nullptr,
                                           const std::function<void(const Solution&)>& on_solution = {}) {
    if (grids.size() < 3) throw InvalidArgument("a convergence study needs at least 3 grids");
    for (std::size_t k = 1; k < grids.size(); ++k)
        if (grids[k] <= grids[k - 1]) throw InvalidArgument("grids must be strictly refining");
    ConvergenceReport rep;
    rep.case_name = c.name;
    rep.scheme = opt.order == 2 ? "order2" : "order4";
    rep.strategy = strategy_name(opt.cauchy.strategy);
    rep.basis = basis_name(opt.cauchy.basis);
    for (int n : grids) {
        try {
            const auto s = solve_case(c, n, n, opt);
            ConvergenceRow row;
            row.nx = row.ny = n;
            row.h = std::max(s.grid.hx(), s.grid.hy());
            row.err = error_norms(s, c);
            row.seconds = s.seconds;
            row.boxes = s.corrections.boxes.size();
            std::vector<double> conds;
            for (const auto& b : s.corrections.boxes) conds.push_back(b.condition);
            row.median_condition = median(conds);
            rep.rows.push_back(row);
            if (on_solution) on_solution(s);
        } catch (...) {
            if (partial) *partial = rep;
            throw;
        }
    }
    rep.fit();
    if (partial) *partial = rep;
    return rep;
}

/// One row per node: x, y, region, u_num, u_exact, error, u_x, u_y.
inline void write_fields(std::ostream& os, const Solution& s, const CaseDefinition& c) {
    os << "x,y,region,u_num,u_exact,error,u_x,u_y\n";
    std::ostringstream line;
    line.precision(17);
    line << std::scientific;
    for (int j = 0; j < s.grid.ny(); ++j)
        for (int i = 0; i < s.grid.nx(); ++i) {
            const auto idx = s.grid.index(i, j);
            const double ex = c.u(s.sides.at(i, j))(s.grid.point(i, j)).v;
            line.str("");
            line << s.grid.x(i) << ',' << s.grid.y(j) << ',' << s.sides.at(i, j) << ',' << s.u[idx] << ',' << ex << ','
                 << s.u[idx] - ex << ',' << (s.grad.ux.empty() ? 0.0 : s.grad.ux[idx]) << ','
                 << (s.grad.uy.empty() ? 0.0 : s.grad.uy[idx]) << '\n';
            os << line.str();
        }
}

}  // namespace cfm
