#pragma once

// Local Cauchy problems for the correction function D = u+ - u-:
// box construction (four strategies) and penalized least squares.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfm/bicubic.hpp"
#include "cfm/bilinear.hpp"
#include "cfm/cases.hpp"
#include "cfm/errors.hpp"
#include "cfm/grid.hpp"
#include "cfm/interface.hpp"
#include "cfm/quadrature.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cfm {

enum class BasisKind { Bicubic12, ModifiedBilinear5, StandardBilinear4 };
enum class OmegaStrategy { Naive, Compact, Free, NodeCentered };

inline int basis_size(BasisKind b) {
    switch (b) {
        case BasisKind::Bicubic12: return 12;
        case BasisKind::ModifiedBilinear5: return 5;
        default: return 4;
    }
}

struct CauchyConfig {
    double penalty = 50.0;
    BasisKind basis = BasisKind::Bicubic12;
    int area_points = 6;  // per axis
    int line_points = 6;
    OmegaStrategy strategy = OmegaStrategy::Compact;

    static CauchyConfig defaults(BasisKind b, OmegaStrategy s = OmegaStrategy::Compact) {
        CauchyConfig c;
        c.basis = b;
        c.strategy = s;
        if (b != BasisKind::Bicubic12) c.area_points = c.line_points = 4;
        return c;
    }
    void validate() const {
        if (!(penalty > 0.0)) throw InvalidArgument("penalty must be positive");
        if (area_points < 1 || line_points < 1) throw InvalidArgument("quadrature counts must be positive");
    }
};

/// Boxes longer than this many times their width are flagged; they tend to
/// degrade the local solve.
inline constexpr double kElongatedAspect = 10.0;

/// Possibly rotated rectangle hosting one local Cauchy problem.
struct OmegaBox {
    Vec2 center = Vec2::Zero();
    double half_u = 0.0, half_v = 0.0;
    double angle = 0.0;  // rotation of the u axis
    NodeId owner;
    bool node_owned = false;
    int interface_id = 0;
    std::vector<InterfaceSegment> segments;
    std::vector<NodeId> d_nodes;

    Vec2 axis_u() const { return {std::cos(angle), std::sin(angle)}; }
    Vec2 axis_v() const { return perp(axis_u()); }
    double side_u() const { return 2.0 * half_u; }
    double side_v() const { return 2.0 * half_v; }
    double ell_c() const { return std::min(side_u(), side_v()); }
    double aspect_ratio() const { return std::max(half_u, half_v) / std::min(half_u, half_v); }
    bool elongated() const { return aspect_ratio() > kElongatedAspect; }
    Vec2 origin() const { return center - half_u * axis_u() - half_v * axis_v(); }
    /// Unit coordinates in [0,1]^2.
    Vec2 local(const Vec2& p) const {
        const Vec2 d = p - origin();
        return {d.dot(axis_u()) / side_u(), d.dot(axis_v()) / side_v()};
    }
    Vec2 global(double xb, double yb) const { return origin() + xb * side_u() * axis_u() + yb * side_v() * axis_v(); }
    Polygon polygon() const { return Polygon::rotated_rect(center, half_u, half_v, angle); }
    bool contains(const Vec2& p, double tol = 0.0) const {
        const Vec2 d = p - center;
        return std::abs(d.dot(axis_u())) <= half_u + tol && std::abs(d.dot(axis_v())) <= half_v + tol;
    }
};

namespace detail {

// Derivatives in box-local (u, v) coordinates of all basis functions.
inline std::array<double, 12> local_basis(BasisKind kind, const OmegaBox& box, double xb, double yb, int au,
                                          int av) {
    std::array<double, 12> out{};
    if (kind == BasisKind::Bicubic12) return bicubic12_basis(xb, yb, box.side_u(), box.side_v(), au, av);
    const auto b = modified_bilinear_basis(xb, yb, box.side_u(), box.side_v(), au, av);
    const int n = basis_size(kind);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)];
    // fifth coefficient is ell^2 times the mean Laplacian, same units as the corners
    if (n == 5) out[4] /= box.side_u() * box.side_v();
    return out;
}

struct BasisRows {
    Eigen::VectorXd value, grad_x, grad_y, lap;
};

inline BasisRows basis_rows(BasisKind kind, const OmegaBox& box, const Vec2& p) {
    const int n = basis_size(kind);
    const Vec2 q = box.local(p);
    const auto v = local_basis(kind, box, q.x(), q.y(), 0, 0);
    const auto du = local_basis(kind, box, q.x(), q.y(), 1, 0);
    const auto dv = local_basis(kind, box, q.x(), q.y(), 0, 1);
    const auto duu = local_basis(kind, box, q.x(), q.y(), 2, 0);
    const auto dvv = local_basis(kind, box, q.x(), q.y(), 0, 2);
    const Vec2 u = box.axis_u(), w = box.axis_v();
    BasisRows r{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (int i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(i);
        r.value(i) = v[s];
        r.grad_x(i) = u.x() * du[s] + w.x() * dv[s];
        r.grad_y(i) = u.y() * du[s] + w.y() * dv[s];
        r.lap(i) = duu[s] + dvv[s];
    }
    return r;
}

}  // namespace detail

/// Normal equations of J_P: J(c) = c^T A c - 2 rhs^T c + c0.
struct LocalSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd rhs;
    double c0 = 0.0;
};

struct JpTerms {
    double area = 0.0, value = 0.0, normal = 0.0;
    double total() const { return area + value + normal; }
};

inline LocalSystem assemble_local_system(const OmegaBox& box, const JumpData& jump, const CauchyConfig& cfg) {
    cfg.validate();
    if (box.segments.empty()) throw InvalidArgument("box carries no interface segment");
    const int n = basis_size(cfg.basis);
    LocalSystem s{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), 0.0};
    const double ell = box.ell_c();
    auto add = [&](const Eigen::VectorXd& row, double target, double w) {
        s.A.noalias() += w * row * row.transpose();
        s.rhs += w * target * row;
        s.c0 += w * target * target;
    };
    int constraints = 0;
    const auto& rule = gauss_rule(cfg.area_points);
    const double area = box.side_u() * box.side_v();
    for (int b = 0; b < rule.size(); ++b)
        for (int a = 0; a < rule.size(); ++a) {
            const Vec2 p = box.global(rule.nodes[static_cast<std::size_t>(a)], rule.nodes[static_cast<std::size_t>(b)]);
            const double w = rule.weights[static_cast<std::size_t>(a)] * rule.weights[static_cast<std::size_t>(b)] * area;
            add(detail::basis_rows(cfg.basis, box, p).lap, jump.f_d(p), ell * ell * ell * w);
            ++constraints;
        }
    for (const auto& seg : box.segments)
        for (const auto& q : seg.samples) {
            const auto r = detail::basis_rows(cfg.basis, box, q.x);
            add(r.value, jump.a(q.x), cfg.penalty * q.weight);
            const Eigen::VectorXd dn = q.normal.x() * r.grad_x + q.normal.y() * r.grad_y;
            add(dn, jump.b(q.x, q.normal), cfg.penalty * ell * ell * q.weight);
            constraints += 2;
        }
    if (constraints < n) throw SingularSystem("fewer quadrature constraints than unknowns", 0.0);
    return s;
}

/// Local polynomial D on one box.
struct CorrectionField {
    OmegaBox box;
    BasisKind basis = BasisKind::Bicubic12;
    Eigen::VectorXd coeffs;
    double condition = 0.0;  // of the assembled normal matrix
    double jp = 0.0;         // J_P at the minimizer

    double value(const Vec2& p) const { return detail::basis_rows(basis, box, p).value.dot(coeffs); }
    Vec2 gradient(const Vec2& p) const {
        const auto r = detail::basis_rows(basis, box, p);
        return {r.grad_x.dot(coeffs), r.grad_y.dot(coeffs)};
    }
    double laplacian(const Vec2& p) const { return detail::basis_rows(basis, box, p).lap.dot(coeffs); }
};

inline double condition_estimate(const Eigen::MatrixXd& A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

/// Minimizes J_P: diagonal equilibration, then a pivoted LDL^T solve.
inline CorrectionField solve_local(const OmegaBox& box, const LocalSystem& sys, BasisKind basis) {
    const Eigen::Index n = sys.A.rows();
    Eigen::VectorXd scale(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(sys.A(i, i) > 0.0)) throw SingularSystem("local system has an empty row", std::numeric_limits<double>::infinity());
        scale(i) = 1.0 / std::sqrt(sys.A(i, i));
    }
    const Eigen::MatrixXd As = scale.asDiagonal() * sys.A * scale.asDiagonal();
    const double cond = condition_estimate(sys.A);
    const double cond_eq = condition_estimate(As);
    if (!(cond_eq < 1e14)) throw SingularSystem("local system is numerically singular", cond);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(As);
    if (ldlt.info() != Eigen::Success) throw SingularSystem("local factorization failed", cond);
    CorrectionField f;
    f.box = box;
    f.basis = basis;
    f.coeffs = scale.asDiagonal() * ldlt.solve(scale.asDiagonal() * sys.rhs);
    f.condition = cond;
    f.jp = f.coeffs.dot(sys.A * f.coeffs) - 2.0 * sys.rhs.dot(f.coeffs) + sys.c0;
    return f;
}

inline CorrectionField solve_local(const OmegaBox& box, const JumpData& jump, const CauchyConfig& cfg) {
    return solve_local(box, assemble_local_system(box, jump, cfg), cfg.basis);
}

/// The three J_P terms for an arbitrary D on the box's quadrature.
template <class D>
JpTerms jp_terms(const OmegaBox& box, const JumpData& jump, const CauchyConfig& cfg, const D& value,
                 const std::function<Vec2(const Vec2&)>& gradient,
                 const std::function<double(const Vec2&)>& laplacian) {
    JpTerms t;
    const double ell = box.ell_c();
    const auto& rule = gauss_rule(cfg.area_points);
    const double area = box.side_u() * box.side_v();
    for (int b = 0; b < rule.size(); ++b)
        for (int a = 0; a < rule.size(); ++a) {
            const Vec2 p = box.global(rule.nodes[static_cast<std::size_t>(a)], rule.nodes[static_cast<std::size_t>(b)]);
            const double w = rule.weights[static_cast<std::size_t>(a)] * rule.weights[static_cast<std::size_t>(b)] * area;
            const double r = laplacian(p) - jump.f_d(p);
            t.area += ell * ell * ell * w * r * r;
        }
    for (const auto& seg : box.segments)
        for (const auto& q : seg.samples) {
            const double rv = value(q.x) - jump.a(q.x);
            const double rn = gradient(q.x).dot(q.normal) - jump.b(q.x, q.normal);
            t.value += cfg.penalty * q.weight * rv * rv;
            t.normal += cfg.penalty * ell * ell * q.weight * rn * rn;
        }
    return t;
}

inline JpTerms jp_terms(const CorrectionField& f, const JumpData& jump, const CauchyConfig& cfg) {
    return jp_terms(
        f.box, jump, cfg, [&f](const Vec2& p) { return f.value(p); },
        [&f](const Vec2& p) { return f.gradient(p); }, [&f](const Vec2& p) { return f.laplacian(p); });
}

inline std::map<NodeId, double> correction_at_nodes(const CorrectionField& f, const Grid& grid,
                                                    const std::vector<NodeId>& nodes) {
    std::map<NodeId, double> out;
    const double tol = 1e-9 * std::min(grid.hx(), grid.hy());
    for (const auto& n : nodes) {
        const Vec2 p = grid.point(n);
        if (!f.box.contains(p, tol)) throw InvalidArgument("node outside the correction box");
        out[n] = f.value(p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Box construction

namespace detail {

// Minimal rectangle with axes rotated by `angle` around the given points.
// Sides are kept above `min_ratio` times the longer side.
inline OmegaBox fit_box(const std::vector<Vec2>& pts, double angle, double min_ratio) {
    const Vec2 u(std::cos(angle), std::sin(angle)), w = perp(u);
    double ulo = std::numeric_limits<double>::infinity(), uhi = -ulo, vlo = ulo, vhi = -ulo;
    for (const auto& p : pts) {
        ulo = std::min(ulo, p.dot(u));
        uhi = std::max(uhi, p.dot(u));
        vlo = std::min(vlo, p.dot(w));
        vhi = std::max(vhi, p.dot(w));
    }
    OmegaBox b;
    b.angle = angle;
    const double floor = min_ratio * std::max(uhi - ulo, vhi - vlo);
    b.half_u = 0.5 * std::max(uhi - ulo, floor);
    b.half_v = 0.5 * std::max(vhi - vlo, floor);
    b.center = 0.5 * (ulo + uhi) * u + 0.5 * (vlo + vhi) * w;
    return b;
}

inline std::vector<Vec2> piece_points(const InterfaceSegment& seg) {
    std::vector<Vec2> pts = seg.outline;
    pts.push_back(seg.start);
    pts.push_back(seg.end);
    for (const auto& s : seg.samples) pts.push_back(s.x);
    return pts;
}

}  // namespace detail

/// Stencil box: [x_i - hx, x_i + hx] x [y_j - hy, y_j + hy].
inline Rect stencil_rect(const Grid& grid, NodeId c, double grow = 1.0) {
    const Vec2 p = grid.point(c);
    return {p.x() - grow * grid.hx(), p.x() + grow * grid.hx(), p.y() - grow * grid.hy(), p.y() + grow * grid.hy()};
}

/// Region searched for the interface piece of a stencil: the box for the
/// 9-point stencil, the diamond through the four arm ends for the 5-point one.
inline Polygon stencil_polygon(const Grid& grid, NodeId c, StencilKind kind, double grow = 1.0) {
    if (kind == StencilKind::NinePoint) return Polygon::from_rect(stencil_rect(grid, c, grow));
    const Vec2 p = grid.point(c);
    const double a = grow * grid.hx(), b = grow * grid.hy();
    return {{{p.x() + a, p.y()}, {p.x(), p.y() + b}, {p.x() - a, p.y()}, {p.x(), p.y() - b}}};
}

/// Box for a stencil-centred strategy, given the interface piece seen by the
/// stencil and the nodes where D is needed.
inline OmegaBox build_omega(OmegaStrategy strategy, const Grid& grid, const Interface& rep, NodeId owner,
                            const InterfaceSegment& piece, const std::vector<NodeId>& d_nodes) {
    if (d_nodes.empty()) throw InvalidArgument("no nodes need a correction");
    const double min_ratio = 0.01;
    OmegaBox box;
    std::vector<Vec2> pts = detail::piece_points(piece);
    for (const auto& n : d_nodes) pts.push_back(grid.point(n));
    switch (strategy) {
        case OmegaStrategy::Naive: {
            const Rect r = stencil_rect(grid, owner);
            for (const auto& p : detail::piece_points(piece))
                if (!r.contains(p, 1e-12)) throw GeometryFailure("interface piece leaves the stencil box");
            box.center = grid.point(owner);
            box.half_u = grid.hx();
            box.half_v = grid.hy();
            break;
        }
        case OmegaStrategy::Compact: box = detail::fit_box(pts, 0.0, min_ratio); break;
        case OmegaStrategy::Free: {
            const double theta = tangent_angle(rep, piece) - std::numbers::pi / 4.0;
            box = detail::fit_box(pts, theta, min_ratio);
            break;
        }
        case OmegaStrategy::NodeCentered:
            throw InvalidArgument("node-centred boxes are built with build_node_omega");
    }
    box.owner = owner;
    box.interface_id = piece.interface_id;
    box.segments = {piece};
    box.d_nodes = d_nodes;
    return box;
}

/// Node-centred square of side 2 sqrt(hx^2 + hy^2) around the closest
/// interface point, diagonals along the tangent and the normal.
inline OmegaBox build_node_omega(const Grid& grid, const Interface& rep, int k, NodeId node, int nq) {
    const Vec2 p = grid.point(node);
    const Vec2 p0 = rep.closest_point(k, p);
    const Vec2 n0 = rep.normal_at(k, p0);
    const double side = 2.0 * std::hypot(grid.hx(), grid.hy());
    OmegaBox box;
    box.center = p0;
    box.half_u = box.half_v = 0.5 * side;
    box.angle = std::atan2(n0.y(), n0.x()) - std::numbers::pi / 4.0;
    box.owner = node;
    box.node_owned = true;
    box.interface_id = k;
    box.d_nodes = {node};
    auto pieces = rep.segments_in(k, box.polygon(), nq);
    if (pieces.empty()) throw GeometryFailure("node-centred box holds no interface piece");
    const auto it = std::min_element(pieces.begin(), pieces.end(), [&](const auto& a, const auto& b) {
        return a.distance_to(p0) < b.distance_to(p0);
    });
    box.segments = {*it};
    return box;
}

// ---------------------------------------------------------------------------
// Driver over all irregular stencils

struct BoxDiagnostics {
    Vec2 center;
    double half_u, half_v, angle, ell_c, condition, jp;
    NodeId owner;
    bool node_owned;
    int interface_id;
    double aspect_ratio() const { return std::max(half_u, half_v) / std::min(half_u, half_v); }
    bool elongated() const { return aspect_ratio() > kElongatedAspect; }
};

inline std::size_t count_elongated(const std::vector<BoxDiagnostics>& boxes) {
    return static_cast<std::size_t>(std::count_if(boxes.begin(), boxes.end(), [](const auto& b) { return b.elongated(); }));
}

inline BoxDiagnostics diagnostics_of(const CorrectionField& f) {
    return {f.box.center, f.box.half_u, f.box.half_v, f.box.angle, f.box.ell_c(), f.condition, f.jp,
            f.box.owner, f.box.node_owned, f.box.interface_id};
}

inline void write_box_diagnostics(std::ostream& os, const std::vector<BoxDiagnostics>& boxes) {
    os << "owner_i,owner_j,node_owned,interface,cx,cy,side_u,side_v,theta_r,ell_c,aspect,elongated,condition,jp\n";
    os.precision(17);
    os << std::scientific;
    for (const auto& b : boxes)
        os << b.owner.i << ',' << b.owner.j << ',' << (b.node_owned ? 1 : 0) << ',' << b.interface_id << ','
           << b.center.x() << ',' << b.center.y() << ',' << 2.0 * b.half_u << ',' << 2.0 * b.half_v << ','
           << b.angle << ',' << b.ell_c << ',' << b.aspect_ratio() << ',' << (b.elongated() ? 1 : 0) << ',' << b.condition << ',' << b.jp << '\n';
}

/// One step of a region path: crossing interface k adds sign * D_k.
struct PathStep {
    int interface_id;
    double sign;
};

/// Interfaces to cross from region `from` to region `to` (shortest path).
/// u_to - u_from = sum sign * D_k.
inline std::vector<PathStep> region_path(const Interface& rep, int from, int to) {
    if (from == to) return {};
    std::map<int, std::pair<int, PathStep>> prev;  // region -> (previous region, step)
    std::queue<int> q;
    q.push(from);
    prev[from] = {from, {-1, 0.0}};
    while (!q.empty()) {
        const int r = q.front();
        q.pop();
        for (int k = 0; k < rep.num_interfaces(); ++k) {
            const auto [mi, pl] = rep.regions(k);
            int next = -1;
            double sign = 0.0;
            if (r == mi) next = pl, sign = 1.0;
            else if (r == pl) next = mi, sign = -1.0;
            if (next < 0 || prev.count(next)) continue;
            prev[next] = {r, {k, sign}};
            q.push(next);
        }
    }
    if (!prev.count(to)) throw GeometryFailure("regions are not connected by interfaces");
    std::vector<PathStep> path;
    for (int r = to; r != from; r = prev[r].first) path.push_back(prev[r].second);
    std::reverse(path.begin(), path.end());
    return path;
}

struct CorrectionSet {
    /// offsets[s][m] = u_centre_region - u_node_region at stencils[s].opposite[m]
    std::vector<std::vector<double>> offsets;
    std::vector<BoxDiagnostics> boxes;
};

inline int thread_cap() {
    if (const char* env = std::getenv("CFM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace detail {

template <class F>
void parallel_for(int n, F&& body) {
    std::exception_ptr err;
    std::mutex m;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4) num_threads(thread_cap())
#endif
    for (int i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(m);
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace detail

/// Solves all local problems needed by the irregular stencils.
inline CorrectionSet compute_corrections(const Grid& grid, const SideMap& sides,
                                         const std::vector<IrregularStencil>& stencils, const Interface& rep,
                                         const std::vector<JumpData>& jumps, const CauchyConfig& cfg) {
    cfg.validate();
    const int ns = static_cast<int>(stencils.size());
    CorrectionSet out;
    out.offsets.resize(stencils.size());
    // paths[s][m]: interfaces crossed from the opposite node to the centre
    std::vector<std::vector<std::vector<PathStep>>> paths(stencils.size());
    std::map<std::pair<int, int>, std::vector<PathStep>> path_cache;
    for (int s = 0; s < ns; ++s) {
        const auto& st = stencils[static_cast<std::size_t>(s)];
        const int rc = sides.at(st.center);
        for (const auto& n : st.opposite) {
            const auto key = std::make_pair(sides.at(n), rc);
            if (!path_cache.count(key)) path_cache[key] = region_path(rep, key.first, key.second);
            paths[static_cast<std::size_t>(s)].push_back(path_cache[key]);
        }
    }

    if (cfg.strategy == OmegaStrategy::NodeCentered) {
        std::set<std::pair<NodeId, int>> needed;
        for (int s = 0; s < ns; ++s)
            for (std::size_t m = 0; m < stencils[static_cast<std::size_t>(s)].opposite.size(); ++m)
                for (const auto& step : paths[static_cast<std::size_t>(s)][m])
                    needed.insert({stencils[static_cast<std::size_t>(s)].opposite[m], step.interface_id});
        const std::vector<std::pair<NodeId, int>> jobs(needed.begin(), needed.end());
        std::vector<double> values(jobs.size());
        std::vector<BoxDiagnostics> diag(jobs.size());
        detail::parallel_for(static_cast<int>(jobs.size()), [&](int j) {
            const auto [node, k] = jobs[static_cast<std::size_t>(j)];
            const auto box = build_node_omega(grid, rep, k, node, cfg.line_points);
            const auto f = solve_local(box, jumps.at(static_cast<std::size_t>(k)), cfg);
            values[static_cast<std::size_t>(j)] = correction_at_nodes(f, grid, {node}).at(node);
            diag[static_cast<std::size_t>(j)] = diagnostics_of(f);
        });
        std::map<std::pair<NodeId, int>, double> d;
        for (std::size_t j = 0; j < jobs.size(); ++j) d[jobs[j]] = values[j];
        for (int s = 0; s < ns; ++s) {
            const auto& st = stencils[static_cast<std::size_t>(s)];
            for (std::size_t m = 0; m < st.opposite.size(); ++m) {
                double off = 0.0;
                for (const auto& step : paths[static_cast<std::size_t>(s)][m])
                    off += step.sign * d.at({st.opposite[m], step.interface_id});
                out.offsets[static_cast<std::size_t>(s)].push_back(off);
            }
        }
        out.boxes = std::move(diag);
        return out;
    }

    std::vector<std::vector<BoxDiagnostics>> diag(stencils.size());
    detail::parallel_for(ns, [&](int s) {
        const auto& st = stencils[static_cast<std::size_t>(s)];
        const auto& sp = paths[static_cast<std::size_t>(s)];
        std::map<int, std::vector<NodeId>> by_interface;
        for (std::size_t m = 0; m < st.opposite.size(); ++m)
            for (const auto& step : sp[m]) {
                auto& v = by_interface[step.interface_id];
                if (std::find(v.begin(), v.end(), st.opposite[m]) == v.end()) v.push_back(st.opposite[m]);
            }
        std::map<std::pair<NodeId, int>, double> d;
        for (const auto& [k, nodes] : by_interface) {
            std::vector<InterfaceSegment> pieces;
            for (double grow = 1.0; pieces.empty() && grow <= 4.0; grow += 1.0)
                pieces = rep.segments_in(k, stencil_polygon(grid, st.center, st.kind, grow), cfg.line_points);
            if (pieces.empty()) throw GeometryFailure("no interface piece near an irregular stencil");
            std::vector<std::vector<NodeId>> assigned(pieces.size());
            for (const auto& n : nodes) {
                const Vec2 p = grid.point(n);
                std::size_t best = 0;
                for (std::size_t q = 1; q < pieces.size(); ++q)
                    if (pieces[q].distance_to(p) < pieces[best].distance_to(p)) best = q;
                assigned[best].push_back(n);
            }
            for (std::size_t q = 0; q < pieces.size(); ++q) {
                if (assigned[q].empty()) continue;
                const auto box = build_omega(cfg.strategy, grid, rep, st.center, pieces[q], assigned[q]);
                const auto f = solve_local(box, jumps.at(static_cast<std::size_t>(k)), cfg);
                for (const auto& [n, v] : correction_at_nodes(f, grid, assigned[q])) d[{n, k}] = v;
                diag[static_cast<std::size_t>(s)].push_back(diagnostics_of(f));
            }
        }
        auto& offs = out.offsets[static_cast<std::size_t>(s)];
        for (std::size_t m = 0; m < st.opposite.size(); ++m) {
            double off = 0.0;
            for (const auto& step : sp[m]) off += step.sign * d.at({st.opposite[m], step.interface_id});
            offs.push_back(off);
        }
    });
    for (auto& v : diag) out.boxes.insert(out.boxes.end(), v.begin(), v.end());
    return out;
}

}  // namespace cfm
