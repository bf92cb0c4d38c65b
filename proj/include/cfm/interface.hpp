#pragma once

// Interface representations and geometric queries.
//
// LevelSetField  gradient-augmented level set, bicubic per cell
// AnalyticLevelSet  closed-form implicit curve (mostly for tests)
// ExactCircles  circles with an explicit region topology
//
// Every representation exposes one or more interfaces k, each separating a
// minus region from a plus region, with phi(k, .) > 0 on the plus side.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <utility>
#include <vector>

#include "cfm/bicubic.hpp"
#include "cfm/errors.hpp"
#include "cfm/grid.hpp"
#include "cfm/jet.hpp"
#include "cfm/quadrature.hpp"

namespace cfm {

inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }
inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Convex polygon, vertices counter-clockwise.
struct Polygon {
    std::vector<Vec2> v;

    static Polygon from_rect(const Rect& r) {
        return {{{r.x_lo, r.y_lo}, {r.x_hi, r.y_lo}, {r.x_hi, r.y_hi}, {r.x_lo, r.y_hi}}};
    }
    /// Rectangle with half extents (hu, hv) along axes rotated by `angle`.
    static Polygon rotated_rect(const Vec2& c, double hu, double hv, double angle) {
        const Vec2 u(std::cos(angle), std::sin(angle)), w = perp(u);
        return {{c - hu * u - hv * w, c + hu * u - hv * w, c + hu * u + hv * w, c - hu * u + hv * w}};
    }

    int size() const { return static_cast<int>(v.size()); }
    const Vec2& vertex(int e) const { return v[static_cast<std::size_t>(e % size())]; }

    bool contains(const Vec2& p, double tol = 0.0) const {
        for (int e = 0; e < size(); ++e) {
            const Vec2 d = vertex(e + 1) - vertex(e);
            if (cross2(d, p - vertex(e)) < -tol * d.norm()) return false;
        }
        return true;
    }
    Rect bounds() const {
        Rect r{v[0].x(), v[0].x(), v[0].y(), v[0].y()};
        for (const auto& p : v) {
            r.x_lo = std::min(r.x_lo, p.x());
            r.x_hi = std::max(r.x_hi, p.x());
            r.y_lo = std::min(r.y_lo, p.y());
            r.y_hi = std::max(r.y_hi, p.y());
        }
        return r;
    }
    double diameter() const {
        double d = 0.0;
        for (const auto& a : v)
            for (const auto& b : v) d = std::max(d, (a - b).norm());
        return d;
    }
};

struct InterfaceSample {
    Vec2 x;
    Vec2 normal;  // unit, towards the plus side
    double weight = 0.0;
};

/// One connected piece of an interface inside a box.
struct InterfaceSegment {
    int interface_id = 0;
    int piece = 0;
    std::vector<InterfaceSample> samples;
    Vec2 start = Vec2::Zero(), end = Vec2::Zero();  // chord endpoints
    std::vector<Vec2> outline;                       // dense points on the piece, start to end

    double length() const {
        double s = 0.0;
        for (const auto& q : samples) s += q.weight;
        return s;
    }
    double distance_to(const Vec2& p) const {
        double best = std::numeric_limits<double>::infinity();
        if (outline.size() == 1) return (p - outline[0]).norm();
        for (std::size_t k = 0; k + 1 < outline.size(); ++k) {
            const Vec2 a = outline[k], d = outline[k + 1] - a;
            const double dd = d.squaredNorm();
            const double t = dd > 0.0 ? std::clamp((p - a).dot(d) / dd, 0.0, 1.0) : 0.0;
            best = std::min(best, (p - a - t * d).norm());
        }
        return best;
    }
};

struct RegionPair {
    int minus = kMinus;
    int plus = kPlus;
};

class Interface {
public:
    virtual ~Interface() = default;

    virtual int num_interfaces() const = 0;
    virtual RegionPair regions(int k) const = 0;
    virtual int region_at(const Vec2& p) const = 0;
    virtual double phi(int k, const Vec2& p) const = 0;
    virtual Vec2 grad_phi(int k, const Vec2& p) const = 0;
    /// Length used to space edge scans and curve tracing.
    virtual double feature_scale() const = 0;

    virtual std::vector<InterfaceSegment> segments_in(int k, const Polygon& box, int nq) const;
    virtual Vec2 closest_point(int k, const Vec2& p) const;

    Vec2 normal_at(int k, const Vec2& p) const {
        const Vec2 g = grad_phi(k, p);
        const double n = g.norm();
        if (!(n > 1e-14)) throw GeometryFailure("vanishing level-set gradient");
        return g / n;
    }

    /// All region ids appearing in the topology.
    std::vector<int> region_ids() const {
        std::vector<int> ids;
        for (int k = 0; k < num_interfaces(); ++k) {
            ids.push_back(regions(k).minus);
            ids.push_back(regions(k).plus);
        }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        return ids;
    }
};

namespace detail {

struct EdgeCrossing {
    Vec2 x;
    int edge;
    double t;
};

// Newton projection onto phi = 0 along the gradient.
inline bool project_gradient(const Interface& rep, int k, Vec2& x, double tol, int max_it = 30) {
    for (int it = 0; it < max_it; ++it) {
        const double f = rep.phi(k, x);
        const Vec2 g = rep.grad_phi(k, x);
        const double gg = g.squaredNorm();
        if (!(gg > 0.0)) return false;
        const Vec2 step = f / gg * g;
        x -= step;
        if (step.norm() <= std::max(tol, 1e-15 * (1.0 + x.norm()))) return true;
    }
    return false;
}

inline std::vector<EdgeCrossing> edge_crossings(const Interface& rep, int k, const Polygon& box) {
    std::vector<EdgeCrossing> out;
    const double spacing = 0.25 * rep.feature_scale();
    for (int e = 0; e < box.size(); ++e) {
        const Vec2 a = box.vertex(e), b = box.vertex(e + 1);
        const int n = std::max(4, static_cast<int>(std::ceil((b - a).norm() / spacing)));
        auto at = [&](double t) { return rep.phi(k, a + t * (b - a)); };
        // vertex e belongs to edge e, vertex e+1 to the next edge
        double t0 = 0.0, f0 = at(0.0);
        for (int s = 1; s <= n; ++s) {
            const double t1 = static_cast<double>(s) / n;
            const double f1 = at(t1);
            if ((f0 >= 0.0) != (f1 >= 0.0)) {
                // Illinois false position on [t0, t1]
                double lo = t0, hi = t1, flo = f0, fhi = f1;
                int side = 0;
                for (int it = 0; it < 200 && (hi - lo) * (b - a).norm() > 1e-14 * spacing; ++it) {
                    double m = (lo * fhi - hi * flo) / (fhi - flo);
                    if (!(m > lo && m < hi)) m = 0.5 * (lo + hi);
                    const double fm = at(m);
                    if (fm == 0.0) {
                        lo = hi = m;
                        break;
                    }
                    if ((fm >= 0.0) == (flo >= 0.0)) {
                        lo = m;
                        flo = fm;
                        if (side == -1) fhi *= 0.5;
                        side = -1;
                    } else {
                        hi = m;
                        fhi = fm;
                        if (side == 1) flo *= 0.5;
                        side = 1;
                    }
                }
                const double tr = 0.5 * (lo + hi);
                out.push_back({a + tr * (b - a), e, tr});
            }
            t0 = t1;
            f0 = f1;
        }
    }
    return out;
}

// Marches along the curve from crossing `from` until it leaves the box.
// Returns the index of the exit crossing and fills the outline.
inline int trace_piece(const Interface& rep, int k, const Polygon& box,
                       const std::vector<EdgeCrossing>& xs, int from, const std::vector<bool>& used,
                       std::vector<Vec2>& outline) {
    const double scale = rep.feature_scale();
    const double step = std::min(scale / 8.0, box.diameter() / 16.0);
    const double ptol = 1e-13 * scale;
    Vec2 p = xs[static_cast<std::size_t>(from)].x;
    const int e = xs[static_cast<std::size_t>(from)].edge;
    const Vec2 inward = perp(box.vertex(e + 1) - box.vertex(e)).normalized();
    Vec2 t = perp(rep.normal_at(k, p));
    if (t.dot(inward) < 0.0) t = -t;
    outline.assign(1, p);
    const int max_steps = static_cast<int>(64.0 * box.diameter() / step) + 64;
    for (int s = 0; s < max_steps; ++s) {
        Vec2 q = p + step * t;
        if (!project_gradient(rep, k, q, ptol)) throw GeometryFailure("curve tracing lost the interface");
        if (!box.contains(q)) {
            // exit: nearest unused crossing to the segment p-q
            int best = -1;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < xs.size(); ++c) {
                if (static_cast<int>(c) == from || used[c]) continue;
                const Vec2 d = q - p;
                const double tt = std::clamp((xs[c].x - p).dot(d) / d.squaredNorm(), 0.0, 1.0);
                const double dist = (xs[c].x - p - tt * d).norm();
                if (dist < bd) {
                    bd = dist;
                    best = static_cast<int>(c);
                }
            }
            if (best < 0 || bd > 2.0 * step) throw GeometryFailure("curve tracing found no exit crossing");
            outline.push_back(xs[static_cast<std::size_t>(best)].x);
            return best;
        }
        Vec2 tn = perp(rep.normal_at(k, q));
        if (tn.dot(t) < 0.0) tn = -tn;
        outline.push_back(q);
        p = q;
        t = tn;
    }
    throw GeometryFailure("curve tracing did not leave the box");
}

// Gauss samples on the curve piece between a and b (both on the curve),
// obtained by projecting chord points along the chord normal.
inline void chord_samples(const Interface& rep, int k, const Vec2& a, const Vec2& b,
                          const std::vector<Vec2>& outline, int nq, int depth,
                          std::vector<InterfaceSample>& out) {
    const Vec2 d = b - a;
    const double len = d.norm();
    const double scale = rep.feature_scale();
    const auto& rule = gauss_rule(nq);
    if (len <= 1e-12 * scale) return;  // piece clipped at a box corner
    std::vector<InterfaceSample> local;
    bool ok = true;
    double t = 0.0;
    const Vec2 nc = perp(d) / len;
    for (int q = 0; ok && q < nq; ++q) {
        const Vec2 base = a + rule.nodes[static_cast<std::size_t>(q)] * d;
        bool conv = false;
        for (int it = 0; it < 40; ++it) {
            const Vec2 x = base + t * nc;
            const Vec2 g = rep.grad_phi(k, x);
            const double gn = g.dot(nc);
            if (std::abs(gn) < 0.2 * g.norm()) break;
            const double dt = rep.phi(k, x) / gn;
            t -= dt;
            if (std::abs(t) > 0.75 * len) break;
            if (std::abs(dt) <= 1e-13 * scale) {
                conv = true;
                break;
            }
        }
        if (!conv) {
            ok = false;
            break;
        }
        const Vec2 x = base + t * nc;
        const Vec2 g = rep.grad_phi(k, x);
        const double tp = -g.dot(d) / g.dot(nc);
        local.push_back({x, g.normalized(), rule.weights[static_cast<std::size_t>(q)] * std::sqrt(len * len + tp * tp)});
    }
    if (ok) {
        out.insert(out.end(), local.begin(), local.end());
        return;
    }
    if (depth >= 10 || outline.size() < 3) throw GeometryFailure("interface quadrature projection failed");
    // split at the arc-length midpoint of the outline
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < outline.size(); ++i) total += (outline[i + 1] - outline[i]).norm();
    double acc = 0.0;
    std::size_t mid = 1;
    for (; mid + 1 < outline.size(); ++mid) {
        acc += (outline[mid] - outline[mid - 1]).norm();
        if (acc >= 0.5 * total) break;
    }
    Vec2 m = outline[mid];
    if (!project_gradient(rep, k, m, 1e-13 * scale)) throw GeometryFailure("interface midpoint projection failed");
    std::vector<Vec2> left(outline.begin(), outline.begin() + static_cast<std::ptrdiff_t>(mid) + 1);
    std::vector<Vec2> right(outline.begin() + static_cast<std::ptrdiff_t>(mid), outline.end());
    left.back() = m;
    right.front() = m;
    chord_samples(rep, k, a, m, left, nq, depth + 1, out);
    chord_samples(rep, k, m, b, right, nq, depth + 1, out);
}

}  // namespace detail

/// Pieces of an implicit interface inside a convex polygon.
// Pieces are found from boundary crossings; a closed loop wholly inside the box is missed.
inline std::vector<InterfaceSegment> implicit_segments(const Interface& rep, int k, const Polygon& box,
                                                       int nq) {
    auto xs = detail::edge_crossings(rep, k, box);
    // two crossings almost on top of each other on one edge: tangential touch
    for (std::size_t c = 0; c + 1 < xs.size();) {
        if (xs[c].edge == xs[c + 1].edge && (xs[c].x - xs[c + 1].x).norm() < 1e-4 * rep.feature_scale())
            xs.erase(xs.begin() + static_cast<std::ptrdiff_t>(c), xs.begin() + static_cast<std::ptrdiff_t>(c) + 2);
        else
            ++c;
    }
    if (xs.empty()) return {};
    if (xs.size() % 2 != 0) throw GeometryFailure("odd number of interface crossings on box boundary");
    std::vector<bool> used(xs.size(), false);
    std::vector<InterfaceSegment> out;
    for (std::size_t c = 0; c < xs.size(); ++c) {
        if (used[c]) continue;
        InterfaceSegment seg;
        seg.interface_id = k;
        seg.piece = static_cast<int>(out.size());
        const int other = detail::trace_piece(rep, k, box, xs, static_cast<int>(c), used, seg.outline);
        used[c] = used[static_cast<std::size_t>(other)] = true;
        seg.start = xs[c].x;
        seg.end = xs[static_cast<std::size_t>(other)].x;
        detail::chord_samples(rep, k, seg.start, seg.end, seg.outline, nq, 0, seg.samples);
        if (!seg.samples.empty()) out.push_back(std::move(seg));
    }
    return out;
}

inline std::vector<InterfaceSegment> Interface::segments_in(int k, const Polygon& box, int nq) const {
    return implicit_segments(*this, k, box, nq);
}

/// Closest point on interface k: alternate projection onto the curve and
/// tangential correction until (p - x) is parallel to the normal.
inline Vec2 Interface::closest_point(int k, const Vec2& p) const {
    const double scale = feature_scale();
    Vec2 x = p;
    double omega = 1.0, last = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        if (!detail::project_gradient(*this, k, x, 1e-14 * scale))
            throw GeometryFailure("closest-point projection failed");
        const Vec2 t = perp(normal_at(k, x));
        const double delta = (p - x).dot(t);
        if (std::abs(delta) <= 1e-12 * std::max(scale, (p - x).norm())) {
            detail::project_gradient(*this, k, x, 1e-14 * scale);
            return x;
        }
        // overshoot on curved pieces far from p
        if (std::abs(delta) >= last) omega *= 0.5;
        last = std::abs(delta);
        x += omega * delta * t;
    }
    throw GeometryFailure("closest-point iteration did not converge");
}

/// Gradient-augmented level set: nodal phi and grad phi, bicubic per cell.
/// Single interface: region kMinus where phi < 0, kPlus where phi >= 0.
class LevelSetField : public Interface {
public:
    LevelSetField(const Grid& grid, std::vector<double> phi, std::vector<Vec2> grad)
        : grid_(grid), phi_(std::move(phi)), grad_(std::move(grad)) {
        if (phi_.size() != grid.size() || grad_.size() != grid.size())
            throw InvalidArgument("level-set data size mismatch");
        cells_.reserve(static_cast<std::size_t>(grid.nx() - 1) * (grid.ny() - 1));
        for (int j = 0; j + 1 < grid.ny(); ++j)
            for (int i = 0; i + 1 < grid.nx(); ++i) {
                std::array<double, 4> v{};
                std::array<Vec2, 4> g;
                for (int v2 = 0; v2 < 2; ++v2)
                    for (int v1 = 0; v1 < 2; ++v1) {
                        const auto idx = grid.index(i + v1, j + v2);
                        v[corner_index(v1, v2)] = phi_[idx];
                        g[corner_index(v1, v2)] = grad_[idx];
                    }
                cells_.push_back(bicubic_from_cell_data(grid.point(i, j), grid.hx(), grid.hy(), v, g));
            }
    }

    const Grid& grid() const { return grid_; }
    double node_phi(int i, int j) const { return phi_[grid_.index(i, j)]; }
    const Vec2& node_grad(int i, int j) const { return grad_[grid_.index(i, j)]; }
    const Bicubic& cell(const Vec2& p) const {
        const NodeId c = grid_.cell_of(p);
        return cells_[static_cast<std::size_t>(c.j) * (grid_.nx() - 1) + c.i];
    }

    int num_interfaces() const override { return 1; }
    RegionPair regions(int) const override { return {kMinus, kPlus}; }
    int region_at(const Vec2& p) const override { return phi(0, p) >= 0.0 ? kPlus : kMinus; }
    double phi(int, const Vec2& p) const override { return cell(p).eval(p); }
    Vec2 grad_phi(int, const Vec2& p) const override { return cell(p).gradient(p); }
    double feature_scale() const override { return std::min(grid_.hx(), grid_.hy()); }

    /// Node labels straight from the nodal samples.
    SideMap classify(const Grid& g) const {
        if (g.nx() != grid_.nx() || g.ny() != grid_.ny()) return classify_nodes(g, [this](const Vec2& p) { return region_at(p); });
        std::vector<int> labels(g.size());
        for (std::size_t n = 0; n < labels.size(); ++n) labels[n] = phi_[n] >= 0.0 ? kPlus : kMinus;
        return SideMap(g, std::move(labels));
    }

private:
    Grid grid_;
    std::vector<double> phi_;
    std::vector<Vec2> grad_;
    std::vector<Bicubic> cells_;
};

inline LevelSetField levelset_from_analytic(const AnalyticField& formula, const Grid& grid) {
    std::vector<double> phi(grid.size());
    std::vector<Vec2> grad(grid.size());
    for (int j = 0; j < grid.ny(); ++j)
        for (int i = 0; i < grid.nx(); ++i) {
            const Jet2 v = formula(grid.point(i, j));
            phi[grid.index(i, j)] = v.v;
            grad[grid.index(i, j)] = v.grad();
        }
    return LevelSetField(grid, std::move(phi), std::move(grad));
}

/// Implicit interface evaluated straight from a formula.
class AnalyticLevelSet : public Interface {
public:
    AnalyticLevelSet(AnalyticField f, double scale) : f_(std::move(f)), scale_(scale) {}

    int num_interfaces() const override { return 1; }
    RegionPair regions(int) const override { return {kMinus, kPlus}; }
    int region_at(const Vec2& p) const override { return phi(0, p) >= 0.0 ? kPlus : kMinus; }
    double phi(int, const Vec2& p) const override { return f_(p).v; }
    Vec2 grad_phi(int, const Vec2& p) const override { return f_(p).grad(); }
    double feature_scale() const override { return scale_; }

private:
    AnalyticField f_;
    double scale_;
};

struct Circle {
    Vec2 center;
    double radius;
    int minus_region;
    int plus_region;
    bool plus_outside;  // phi = +-(|p - c| - r)
};

/// Circles with explicit topology: the first (circle, region) entry whose
/// circle contains p decides the region, otherwise `default_region`.
class ExactCircles : public Interface {
public:
    ExactCircles(std::vector<Circle> circles, std::vector<std::pair<int, int>> inside_rules,
                 int default_region, double scale = 1.0 / 64.0)
        : circles_(std::move(circles)), rules_(std::move(inside_rules)),
          default_region_(default_region), scale_(scale) {
        for (const auto& c : circles_)
            if (!(c.radius > 0.0)) throw InvalidArgument("circle radius must be positive");
    }

    const std::vector<Circle>& circles() const { return circles_; }

    int num_interfaces() const override { return static_cast<int>(circles_.size()); }
    RegionPair regions(int k) const override {
        const auto& c = circles_.at(static_cast<std::size_t>(k));
        return {c.minus_region, c.plus_region};
    }
    int region_at(const Vec2& p) const override {
        for (auto [ci, region] : rules_) {
            const auto& c = circles_[static_cast<std::size_t>(ci)];
            if ((p - c.center).norm() < c.radius) return region;
        }
        return default_region_;
    }
    double phi(int k, const Vec2& p) const override {
        const auto& c = circles_.at(static_cast<std::size_t>(k));
        const double d = (p - c.center).norm() - c.radius;
        return c.plus_outside ? d : -d;
    }
    Vec2 grad_phi(int k, const Vec2& p) const override {
        const auto& c = circles_.at(static_cast<std::size_t>(k));
        const Vec2 r = p - c.center;
        const double n = r.norm();
        if (!(n > 0.0)) throw GeometryFailure("gradient undefined at circle centre");
        return (c.plus_outside ? 1.0 : -1.0) * r / n;
    }
    double feature_scale() const override { return scale_; }

    Vec2 closest_point(int k, const Vec2& p) const override {
        const auto& c = circles_.at(static_cast<std::size_t>(k));
        const Vec2 r = p - c.center;
        if (!(r.norm() > 0.0)) throw GeometryFailure("closest point undefined at circle centre");
        return c.center + c.radius * r / r.norm();
    }

    std::vector<InterfaceSegment> segments_in(int k, const Polygon& box, int nq) const override {
        const auto& c = circles_.at(static_cast<std::size_t>(k));
        const double two_pi = 2.0 * std::numbers::pi;
        std::vector<double> ang;
        for (int e = 0; e < box.size(); ++e) {
            const Vec2 a = box.vertex(e), d = box.vertex(e + 1) - a;
            const Vec2 f = a - c.center;
            const double qa = d.squaredNorm(), qb = 2.0 * f.dot(d), qc = f.squaredNorm() - c.radius * c.radius;
            const double disc = qb * qb - 4.0 * qa * qc;
            if (!(disc > 0.0)) continue;
            const double sq = std::sqrt(disc);
            for (double t : {(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)}) {
                if (t < 0.0 || t >= 1.0) continue;
                const Vec2 x = a + t * d - c.center;
                double th = std::atan2(x.y(), x.x());
                if (th < 0.0) th += two_pi;
                ang.push_back(th);
            }
        }
        std::sort(ang.begin(), ang.end());
        ang.erase(std::unique(ang.begin(), ang.end(),
                              [](double p, double q) { return std::abs(p - q) < 1e-14; }),
                  ang.end());
        auto on = [&](double th) { return Vec2(c.center + c.radius * Vec2(std::cos(th), std::sin(th))); };
        std::vector<std::pair<double, double>> arcs;
        if (ang.empty()) {
            if (box.contains(on(0.0))) arcs.push_back({0.0, two_pi});
        } else {
            for (std::size_t i = 0; i < ang.size(); ++i) {
                const double t0 = ang[i];
                const double t1 = i + 1 < ang.size() ? ang[i + 1] : ang[0] + two_pi;
                if (box.contains(on(0.5 * (t0 + t1)))) arcs.push_back({t0, t1});
            }
        }
        std::vector<InterfaceSegment> out;
        const auto& rule = gauss_rule(nq);
        const double sgn = c.plus_outside ? 1.0 : -1.0;
        for (auto [t0, t1] : arcs) {
            InterfaceSegment seg;
            seg.interface_id = k;
            seg.piece = static_cast<int>(out.size());
            seg.start = on(t0);
            seg.end = on(t1);
            for (int q = 0; q < nq; ++q) {
                const double th = t0 + rule.nodes[static_cast<std::size_t>(q)] * (t1 - t0);
                const Vec2 x = on(th);
                seg.samples.push_back({x, sgn * (x - c.center) / c.radius,
                                       rule.weights[static_cast<std::size_t>(q)] * c.radius * (t1 - t0)});
            }
            const int m = 64;
            for (int s = 0; s <= m; ++s) seg.outline.push_back(on(t0 + (t1 - t0) * s / m));
            out.push_back(std::move(seg));
        }
        return out;
    }

private:
    std::vector<Circle> circles_;
    std::vector<std::pair<int, int>> rules_;
    int default_region_;
    double scale_;
};

inline int side_of(const Interface& rep, const Vec2& p) { return rep.region_at(p); }

inline std::vector<InterfaceSegment> interface_in_box(const Interface& rep, int k, const Polygon& box,
                                                      int nq) {
    return rep.segments_in(k, box, nq);
}
inline std::vector<InterfaceSegment> interface_in_box(const Interface& rep, int k, const Rect& box,
                                                      int nq) {
    return rep.segments_in(k, Polygon::from_rect(box), nq);
}

inline Vec2 normal_at(const Interface& rep, int k, const Vec2& p) { return rep.normal_at(k, p); }
inline Vec2 closest_interface_point(const Interface& rep, int k, const Vec2& p) {
    return rep.closest_point(k, p);
}

/// Arc-length midpoint of a segment, taken on its outline and put back on the curve.
inline Vec2 segment_midpoint(const Interface& rep, const InterfaceSegment& seg) {
    const auto& o = seg.outline;
    if (o.size() < 2) return seg.start;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < o.size(); ++i) total += (o[i + 1] - o[i]).norm();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < o.size(); ++i) {
        const double l = (o[i + 1] - o[i]).norm();
        if (acc + l >= 0.5 * total && l > 0.0) {
            Vec2 m = o[i] + (0.5 * total - acc) / l * (o[i + 1] - o[i]);
            detail::project_gradient(rep, seg.interface_id, m, 1e-14 * rep.feature_scale());
            return m;
        }
        acc += l;
    }
    return o.back();
}

/// Tangent direction angle in (-pi/2, pi/2] at the segment's arc-length midpoint.
inline double tangent_angle(const Interface& rep, const InterfaceSegment& seg) {
    const Vec2 t = perp(rep.normal_at(seg.interface_id, segment_midpoint(rep, seg)));
    double th = std::atan2(t.y(), t.x());
    if (th <= -std::numbers::pi / 2) th += std::numbers::pi;
    if (th > std::numbers::pi / 2) th -= std::numbers::pi;
    return th;
}

/// Tangent angle of the longest piece of interface k inside `box`.
inline double tangent_angle(const Interface& rep, int k, const Polygon& box, int nq = 6) {
    const auto segs = rep.segments_in(k, box, nq);
    if (segs.empty()) throw InvalidArgument("no interface segment inside the box");
    const auto it = std::max_element(segs.begin(), segs.end(), [](const auto& a, const auto& b) {
        return a.length() < b.length();
    });
    return tangent_angle(rep, *it);
}

}  // namespace cfm
