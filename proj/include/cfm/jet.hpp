#pragma once

// Second-order forward-mode jets in two variables.
//
// Analytic case data (sources, exact solutions, level sets) is written once as
// a template over the scalar type and evaluated on Jet2 to obtain exact first
// and second partial derivatives.

#include <cmath>
#include <functional>

#include "cfm/grid.hpp"

namespace cfm {

struct Jet2 {
    double v = 0.0;
    double dx = 0.0, dy = 0.0;
    double dxx = 0.0, dxy = 0.0, dyy = 0.0;

    Jet2() = default;
    Jet2(double c) : v(c) {}  // NOLINT(google-explicit-constructor): constants mix freely
    Jet2(double v_, double dx_, double dy_, double dxx_, double dxy_, double dyy_)
        : v(v_), dx(dx_), dy(dy_), dxx(dxx_), dxy(dxy_), dyy(dyy_) {}

    static Jet2 var_x(double x) { return {x, 1.0, 0.0, 0.0, 0.0, 0.0}; }
    static Jet2 var_y(double y) { return {y, 0.0, 1.0, 0.0, 0.0, 0.0}; }

    Vec2 grad() const { return {dx, dy}; }
    double laplacian() const { return dxx + dyy; }
};

namespace detail {

// Chain rule for a scalar function with derivatives (f0, f1, f2) at u.v.
inline Jet2 chain(const Jet2& u, double f0, double f1, double f2) {
    return {f0,
            f1 * u.dx,
            f1 * u.dy,
            f2 * u.dx * u.dx + f1 * u.dxx,
            f2 * u.dx * u.dy + f1 * u.dxy,
            f2 * u.dy * u.dy + f1 * u.dyy};
}

}  // namespace detail

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    return {a.v + b.v, a.dx + b.dx, a.dy + b.dy, a.dxx + b.dxx, a.dxy + b.dxy, a.dyy + b.dyy};
}
inline Jet2 operator-(const Jet2& a, const Jet2& b) {
    return {a.v - b.v, a.dx - b.dx, a.dy - b.dy, a.dxx - b.dxx, a.dxy - b.dxy, a.dyy - b.dyy};
}
inline Jet2 operator-(const Jet2& a) { return {-a.v, -a.dx, -a.dy, -a.dxx, -a.dxy, -a.dyy}; }
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    return {a.v * b.v,
            a.dx * b.v + a.v * b.dx,
            a.dy * b.v + a.v * b.dy,
            a.dxx * b.v + 2.0 * a.dx * b.dx + a.v * b.dxx,
            a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
            a.dyy * b.v + 2.0 * a.dy * b.dy + a.v * b.dyy};
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) {
    const double iv = 1.0 / b.v;
    return a * detail::chain(b, iv, -iv * iv, 2.0 * iv * iv * iv);
}
inline Jet2& operator+=(Jet2& a, const Jet2& b) { return a = a + b; }
inline Jet2& operator-=(Jet2& a, const Jet2& b) { return a = a - b; }
inline Jet2& operator*=(Jet2& a, const Jet2& b) { return a = a * b; }

inline Jet2 sin(const Jet2& u) {
    const double s = std::sin(u.v), c = std::cos(u.v);
    return detail::chain(u, s, c, -s);
}
inline Jet2 cos(const Jet2& u) {
    const double s = std::sin(u.v), c = std::cos(u.v);
    return detail::chain(u, c, -s, -c);
}
inline Jet2 exp(const Jet2& u) {
    const double e = std::exp(u.v);
    return detail::chain(u, e, e, e);
}
inline Jet2 log(const Jet2& u) {
    const double iv = 1.0 / u.v;
    return detail::chain(u, std::log(u.v), iv, -iv * iv);
}
inline Jet2 sqrt(const Jet2& u) {
    const double s = std::sqrt(u.v);
    return detail::chain(u, s, 0.5 / s, -0.25 / (s * u.v));
}

/// atan2 on jets; undefined (gradient blows up) at the origin.
inline Jet2 atan2(const Jet2& y, const Jet2& x) {
    const double r2 = x.v * x.v + y.v * y.v;
    const double r4 = r2 * r2;
    const double ty = x.v / r2, tx = -y.v / r2;  // d theta / dy, d theta / dx
    const double tyy = -2.0 * x.v * y.v / r4, txx = 2.0 * x.v * y.v / r4;
    const double txy = (y.v * y.v - x.v * x.v) / r4;
    Jet2 out;
    out.v = std::atan2(y.v, x.v);
    out.dx = tx * x.dx + ty * y.dx;
    out.dy = tx * x.dy + ty * y.dy;
    auto hess = [&](double xa, double xb, double ya, double yb, double xab, double yab) {
        return txx * xa * xb + txy * (xa * yb + ya * xb) + tyy * ya * yb + tx * xab + ty * yab;
    };
    out.dxx = hess(x.dx, x.dx, y.dx, y.dx, x.dxx, y.dxx);
    out.dxy = hess(x.dx, x.dy, y.dx, y.dy, x.dxy, y.dxy);
    out.dyy = hess(x.dy, x.dy, y.dy, y.dy, x.dyy, y.dyy);
    return out;
}

/// Analytic scalar field: returns value and partials up to second order.
using AnalyticField = std::function<Jet2(const Vec2&)>;

/// Wraps a generic lambda `[](auto x, auto y) { ... }` as an AnalyticField.
template <class F>
AnalyticField make_field(F f) {
    return [f](const Vec2& p) { return f(Jet2::var_x(p.x()), Jet2::var_y(p.y())); };
}

}  // namespace cfm
