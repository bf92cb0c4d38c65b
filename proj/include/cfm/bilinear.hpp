#pragma once

// Standard bilinear and modified bilinear interpolants on a rectangle.
//
// The modified bilinear adds -(1/4)[xb(1-xb) dx^2 + yb(1-yb) dy^2] * L to the
// standard one, so its Laplacian is the constant L.

#include <array>

#include "cfm/bicubic.hpp"
#include "cfm/errors.hpp"
#include "cfm/grid.hpp"

namespace cfm {

namespace detail {

// d-th derivative of w^v (v = 0: 1-x, v = 1: x).
inline double lin_w(int v, double x, int d) {
    if (d == 0) return v == 0 ? 1.0 - x : x;
    if (d == 1) return v == 0 ? -1.0 : 1.0;
    return 0.0;
}

// d-th derivative of x(1-x).
inline double bubble(double x, int d) {
    if (d == 0) return x * (1.0 - x);
    if (d == 1) return 1.0 - 2.0 * x;
    return -2.0;
}

inline double ipow(double b, int e) { return e == 0 ? 1.0 : (e == 1 ? b : b * b); }

}  // namespace detail

/// Physical derivatives of the 5 modified-bilinear basis functions at unit
/// coordinates (xb, yb): four corner values (corner_index order) then the mean
/// Laplacian. Dropping the last entry gives the standard bilinear basis.
inline std::array<double, 5> modified_bilinear_basis(double xb, double yb, double dx, double dy,
                                                     int ax, int ay) {
    if (ax < 0 || ay < 0 || ax > 2 || ay > 2)
        throw InvalidArgument("bilinear derivative order must be in [0,2] per axis");
    std::array<double, 5> b{};
    const double scale = 1.0 / (detail::ipow(dx, ax) * detail::ipow(dy, ay));
    for (int v2 = 0; v2 < 2; ++v2)
        for (int v1 = 0; v1 < 2; ++v1)
            b[corner_index(v1, v2)] = detail::lin_w(v1, xb, ax) * detail::lin_w(v2, yb, ay) * scale;
    double q = 0.0;
    if (ay == 0) q += detail::bubble(xb, ax) * dx * dx / detail::ipow(dx, ax);
    if (ax == 0) q += detail::bubble(yb, ay) * dy * dy / detail::ipow(dy, ay);
    b[4] = -0.25 * q;
    return b;
}

class ModifiedBilinear {
public:
    ModifiedBilinear(const Vec2& origin, double dx, double dy, const std::array<double, 4>& corners,
                     double mean_laplacian)
        : origin_(origin), dx_(dx), dy_(dy), corners_(corners), lap_(mean_laplacian) {
        if (!(dx > 0.0) || !(dy > 0.0)) throw InvalidArgument("degenerate bilinear cell");
    }

    double eval(const Vec2& p, int ax = 0, int ay = 0) const {
        const double xb = (p.x() - origin_.x()) / dx_;
        const double yb = (p.y() - origin_.y()) / dy_;
        const auto b = modified_bilinear_basis(xb, yb, dx_, dy_, ax, ay);
        double s = b[4] * lap_;
        for (int k = 0; k < 4; ++k) s += b[k] * corners_[k];
        return s;
    }

    double laplacian(const Vec2& p) const { return eval(p, 2, 0) + eval(p, 0, 2); }
    double mean_laplacian() const { return lap_; }

private:
    Vec2 origin_;
    double dx_, dy_;
    std::array<double, 4> corners_;
    double lap_;
};

inline double modified_bilinear_eval(const ModifiedBilinear& m, const Vec2& p, int ax = 0,
                                     int ay = 0) {
    return m.eval(p, ax, ay);
}

}  // namespace cfm
