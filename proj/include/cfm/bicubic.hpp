#pragma once

// Hermite cubic basis and cell-based (12 parameter) bicubic interpolation.
//
// Nodal parameters use scaled derivatives: the x-derivative slot stores
// dx * d/dx, the y slot dy * d/dy and the mixed slot dx*dy * d2/dxdy, so all
// sixteen parameters carry the units of the interpolated field.

#include <array>
#include <cmath>
#include <span>

#include "cfm/errors.hpp"
#include "cfm/grid.hpp"

namespace cfm {

namespace detail {

inline double herm_f(double x, int d) {
    switch (d) {
        case 0: return 1.0 - 3.0 * x * x + 2.0 * x * x * x;
        case 1: return -6.0 * x + 6.0 * x * x;
        case 2: return -6.0 + 12.0 * x;
        default: return 12.0;
    }
}

inline double herm_g(double x, int d) {
    switch (d) {
        case 0: return x * (1.0 - x) * (1.0 - x);
        case 1: return 1.0 - 4.0 * x + 3.0 * x * x;
        case 2: return -4.0 + 6.0 * x;
        default: return 6.0;
    }
}

}  // namespace detail

/// d-th derivative (in the unit coordinate) of the Hermite cubic w_alpha^v.
///   w_0^0 = f(x), w_0^1 = f(1-x), w_1^0 = g(x), w_1^1 = -g(1-x)
/// with f(x) = 1 - 3x^2 + 2x^3 and g(x) = x(1-x)^2.
inline double hermite_w(int v, int alpha, double x, int d = 0) {
    const double sign = (d % 2 == 0) ? 1.0 : -1.0;  // chain rule for x -> 1-x
    if (alpha == 0) return v == 0 ? detail::herm_f(x, d) : sign * detail::herm_f(1.0 - x, d);
    return v == 0 ? detail::herm_g(x, d) : -sign * detail::herm_g(1.0 - x, d);
}

/// Corner ordering used throughout: k = v1 + 2*v2, i.e. (0,0),(1,0),(0,1),(1,1).
inline constexpr int corner_index(int v1, int v2) { return v1 + 2 * v2; }

/// Scaled mixed derivatives implied by the 12 cell data.
///
/// The rule selects the unique bicubic whose x^a y^b coefficients vanish for
/// a, b in {2, 3}; the resulting interpolant lives in P3 + {x^3 y, x y^3}
/// and is therefore O(h^4) accurate.
inline std::array<double, 4> cell_mixed_derivatives(std::span<const double, 4> val,
                                                    std::span<const double, 4> sx,
                                                    std::span<const double, 4> sy) {
    const double twist = val[0] - val[1] - val[2] + val[3];
    std::array<double, 4> m{};
    // corner (0,0)
    m[0] = -twist + (sx[2] - sx[0]) + (sy[1] - sy[0]);
    // corner (1,0)
    m[1] = -twist + (sx[3] - sx[1]) + (sy[1] - sy[0]);
    // corner (0,1)
    m[2] = -twist + (sx[2] - sx[0]) + (sy[3] - sy[2]);
    // corner (1,1)
    m[3] = -twist + (sx[3] - sx[1]) + (sy[3] - sy[2]);
    return m;
}

class Bicubic {
public:
    /// params[k][a] with k the corner index and a in {value, x, y, xy} (scaled).
    using Params = std::array<std::array<double, 4>, 4>;

    Bicubic(const Vec2& origin, double dx, double dy, const Params& params)
        : origin_(origin), dx_(dx), dy_(dy), p_(params) {
        if (!(dx > 0.0) || !(dy > 0.0)) throw InvalidArgument("degenerate bicubic cell");
    }

    const Vec2& origin() const { return origin_; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }
    const Params& params() const { return p_; }

    /// d^(ax+ay) H / dx^ax dy^ay at p (physical derivatives).
    double eval(const Vec2& p, int ax = 0, int ay = 0) const {
        if (ax < 0 || ay < 0 || ax > 2 || ay > 2)
            throw InvalidArgument("bicubic derivative order must be in [0,2] per axis");
        const double xb = (p.x() - origin_.x()) / dx_;
        const double yb = (p.y() - origin_.y()) / dy_;
        double s = 0.0;
        for (int v2 = 0; v2 < 2; ++v2)
            for (int v1 = 0; v1 < 2; ++v1) {
                const auto& c = p_[corner_index(v1, v2)];
                const double wx0 = hermite_w(v1, 0, xb, ax), wx1 = hermite_w(v1, 1, xb, ax);
                const double wy0 = hermite_w(v2, 0, yb, ay), wy1 = hermite_w(v2, 1, yb, ay);
                s += c[0] * wx0 * wy0 + c[1] * wx1 * wy0 + c[2] * wx0 * wy1 + c[3] * wx1 * wy1;
            }
        return s / (ipow(dx_, ax) * ipow(dy_, ay));
    }

    double value(const Vec2& p) const { return eval(p); }
    Vec2 gradient(const Vec2& p) const { return {eval(p, 1, 0), eval(p, 0, 1)}; }
    double laplacian(const Vec2& p) const { return eval(p, 2, 0) + eval(p, 0, 2); }

private:
    static double ipow(double b, int e) { return e == 0 ? 1.0 : (e == 1 ? b : b * b); }

    Vec2 origin_;
    double dx_, dy_;
    Params p_;
};

/// Cell-based bicubic from corner values and physical corner gradients.
inline Bicubic bicubic_from_cell_data(const Vec2& origin, double dx, double dy,
                                      std::span<const double, 4> values,
                                      std::span<const Vec2, 4> gradients) {
    if (!(dx > 0.0) || !(dy > 0.0)) throw InvalidArgument("degenerate bicubic cell");
    std::array<double, 4> sx{}, sy{};
    for (int k = 0; k < 4; ++k) {
        sx[k] = dx * gradients[k].x();
        sy[k] = dy * gradients[k].y();
    }
    const auto mixed = cell_mixed_derivatives(values, sx, sy);
    Bicubic::Params p{};
    for (int k = 0; k < 4; ++k) p[k] = {values[k], sx[k], sy[k], mixed[k]};
    return Bicubic(origin, dx, dy, p);
}

/// Derivatives of the 12 cell-based basis functions at unit coordinates
/// (xb, yb) of a dx-by-dy cell. Degrees of freedom are ordered
/// [values(4), scaled d/dx(4), scaled d/dy(4)] by corner index.
inline std::array<double, 12> bicubic12_basis(double xb, double yb, double dx, double dy, int ax,
                                              int ay) {
    std::array<double, 4> wx0{}, wx1{}, wy0{}, wy1{};
    for (int v = 0; v < 2; ++v) {
        wx0[v] = hermite_w(v, 0, xb, ax);
        wx1[v] = hermite_w(v, 1, xb, ax);
        wy0[v] = hermite_w(v, 0, yb, ay);
        wy1[v] = hermite_w(v, 1, yb, ay);
    }
    // Tensor basis values per corner: W00 (value), W10 (x), W01 (y), W11 (mixed).
    std::array<double, 4> w00{}, w10{}, w01{}, w11{};
    for (int v2 = 0; v2 < 2; ++v2)
        for (int v1 = 0; v1 < 2; ++v1) {
            const int k = corner_index(v1, v2);
            w00[k] = wx0[v1] * wy0[v2];
            w10[k] = wx1[v1] * wy0[v2];
            w01[k] = wx0[v1] * wy1[v2];
            w11[k] = wx1[v1] * wy1[v2];
        }
    // Fold the mixed slots through cell_mixed_derivatives (linear in the data):
    //   m0 = -T + (sx2 - sx0) + (sy1 - sy0)      T = v0 - v1 - v2 + v3
    //   m1 = -T + (sx3 - sx1) + (sy1 - sy0)
    //   m2 = -T + (sx2 - sx0) + (sy3 - sy2)
    //   m3 = -T + (sx3 - sx1) + (sy3 - sy2)
    const double msum = w11[0] + w11[1] + w11[2] + w11[3];
    std::array<double, 12> b{};
    b[0] = w00[0] - msum;
    b[1] = w00[1] + msum;
    b[2] = w00[2] + msum;
    b[3] = w00[3] - msum;
    b[4 + 0] = w10[0] - (w11[0] + w11[2]);
    b[4 + 1] = w10[1] - (w11[1] + w11[3]);
    b[4 + 2] = w10[2] + (w11[0] + w11[2]);
    b[4 + 3] = w10[3] + (w11[1] + w11[3]);
    b[8 + 0] = w01[0] - (w11[0] + w11[1]);
    b[8 + 1] = w01[1] + (w11[0] + w11[1]);
    b[8 + 2] = w01[2] - (w11[2] + w11[3]);
    b[8 + 3] = w01[3] + (w11[2] + w11[3]);
    const double scale = 1.0 / (std::pow(dx, ax) * std::pow(dy, ay));
    for (double& v : b) v *= scale;
    return b;
}

}  // namespace cfm
