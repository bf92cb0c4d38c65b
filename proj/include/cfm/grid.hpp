#pragma once

// Uniform node-centred grid, node side labels and irregular stencil discovery.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "cfm/errors.hpp"

namespace cfm {

using Vec2 = Eigen::Vector2d;

struct Rect {
    double x_lo = 0.0, x_hi = 1.0;
    double y_lo = 0.0, y_hi = 1.0;

    double width() const { return x_hi - x_lo; }
    double height() const { return y_hi - y_lo; }
    bool contains(const Vec2& p, double tol = 0.0) const {
        return p.x() >= x_lo - tol && p.x() <= x_hi + tol && p.y() >= y_lo - tol &&
               p.y() <= y_hi + tol;
    }
};

struct NodeId {
    int i = 0;
    int j = 0;
    friend bool operator==(const NodeId&, const NodeId&) = default;
    friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

class Grid {
public:
    Grid(int nx, int ny, const Rect& domain) : nx_(nx), ny_(ny), domain_(domain) {
        if (nx < 3 || ny < 3) throw InvalidArgument("grid needs at least 3 nodes per axis");
        if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
            throw InvalidArgument("degenerate grid domain");
        hx_ = domain.width() / (nx - 1);
        hy_ = domain.height() / (ny - 1);
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    const Rect& domain() const { return domain_; }
    std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

    double x(int i) const { return domain_.x_lo + i * hx_; }
    double y(int j) const { return domain_.y_lo + j * hy_; }
    Vec2 point(int i, int j) const { return {x(i), y(j)}; }
    Vec2 point(NodeId n) const { return point(n.i, n.j); }

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
    std::size_t index(NodeId n) const { return index(n.i, n.j); }

    bool is_boundary(int i, int j) const {
        return i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1;
    }
    bool is_boundary(NodeId n) const { return is_boundary(n.i, n.j); }

    /// Cell (lower-left node index) containing p, clamped to the grid.
    NodeId cell_of(const Vec2& p) const {
        auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };
        int ci = static_cast<int>(std::floor((p.x() - domain_.x_lo) / hx_));
        int cj = static_cast<int>(std::floor((p.y() - domain_.y_lo) / hy_));
        return {clampi(ci, 0, nx_ - 2), clampi(cj, 0, ny_ - 2)};
    }

private:
    int nx_, ny_;
    Rect domain_;
    double hx_ = 0.0, hy_ = 0.0;
};

inline Grid create_grid(int nx, int ny, const Rect& domain) { return Grid(nx, ny, domain); }

/// Region label per node. Two-sided problems use kMinus/kPlus; multi-region
/// problems use arbitrary small non-negative ids.
inline constexpr int kMinus = 0;
inline constexpr int kPlus = 1;

class SideMap {
public:
    SideMap() = default;
    SideMap(const Grid& grid, std::vector<int> labels) : nx_(grid.nx()), labels_(std::move(labels)) {
        if (labels_.size() != grid.size()) throw InvalidArgument("side map size mismatch");
    }

    int at(int i, int j) const { return labels_[static_cast<std::size_t>(j) * nx_ + i]; }
    int at(NodeId n) const { return at(n.i, n.j); }
    const std::vector<int>& labels() const { return labels_; }

private:
    int nx_ = 0;
    std::vector<int> labels_;
};

/// Labels every node with `region_at(point)`. For a level set the caller's
/// region function implements the tie-break phi = 0 -> Plus.
inline SideMap classify_nodes(const Grid& grid, const std::function<int(const Vec2&)>& region_at) {
    std::vector<int> labels(grid.size());
    for (int j = 0; j < grid.ny(); ++j)
        for (int i = 0; i < grid.nx(); ++i) labels[grid.index(i, j)] = region_at(grid.point(i, j));
    return SideMap(grid, std::move(labels));
}

enum class StencilKind { NinePoint, FivePoint };

/// Offsets of the non-centre stencil nodes.
inline std::vector<std::array<int, 2>> stencil_offsets(StencilKind kind) {
    if (kind == StencilKind::FivePoint) return {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
}

struct IrregularStencil {
    NodeId center;
    StencilKind kind = StencilKind::NinePoint;
    std::vector<NodeId> opposite;  // stencil nodes whose region differs from the centre's
};

/// Every interior node whose stencil contains a node of another region, in
/// row-major order of the centre.
inline std::vector<IrregularStencil> irregular_stencils(const Grid& grid, const SideMap& sides,
                                                        StencilKind kind) {
    std::vector<IrregularStencil> out;
    const auto offsets = stencil_offsets(kind);
    for (int j = 1; j < grid.ny() - 1; ++j) {
        for (int i = 1; i < grid.nx() - 1; ++i) {
            const int c = sides.at(i, j);
            IrregularStencil st{{i, j}, kind, {}};
            for (auto [di, dj] : offsets)
                if (sides.at(i + di, j + dj) != c) st.opposite.push_back({i + di, j + dj});
            if (!st.opposite.empty()) out.push_back(std::move(st));
        }
    }
    return out;
}

}  // namespace cfm
