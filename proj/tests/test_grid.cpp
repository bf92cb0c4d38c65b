#include <gtest/gtest.h>

#include <set>

#include "cfm/cases.hpp"
#include "cfm/grid.hpp"
#include "cfm/interface.hpp"

using namespace cfm;

namespace {

std::shared_ptr<const Interface> circle_ls(const Grid& g, double cx, double cy, double r) {
    return std::make_shared<LevelSetField>(levelset_from_analytic(
        make_field([=](auto x, auto y) { return (x - cx) * (x - cx) + (y - cy) * (y - cy) - r * r; }), g));
}

// brute force: every interior node with an opposite-side neighbour
std::set<std::pair<int, int>> brute_irregular(const Grid& g, const SideMap& s, StencilKind kind) {
    std::set<std::pair<int, int>> out;
    for (int j = 1; j < g.ny() - 1; ++j)
        for (int i = 1; i < g.nx() - 1; ++i)
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (kind == StencilKind::FivePoint && di != 0 && dj != 0) continue;
                    if (s.at(i + di, j + dj) != s.at(i, j)) out.insert({i, j});
                }
    return out;
}

}  // namespace

TEST(Grid, SpacingsAndCoordinates) {
    const Grid g = create_grid(3, 3, {0, 1, 0, 1});
    EXPECT_DOUBLE_EQ(g.hx(), 0.5);
    EXPECT_DOUBLE_EQ(g.hy(), 0.5);
    EXPECT_DOUBLE_EQ(g.point(2, 2).x(), 1.0);
    EXPECT_DOUBLE_EQ(g.point(2, 2).y(), 1.0);
    EXPECT_DOUBLE_EQ(create_grid(193, 193, {0, 1, 0, 1}).hx(), 1.0 / 192);
    EXPECT_DOUBLE_EQ(create_grid(161, 161, {-1, 1, -1, 1}).hx(), 0.0125);
}

TEST(Grid, RejectsDegenerateInput) {
    EXPECT_THROW(create_grid(2, 5, {0, 1, 0, 1}), InvalidArgument);
    EXPECT_THROW(create_grid(5, 5, {0, 0, 0, 1}), InvalidArgument);
    EXPECT_THROW(create_grid(5, 5, {0, 1, 1, 0}), InvalidArgument);
}

TEST(Grid, ClassifyCircle) {
    const Grid g = create_grid(11, 11, {0, 1, 0, 1});
    const auto rep = circle_ls(g, 0.5, 0.5, 0.1);
    const SideMap s = classify_nodes(g, *rep);
    EXPECT_EQ(s.at(5, 5), kMinus);  // phi = -0.01
    EXPECT_EQ(s.at(9, 5), kPlus);   // phi = 0.15
}

TEST(Grid, TieBreakOnInterfaceIsPlus) {
    const Grid g = create_grid(5, 5, {0, 1, 0, 1});
    const LevelSetField ls = levelset_from_analytic(make_field([](auto, auto y) { return y - 0.5; }), g);
    const SideMap s = classify_nodes(g, ls);
    for (int i = 0; i < 5; ++i) {
        EXPECT_EQ(s.at(i, 2), kPlus);
        EXPECT_EQ(s.at(i, 1), kMinus);
    }
}

TEST(Grid, FlatInterfaceStencils) {
    const Grid g = create_grid(5, 5, {0, 1, 0, 1});
    const LevelSetField ls = levelset_from_analytic(make_field([](auto, auto y) { return y - 0.45; }), g);
    const SideMap s = classify_nodes(g, ls);
    const auto st = irregular_stencils(g, s, StencilKind::NinePoint);
    ASSERT_EQ(st.size(), 6u);
    for (const auto& x : st) {
        EXPECT_TRUE(x.center.j == 1 || x.center.j == 2);
        EXPECT_GE(x.center.i, 1);
        EXPECT_LE(x.center.i, 3);
        EXPECT_EQ(x.opposite.size(), 3u);
        for (const auto& n : x.opposite) EXPECT_NE(s.at(n), s.at(x.center));
    }
}

TEST(Grid, NoInterfaceNoStencils) {
    const Grid g = create_grid(9, 9, {0, 1, 0, 1});
    const LevelSetField ls = levelset_from_analytic(make_field([](auto x, auto) { return 1.0 + 0.0 * x; }), g);
    const SideMap s = classify_nodes(g, ls);
    for (int v : s.labels()) EXPECT_EQ(v, kPlus);
    EXPECT_TRUE(irregular_stencils(g, s, StencilKind::NinePoint).empty());
    EXPECT_TRUE(irregular_stencils(g, s, StencilKind::FivePoint).empty());
}

TEST(Grid, StencilsMatchBruteForce) {
    const Grid g = create_grid(33, 33, {0, 1, 0, 1});
    const auto rep = circle_ls(g, 0.5, 0.5, 0.1);
    const SideMap s = classify_nodes(g, *rep);
    for (auto kind : {StencilKind::NinePoint, StencilKind::FivePoint}) {
        const auto st = irregular_stencils(g, s, kind);
        std::set<std::pair<int, int>> got;
        for (const auto& x : st) {
            EXPECT_TRUE(got.insert({x.center.i, x.center.j}).second) << "centre listed twice";
            // within one stencil width of the circle
            const double d = std::abs((g.point(x.center) - Vec2(0.5, 0.5)).norm() - 0.1);
            EXPECT_LE(d, std::sqrt(2.0) * g.hx() + 1e-12);
            for (const auto& n : x.opposite) {
                EXPECT_LE(std::abs(n.i - x.center.i), 1);
                EXPECT_LE(std::abs(n.j - x.center.j), 1);
                EXPECT_NE(s.at(n), s.at(x.center));
            }
        }
        EXPECT_EQ(got, brute_irregular(g, s, kind));
    }
}

TEST(Grid, Deterministic) {
    const Grid g = create_grid(65, 65, {0, 1, 0, 1});
    const auto c = builtin_cases().at("ex2");
    const auto r1 = c.make_interface(g), r2 = c.make_interface(g);
    const SideMap a = classify_nodes(g, *r1), b = classify_nodes(g, *r2);
    EXPECT_EQ(a.labels(), b.labels());
    const auto sa = irregular_stencils(g, a, StencilKind::NinePoint), sb = irregular_stencils(g, b, StencilKind::NinePoint);
    ASSERT_EQ(sa.size(), sb.size());
    for (std::size_t k = 0; k < sa.size(); ++k) {
        EXPECT_EQ(sa[k].center, sb[k].center);
        EXPECT_EQ(sa[k].opposite, sb[k].opposite);
    }
}
