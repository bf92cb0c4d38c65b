#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cfm/cases.hpp"
#include "cfm/interface.hpp"

using namespace cfm;

namespace {

constexpr double kPiD = std::numbers::pi;

AnalyticLevelSet line_y(double c) {
    return AnalyticLevelSet(make_field([c](auto, auto y) { return y - c; }), 1.0 / 64);
}

AnalyticLevelSet circle(double cx, double cy, double r) {
    return AnalyticLevelSet(make_field([=](auto x, auto y) { return sqrt((x - cx) * (x - cx) + (y - cy) * (y - cy)) - r; }),
                            1.0 / 64);
}

}  // namespace

TEST(LevelSet, SampledValuesAtNode) {
    const Grid g = create_grid(11, 11, {0, 1, 0, 1});
    const LevelSetField ls = levelset_from_analytic(
        make_field([](auto x, auto y) { return (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5) - 0.01; }), g);
    const Vec2 p(0.9, 0.5);
    EXPECT_NEAR(ls.phi(0, p), 0.15, 1e-14);
    EXPECT_NEAR(ls.grad_phi(0, p).x(), 0.8, 1e-13);
    EXPECT_NEAR(ls.grad_phi(0, p).y(), 0.0, 1e-13);
}

TEST(LevelSet, RegionsOfMultiRegionCases) {
    const auto cases = builtin_cases();
    const Grid g = create_grid(65, 65, {0, 1, 0, 1});
    EXPECT_EQ(side_of(*cases.at("ex4").make_interface(g), {0.5, 0.5}), 1);
    EXPECT_EQ(side_of(*cases.at("ex5").make_interface(g), {0.5, 0.5}), 2);
    EXPECT_EQ(side_of(*cases.at("ex4").make_interface(g), {0.02, 0.02}), 2);
    EXPECT_EQ(side_of(*cases.at("ex5").make_interface(g), {0.02, 0.02}), 3);
}

TEST(Segments, FlatLine) {
    const auto ls = line_y(0.5);
    const auto segs = interface_in_box(ls, 0, Rect{0, 1, 0, 1}, 6);
    ASSERT_EQ(segs.size(), 1u);
    EXPECT_NEAR(segs[0].length(), 1.0, 1e-12);
    EXPECT_NEAR(std::min(segs[0].start.x(), segs[0].end.x()), 0.0, 1e-12);
    EXPECT_NEAR(std::max(segs[0].start.x(), segs[0].end.x()), 1.0, 1e-12);
    EXPECT_NEAR(segs[0].start.y(), 0.5, 1e-12);
    for (const auto& s : segs[0].samples) {
        EXPECT_NEAR(s.x.y(), 0.5, 1e-12);
        EXPECT_NEAR(s.normal.x(), 0.0, 1e-12);
        EXPECT_NEAR(s.normal.y(), 1.0, 1e-12);
    }
}

TEST(Segments, QuarterCircleLength) {
    const auto ls = circle(0, 0, 0.5);
    const auto segs = interface_in_box(ls, 0, Rect{0, 1, 0, 1}, 12);
    ASSERT_EQ(segs.size(), 1u);
    EXPECT_NEAR(segs[0].length(), kPiD / 4, 1e-8);
}

TEST(Segments, ThinStripCutsCircleTwice) {
    const auto ls = circle(0.5, 0.5, 0.3);
    const auto segs = interface_in_box(ls, 0, Rect{0, 1, 0.48, 0.52}, 6);
    ASSERT_EQ(segs.size(), 2u);
    for (const auto& s : segs) EXPECT_NEAR(s.length(), 0.3 * 2 * std::asin(0.02 / 0.3), 1e-9);
}

TEST(Segments, PetalStripHasTwoPieces) {
    const Grid g = create_grid(129, 129, {0, 1, 0, 1});
    const auto rep = builtin_cases().at("ex1s").make_interface(g);
    const auto segs = interface_in_box(*rep, 0, Rect{0, 1, 0.48, 0.52}, 6);
    EXPECT_EQ(segs.size(), 2u);
}

TEST(Segments, SamplesOrientedAndUnit) {
    const Grid g = create_grid(65, 65, {0, 1, 0, 1});
    for (const char* name : {"ex1", "ex2", "ex3", "ex4", "ex1s"}) {
        const auto c = builtin_cases().at(name);
        const auto rep = c.make_interface(g);
        for (int k = 0; k < rep->num_interfaces(); ++k) {
            const auto [minus, plus] = rep->regions(k);
            for (const auto& seg : interface_in_box(*rep, k, c.domain, 6))
                for (const auto& s : seg.samples) {
                    EXPECT_NEAR(s.normal.norm(), 1.0, 1e-12) << name;
                    EXPECT_NEAR(rep->phi(k, s.x), 0.0, 1e-10) << name;
                    EXPECT_GT(s.weight, 0.0);
                    EXPECT_GT(rep->phi(k, s.x + 1e-4 * s.normal), 0.0) << name;
                    EXPECT_LT(rep->phi(k, s.x - 1e-4 * s.normal), 0.0) << name;
                }
        }
    }
}

TEST(Normals, CircleNormal) {
    const auto ls = circle(0.5, 0.5, 0.1);
    const Vec2 n = normal_at(ls, 0, {0.5, 0.6});
    EXPECT_NEAR(n.x(), 0.0, 1e-14);
    EXPECT_NEAR(n.y(), 1.0, 1e-14);
}

TEST(ClosestPoint, CircleAndLine) {
    const ExactCircles ec({{{0.5, 0.5}, 0.1, kMinus, kPlus, true}}, {{0, kMinus}}, kPlus);
    const Vec2 q = closest_interface_point(ec, 0, {0.7, 0.5});
    EXPECT_NEAR(q.x(), 0.6, 1e-14);
    EXPECT_NEAR(q.y(), 0.5, 1e-14);

    const auto ls = circle(0.5, 0.5, 0.1);
    const Vec2 q2 = closest_interface_point(ls, 0, {0.7, 0.5});
    EXPECT_NEAR((q2 - Vec2(0.6, 0.5)).norm(), 0.0, 1e-10);

    const auto fl = line_y(0.3);
    const Vec2 q3 = closest_interface_point(fl, 0, {0.2, 0.9});
    EXPECT_NEAR((q3 - Vec2(0.2, 0.3)).norm(), 0.0, 1e-12);
}

TEST(ClosestPoint, PetalAgainstPolyline) {
    const Grid g = create_grid(129, 129, {0, 1, 0, 1});
    const auto rep = builtin_cases().at("ex1s").make_interface(g);
    std::vector<InterfaceSegment> segs;
    for (int bj = 0; bj < 8; ++bj)
        for (int bi = 0; bi < 8; ++bi)
            for (auto& s : interface_in_box(*rep, 0, Rect{bi / 8.0, (bi + 1) / 8.0, bj / 8.0, (bj + 1) / 8.0}, 6))
                segs.push_back(std::move(s));
    ASSERT_FALSE(segs.empty());
    for (const Vec2 p : {Vec2(0.55, 0.47), Vec2(0.9, 0.6), Vec2(0.3, 0.1), Vec2(0.62, 0.77)}) {
        const Vec2 q = closest_interface_point(*rep, 0, p);
        double brute = std::numeric_limits<double>::infinity();
        for (const auto& s : segs) brute = std::min(brute, s.distance_to(p));
        EXPECT_NEAR(std::abs(rep->phi(0, q)), 0.0, 1e-10);
        EXPECT_LE((q - p).norm(), brute + 1e-5);
        EXPECT_GE((q - p).norm(), brute - 1e-5);
    }
}

TEST(TangentAngle, Lines) {
    const Polygon box = Polygon::from_rect({0.2, 0.8, 0.2, 0.8});
    EXPECT_NEAR(tangent_angle(line_y(0.5), 0, box), 0.0, 1e-12);
    const AnalyticLevelSet diag(make_field([](auto x, auto y) { return y - x - 0.1; }), 1.0 / 64);
    EXPECT_NEAR(tangent_angle(diag, 0, box), kPiD / 4, 1e-12);
    const AnalyticLevelSet vert(make_field([](auto x, auto) { return x - 0.5; }), 1.0 / 64);
    EXPECT_NEAR(tangent_angle(vert, 0, box), kPiD / 2, 1e-12);
    EXPECT_THROW(tangent_angle(line_y(2.0), 0, box), InvalidArgument);
}
