#pragma once

// Analytic problem bundles and the built-in benchmark cases.

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "cfm/errors.hpp"
#include "cfm/grid.hpp"
#include "cfm/interface.hpp"
#include "cfm/jet.hpp"

namespace cfm {

/// Jump data for one interface: a = [u], b = [grad u] . n, f_D = f+ - f-.
struct JumpData {
    std::function<double(const Vec2&)> a;
    std::function<Vec2(const Vec2&)> grad_jump;
    std::function<double(const Vec2&)> f_d;

    double b(const Vec2& x, const Vec2& n) const { return grad_jump(x).dot(n); }
};

struct CaseDefinition {
    std::string name;
    Rect domain;
    int default_order = 4;
    std::function<std::shared_ptr<const Interface>(const Grid&)> make_interface;
    std::map<int, AnalyticField> source;  // f per region, with derivatives
    std::map<int, AnalyticField> exact;   // u per region
    std::vector<JumpData> jumps;          // indexed by interface id

    const AnalyticField& f(int region) const {
        auto it = source.find(region);
        if (it == source.end()) throw InvalidArgument("no source term for region " + std::to_string(region));
        return it->second;
    }
    const AnalyticField& u(int region) const {
        auto it = exact.find(region);
        if (it == exact.end()) throw InvalidArgument("no exact solution for region " + std::to_string(region));
        return it->second;
    }
    /// Dirichlet data on the outer boundary.
    double boundary(const Vec2& p, int region) const { return u(region)(p).v; }
};

/// Node labels for a case on a grid. Level sets use the nodal samples.
inline SideMap classify_nodes(const Grid& grid, const Interface& rep) {
    if (const auto* ls = dynamic_cast<const LevelSetField*>(&rep)) return ls->classify(grid);
    return classify_nodes(grid, [&rep](const Vec2& p) { return rep.region_at(p); });
}

struct AuditResult {
    double max_a_error = 0.0;
    double max_b_error = 0.0;
    double max_f_error = 0.0;
    int samples = 0;
};

/// Compares the transcribed jumps with the exact solutions at interface samples.
inline AuditResult consistency_audit(const CaseDefinition& c, int min_samples = 200) {
    const Grid grid(129, 129, c.domain);
    const auto rep = c.make_interface(grid);
    AuditResult r;
    const int boxes = 16;
    const double bw = c.domain.width() / boxes, bh = c.domain.height() / boxes;
    for (int nq = 2; r.samples < min_samples && nq <= 32; nq *= 2) {
        r = {};
        for (int k = 0; k < rep->num_interfaces(); ++k) {
            const auto [minus, plus] = rep->regions(k);
            const auto& jd = c.jumps.at(static_cast<std::size_t>(k));
            for (int bj = 0; bj < boxes; ++bj)
                for (int bi = 0; bi < boxes; ++bi) {
                    const Rect box{c.domain.x_lo + bi * bw, c.domain.x_lo + (bi + 1) * bw,
                                   c.domain.y_lo + bj * bh, c.domain.y_lo + (bj + 1) * bh};
                    for (const auto& seg : interface_in_box(*rep, k, box, nq))
                        for (const auto& s : seg.samples) {
                            const Jet2 up = c.u(plus)(s.x), um = c.u(minus)(s.x);
                            const double fp = c.f(plus)(s.x).v, fm = c.f(minus)(s.x).v;
                            r.max_a_error = std::max(r.max_a_error, std::abs(jd.a(s.x) - (up.v - um.v)));
                            r.max_b_error = std::max(r.max_b_error,
                                                     std::abs(jd.b(s.x, s.normal) - (up.grad() - um.grad()).dot(s.normal)));
                            r.max_f_error = std::max(r.max_f_error, std::abs(jd.f_d(s.x) - (fp - fm)));
                            ++r.samples;
                        }
                }
        }
    }
    return r;
}

namespace cases_detail {

// Sampled level set; infinite/NaN gradients at isolated singular nodes
// (curve centres) are zeroed, those cells never carry the interface.
inline std::function<std::shared_ptr<const Interface>(const Grid&)> level_set(AnalyticField phi) {
    return [phi](const Grid& g) -> std::shared_ptr<const Interface> {
        auto safe = [phi](const Vec2& p) {
            Jet2 v = phi(p);
            if (!std::isfinite(v.dx) || !std::isfinite(v.dy)) v.dx = v.dy = 0.0;
            return v;
        };
        return std::make_shared<LevelSetField>(levelset_from_analytic(safe, g));
    };
}

inline AnalyticField constant(double c) {
    return [c](const Vec2&) { return Jet2(c); };
}

inline const double kPi = std::numbers::pi;
inline const double kE = std::numbers::e;

template <class T>
T sinsin(const T& x, const T& y) {
    return sin(kPi * x) * sin(kPi * y);
}
template <class T>
T smooth3(const T& x, const T& y) {  // exp(x)[x^2 sin(y) + y^2]
    return exp(x) * (x * x * sin(y) + y * y);
}
template <class T>
T smooth3_lap(const T& x, const T& y) {
    return exp(x) * (2.0 + y * y + 2.0 * sin(y) + 4.0 * x * sin(y));
}
template <class T>
T sin_minus_exp(const T& x, const T& y) {  // sin(pi x)[sin(pi y) - exp(pi y)]
    return sin(kPi * x) * (sin(kPi * y) - exp(kPi * y));
}
template <class T>
T petal_radius(const T& x, const T& y, double r0, double eps) {
    return r0 + eps * sin(5.0 * atan2(y - 0.5, x - 0.5));
}

inline double s3(const Vec2& p) {
    return std::exp(p.x()) * (p.x() * p.x() * std::sin(p.y()) + p.y() * p.y());
}
inline Vec2 s3_grad(const Vec2& p) {
    const double x = p.x(), y = p.y(), e = std::exp(x);
    return {e * ((x * x + 2.0 * x) * std::sin(y) + y * y), e * (x * x * std::cos(y) + 2.0 * y)};
}

inline CaseDefinition ex1() {
    CaseDefinition c;
    c.name = "ex1";
    c.domain = {0.0, 1.0, 0.0, 1.0};
    c.make_interface = level_set(make_field([](auto x, auto y) {
        return (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5) - 0.01;
    }));
    const auto f = make_field([](auto x, auto y) { return -2.0 * kPi * kPi * sinsin(x, y); });
    c.source = {{kMinus, f}, {kPlus, f}};
    c.exact = {{kPlus, make_field([](auto x, auto y) { return sinsin(x, y); })},
               {kMinus, make_field([](auto x, auto y) { return sin_minus_exp(x, y); })}};
    c.jumps = {{[](const Vec2& p) { return std::sin(kPi * p.x()) * std::exp(kPi * p.y()); },
                [](const Vec2& p) {
                    const double e = std::exp(kPi * p.y());
                    return Vec2(kPi * std::cos(kPi * p.x()) * e, kPi * std::sin(kPi * p.x()) * e);
                },
                [](const Vec2&) { return 0.0; }}};
    return c;
}

inline CaseDefinition ex2() {
    CaseDefinition c;
    c.name = "ex2";
    c.domain = {0.0, 1.0, 0.0, 1.0};
    c.make_interface = level_set(make_field([](auto x, auto y) {
        const auto r = petal_radius(x, y, 0.25, 0.05);
        return (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5) - r * r;
    }));
    c.source = {{kMinus, constant(0.0)}, {kPlus, constant(0.0)}};
    c.exact = {{kPlus, constant(0.0)}, {kMinus, make_field([](auto x, auto y) { return exp(x) * cos(y); })}};
    c.jumps = {{[](const Vec2& p) { return -std::exp(p.x()) * std::cos(p.y()); },
                [](const Vec2& p) {
                    const double e = std::exp(p.x());
                    return Vec2(-e * std::cos(p.y()), e * std::sin(p.y()));
                },
                [](const Vec2&) { return 0.0; }}};
    return c;
}

inline CaseDefinition ex3() {
    CaseDefinition c;
    c.name = "ex3";
    c.domain = {0.0, 1.0, 0.0, 1.0};
    c.make_interface = level_set(make_field([](auto x, auto y) {
        return ((x - 0.25) * (x - 0.25) + (y - 0.25) * (y - 0.25) - 0.15 * 0.15) *
               ((x - 0.75) * (x - 0.75) + (y - 0.75) * (y - 0.75) - 0.1 * 0.1);
    }));
    c.source = {{kPlus, make_field([](auto x, auto y) { return smooth3_lap(x, y); })},
                {kMinus, constant(40.0)}};
    c.exact = {{kPlus, make_field([](auto x, auto y) { return smooth3(x, y); })},
               {kMinus, make_field([](auto x, auto y) { return 10.0 * (x * x + y * y); })}};
    c.jumps = {{[](const Vec2& p) { return s3(p) - 10.0 * p.squaredNorm(); },
                [](const Vec2& p) { return Vec2(s3_grad(p) - 20.0 * p); },
                [](const Vec2& p) {
                    const double x = p.x(), y = p.y();
                    return std::exp(x) * (2.0 + y * y + 2.0 * std::sin(y) + 4.0 * x * std::sin(y)) - 40.0;
                }}};
    return c;
}

// Shared by ex4 and ex5: u1 = sin sin + 5, and the two other region solutions.
inline CaseDefinition tangent_circles(bool inner) {
    const double alpha = kPi / (kE * kE);
    const double rb = 0.3, rs = 0.1;
    const Vec2 cb(0.5, 0.5);
    const Vec2 dir(std::cos(alpha), std::sin(alpha));
    CaseDefinition c;
    c.domain = {0.0, 1.0, 0.0, 1.0};
    const auto u1 = make_field([](auto x, auto y) { return sinsin(x, y) + 5.0; });
    const auto lap_sinsin = make_field([](auto x, auto y) { return -2.0 * kPi * kPi * sinsin(x, y); });
    const auto sme = make_field([](auto x, auto y) { return sin_minus_exp(x, y); });
    const auto sm3 = make_field([](auto x, auto y) { return smooth3(x, y); });
    const auto sm3_lap = make_field([](auto x, auto y) { return smooth3_lap(x, y); });
    auto sme_grad = [](const Vec2& p) {
        const double x = p.x(), y = p.y();
        return Vec2(kPi * std::cos(kPi * x) * (std::sin(kPi * y) - std::exp(kPi * y)),
                    kPi * std::sin(kPi * x) * (std::cos(kPi * y) - std::exp(kPi * y)));
    };
    auto sme_val = [](const Vec2& p) {
        return std::sin(kPi * p.x()) * (std::sin(kPi * p.y()) - std::exp(kPi * p.y()));
    };
    if (!inner) {
        c.name = "ex4";
        const Vec2 cs = cb + rb * dir - rs * Vec2(std::cos(kPi * (1.0 / (kE * kE) + 1.0)),
                                                  std::sin(kPi * (1.0 / (kE * kE) + 1.0)));
        c.make_interface = [cb, cs, rb, rs](const Grid& g) -> std::shared_ptr<const Interface> {
            return std::make_shared<ExactCircles>(
                std::vector<Circle>{{cb, rb, 1, 2, true}, {cs, rs, 2, 3, false}},
                std::vector<std::pair<int, int>>{{1, 3}, {0, 1}}, 2, std::min(g.hx(), g.hy()));
        };
        c.source = {{1, lap_sinsin}, {2, sm3_lap}, {3, lap_sinsin}};
        c.exact = {{1, u1}, {2, sm3}, {3, sme}};
        c.jumps = {
            {[](const Vec2& p) { return s3(p) - std::sin(kPi * p.x()) * std::sin(kPi * p.y()) - 5.0; },
             [](const Vec2& p) {
                 const double x = p.x(), y = p.y();
                 return Vec2(s3_grad(p) - kPi * Vec2(std::cos(kPi * x) * std::sin(kPi * y),
                                                     std::sin(kPi * x) * std::cos(kPi * y)));
             },
             [](const Vec2& p) {
                 const double x = p.x(), y = p.y();
                 return std::exp(x) * (2.0 + y * y + 2.0 * std::sin(y) + 4.0 * x * std::sin(y)) +
                        2.0 * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y);
             }},
            {[sme_val](const Vec2& p) { return sme_val(p) - s3(p); },
             [sme_grad](const Vec2& p) { return Vec2(sme_grad(p) - s3_grad(p)); },
             [](const Vec2& p) {
                 const double x = p.x(), y = p.y();
                 return -2.0 * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y) -
                        std::exp(x) * (2.0 + y * y + 2.0 * std::sin(y) + 4.0 * x * std::sin(y));
             }}};
    } else {
        c.name = "ex5";
        const Vec2 cs = cb + (rb - rs) * dir;
        c.make_interface = [cb, cs, rb, rs](const Grid& g) -> std::shared_ptr<const Interface> {
            return std::make_shared<ExactCircles>(
                std::vector<Circle>{{cs, rs, 1, 2, true}, {cb, rb, 2, 3, true}},
                std::vector<std::pair<int, int>>{{0, 1}, {1, 2}}, 3, std::min(g.hx(), g.hy()));
        };
        c.source = {{1, lap_sinsin}, {2, lap_sinsin}, {3, sm3_lap}};
        c.exact = {{1, u1}, {2, sme}, {3, sm3}};
        c.jumps = {
            {[](const Vec2& p) { return -(std::sin(kPi * p.x()) * std::exp(kPi * p.y()) + 5.0); },
             [](const Vec2& p) {
                 const double e = std::exp(kPi * p.y());
                 return Vec2(-kPi * std::cos(kPi * p.x()) * e, -kPi * std::sin(kPi * p.x()) * e);
             },
             [](const Vec2&) { return 0.0; }},
            {[sme_val](const Vec2& p) { return s3(p) - sme_val(p); },
             [sme_grad](const Vec2& p) { return Vec2(s3_grad(p) - sme_grad(p)); },
             [](const Vec2& p) {
                 const double x = p.x(), y = p.y();
                 return std::exp(x) * (2.0 + y * y + 2.0 * std::sin(y) + 4.0 * x * std::sin(y)) +
                        2.0 * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y);
             }}};
    }
    return c;
}

inline CaseDefinition ex1s() {
    CaseDefinition c;
    c.name = "ex1s";
    c.domain = {0.0, 1.0, 0.0, 1.0};
    c.default_order = 2;
    c.make_interface = level_set(make_field([](auto x, auto y) {
        return sqrt((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)) - petal_radius(x, y, 0.25, 0.05);
    }));
    c.source = {{kPlus, constant(4.0)}, {kMinus, constant(0.0)}};
    c.exact = {{kPlus, make_field([](auto x, auto y) { return x * x + y * y; })},
               {kMinus, make_field([](auto x, auto y) { return exp(x) * cos(y); })}};
    c.jumps = {{[](const Vec2& p) { return p.squaredNorm() - std::exp(p.x()) * std::cos(p.y()); },
                [](const Vec2& p) {
                    const double e = std::exp(p.x());
                    return Vec2(2.0 * p.x() - e * std::cos(p.y()), 2.0 * p.y() + e * std::sin(p.y()));
                },
                [](const Vec2&) { return 4.0; }}};
    return c;
}

inline CaseDefinition ex2s() {
    CaseDefinition c;
    c.name = "ex2s";
    c.domain = {-1.0, 1.0, -1.0, 1.0};
    c.default_order = 2;
    c.make_interface = level_set(make_field([](auto x, auto y) { return sqrt(x * x + y * y) - 0.5; }));
    c.source = {{kPlus, constant(0.0)}, {kMinus, constant(0.0)}};
    c.exact = {{kPlus, make_field([](auto x, auto y) { return 1.0 + log(2.0 * sqrt(x * x + y * y)); })},
               {kMinus, constant(1.0)}};
    c.jumps = {{[](const Vec2& p) { return std::log(2.0 * p.norm()); },
                [](const Vec2& p) { return Vec2(p / p.squaredNorm()); },
                [](const Vec2&) { return 0.0; }}};
    return c;
}

inline CaseDefinition ex3s() {
    CaseDefinition c;
    c.name = "ex3s";
    c.domain = {-1.0, 1.0, -1.0, 1.0};
    c.default_order = 2;
    c.make_interface = level_set(make_field([](auto x, auto y) { return sqrt(x * x + y * y) - 0.5; }));
    c.source = {{kPlus, constant(0.0)}, {kMinus, constant(0.0)}};
    c.exact = {{kPlus, constant(0.0)}, {kMinus, make_field([](auto x, auto y) { return exp(x) * cos(y); })}};
    c.jumps = {{[](const Vec2& p) { return -std::exp(p.x()) * std::cos(p.y()); },
                [](const Vec2& p) {
                    const double e = std::exp(p.x());
                    return Vec2(-e * std::cos(p.y()), e * std::sin(p.y()));
                },
                [](const Vec2&) { return 0.0; }}};
    return c;
}

}  // namespace cases_detail

inline std::map<std::string, CaseDefinition> builtin_cases() {
    using namespace cases_detail;
    std::map<std::string, CaseDefinition> m;
    for (auto c : {ex1(), ex2(), ex3(), tangent_circles(false), tangent_circles(true), ex1s(), ex2s(), ex3s()})
        m.emplace(c.name, std::move(c));
    return m;
}

}  // namespace cfm
