#pragma once

#include "flatsys/extremal.hpp"
#include "flatsys/verify.hpp"

namespace testutil {

using namespace flatsys;

inline QSurface square_torus() {
    return one_cylinder_origami(CylinderSpec{{"a"}, {"a"}}, QScalar(1), "square_torus");
}

inline QSurface triangle_torus() {
    return shear_to_equilateral(square_torus());
}

// two unit equilateral triangles glued along all three side pairs
inline QSurface two_triangle_torus() {
    const QScalar h{Rational(1, 2)};
    const QScalar w{Rational(0), Rational(1, 2)};
    PolygonSpec<QScalar> t1, t2;
    t1.vertices = {{QScalar(0), QScalar(0)}, {QScalar(1), QScalar(0)}, {h, w}};
    t2.vertices = {{QScalar(1), QScalar(0)}, {QScalar(0), QScalar(0)}, {h, -w}};
    std::vector<std::pair<EdgeRef, EdgeRef>> glue = {
        {{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}, {{0, 2}, {1, 2}}};
    return QSurface({t1, t2}, glue, "two_triangle_torus");
}

// parallelogram torus spanned by u and v
inline Surface<double> parallelogram_torus(Vec2<double> u, Vec2<double> v) {
    PolygonSpec<double> p;
    p.vertices = {{0, 0}, u, u + v, v};
    std::vector<std::pair<EdgeRef, EdgeRef>> glue = {{{0, 0}, {0, 2}}, {{0, 1}, {0, 3}}};
    return Surface<double>({p}, glue, "torus");
}

// primitive lattice vectors of Z u + Z v with length <= lmax, canonical
// upper-half-plane representatives, sorted by (length, x, y)
inline std::vector<Vec2<double>> lattice_oracle(Vec2<double> u, Vec2<double> v, double lmax) {
    double det = std::abs(u.cross(v));
    double reach = lmax * (u.length() + v.length()) / det + 2;
    int M = static_cast<int>(reach) + 1;
    std::vector<Vec2<double>> out;
    for (int a = -M; a <= M; ++a) {
        for (int b = -M; b <= M; ++b) {
            if (a == 0 && b == 0) continue;
            if (std::gcd(std::abs(a), std::abs(b)) != 1) continue;
            Vec2<double> w = u * a + v * b;
            if (w.norm2() > lmax * lmax * (1 + 1e-12)) continue;
            if (w.y < 0 || (w.y == 0 && w.x < 0)) continue;  // one per +/- pair
            out.push_back(w);
        }
    }
    std::sort(out.begin(), out.end(), [](const Vec2<double>& a, const Vec2<double>& b) {
        double la = a.norm2(), lb = b.norm2();
        if (la != lb) return la < lb;
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    });
    return out;
}

// corpus used across the invariants: every surface the paper names
inline std::vector<QSurface> exact_corpus() {
    std::vector<QSurface> out;
    out.push_back(square_torus());
    out.push_back(triangle_torus());
    out.push_back(two_triangle_torus());
    for (auto orders : std::vector<std::vector<int>>{{0}, {2}, {1, 1}, {4}, {2, 2}, {2, 0}})
        out.push_back(global_max_surface(orders).surface);
    for (const auto& n : named_example_names()) out.push_back(named_example(n));
    out.push_back(rigid_family(2).surface);
    out.push_back(rigid_family(3).surface);
    return out;
}

}  // namespace testutil
