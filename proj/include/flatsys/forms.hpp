#pragma once

// Closed-form triangle and hexagon quantities used by the certification
// machinery: Carnot sums (circumradius + inradius), the isosceles profile
// (2 + 2x - x^2) / (2 sqrt(4 - x^2)), the equilateral-sided hexagon area
// F(d1, d2, d3) and circle-circle apex solving.

#include "geometry.hpp"

#include <cmath>

namespace flatsys {

struct TriangleGeom {
    double l1, l2, l3;  // side lengths

    TriangleGeom(double a, double b, double c) : l1(a), l2(b), l3(c) {
        if (!(l1 > 0 && l2 > 0 && l3 > 0))
            throw geometry_error("TriangleGeom: sides must be positive");
        if (!(l1 + l2 > l3 && l2 + l3 > l1 && l1 + l3 > l2))
            throw geometry_error("TriangleGeom: triangle inequality violated");
    }

    double heron_area() const {
        double s = (l1 + l2 + l3) / 2;
        double q = s * (s - l1) * (s - l2) * (s - l3);
        return q > 0 ? std::sqrt(q) : 0.0;
    }
};

// R + r, the sum of circumradius and inradius (Carnot's theorem makes this
// the sum of signed distances from the circumcenter to the sides).
inline double carnot_sum(const TriangleGeom& t) {
    double area = t.heron_area();
    if (area < 1e-14)
        throw geometry_error("carnot_sum: triangle too close to degenerate");
    double circum = t.l1 * t.l2 * t.l3 / (4 * area);
    double s = (t.l1 + t.l2 + t.l3) / 2;
    double in = area / s;
    return circum + in;
}

// (R~ + r~)(x) for the isosceles triangle with sides (1, 1, x), x in [1, 2)
inline double isosceles_sum(double x) {
    if (!(x >= 1.0 && x < 2.0))
        throw geometry_error("isosceles_sum: x must lie in [1, 2)");
    return (2 + 2 * x - x * x) / (2 * std::sqrt(4 - x * x));
}

// Area of the hexagon with unit sides and diagonals (d1, d2, d3): three
// isosceles caps over the diagonal triangle plus the Heron term.
inline double hexagon_area_F(double d1, double d2, double d3) {
    const double d[3] = {d1, d2, d3};
    double caps = 0;
    for (double di : d) {
        if (!(di > 0 && di < 2))
            throw geometry_error("hexagon_area_F: diagonal out of (0,2)");
        caps += 0.25 * std::sqrt(di * di * (di + 2) * (2 - di));
    }
    double p = d1 + d2 + d3;
    double h = (p) * (-d1 + d2 + d3) * (d1 - d2 + d3) * (d1 + d2 - d3);
    if (!(h > 0))
        throw geometry_error("hexagon_area_F: diagonals violate the triangle inequality");
    return caps + 0.25 * std::sqrt(h);
}

// The point at distance la from a and lb from b, on the side of line ab
// selected by `side` (+1 = left of a->b). Requires the strict triangle
// inequality |la - lb| < |ab| < la + lb.
inline Vec2<double> apex_solve(const Vec2<double>& a, const Vec2<double>& b, double la, double lb,
                               int side) {
    if (side != 1 && side != -1) throw geometry_error("apex_solve: side must be +1 or -1");
    Vec2<double> ab = b - a;
    double d2 = ab.norm2();
    double d = std::sqrt(d2);
    if (!(std::abs(la - lb) < d && d < la + lb))
        throw geometry_error("apex_solve: circles do not intersect transversally");
    double t = (d2 + la * la - lb * lb) / (2 * d2);
    double h2 = la * la - t * t * d2;
    double h = h2 > 0 ? std::sqrt(h2) : 0.0;
    Vec2<double> foot = a + ab * t;
    Vec2<double> n{-ab.y / d, ab.x / d};
    return foot + n * (side * h);
}

// Exact-mode apex: only available when the height is representable in the
// field (the corpus uses it for equilateral configurations).
inline Vec2<QScalar> apex_solve(const Vec2<QScalar>& a, const Vec2<QScalar>& b, const QScalar& la,
                                const QScalar& lb, int side) {
    if (side != 1 && side != -1) throw geometry_error("apex_solve: side must be +1 or -1");
    Vec2<QScalar> ab = b - a;
    QScalar d2 = ab.norm2();
    if (d2.is_zero()) throw geometry_error("apex_solve: coincident centers");
    QScalar la2 = la * la, lb2 = lb * lb;
    QScalar t = (d2 + la2 - lb2) / (d2 * 2);
    QScalar h2 = la2 - t * t * d2;
    if (h2.sign() <= 0) throw geometry_error("apex_solve: circles do not intersect transversally");
    auto h_over_d = (h2 / d2).try_sqrt();
    if (!h_over_d) throw geometry_error("apex_solve: apex not representable in Q(sqrt3)");
    Vec2<QScalar> foot = a + ab * t;
    Vec2<QScalar> n{-ab.y, ab.x};
    QScalar s = (side > 0) ? *h_over_d : -*h_over_d;
    return foot + n * s;
}

}  // namespace flatsys
