#pragma once

// Planar kernel shared by the exact (QScalar) and approximate (double) modes.
// The scalar type *is* the mode tag: mixing modes is a type error.

#include "qsqrt3.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace flatsys {

struct geometry_error : std::runtime_error {
    explicit geometry_error(const std::string& m) : std::runtime_error(m) {}
};

template <class R>
struct scalar_traits;

template <>
struct scalar_traits<QScalar> {
    static constexpr bool exact = true;
    static int sign(const QScalar& v) { return v.sign(); }
    // scale argument ignored in exact mode
    static int sign(const QScalar& v, const QScalar&) { return v.sign(); }
    static double to_double(const QScalar& v) { return v.to_double(); }
    static QScalar from_int(long long v) { return QScalar(v); }
};

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    inline static double tau = 1e-9;  // global comparison tolerance
    static int sign(double v) {
        if (v > 0) return 1;
        if (v < 0) return -1;
        return 0;
    }
    // tolerance-guarded sign: |v| below tau * scale counts as zero
    static int sign(double v, double scale) {
        double guard = tau * (scale > 1 ? scale : 1.0);
        if (v > guard) return 1;
        if (v < -guard) return -1;
        return 0;
    }
    static double to_double(double v) { return v; }
    static double from_int(long long v) { return static_cast<double>(v); }
};

template <class R>
struct Vec2 {
    R x{}, y{};

    Vec2() = default;
    Vec2(R x_, R y_) : x(std::move(x_)), y(std::move(y_)) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(const R& s) const { return {x * s, y * s}; }

    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
    bool operator!=(const Vec2& o) const { return !(*this == o); }

    R dot(const Vec2& o) const { return x * o.x + y * o.y; }
    R cross(const Vec2& o) const { return x * o.y - y * o.x; }
    R norm2() const { return x * x + y * y; }
    double length() const { return std::sqrt(scalar_traits<R>::to_double(norm2())); }

    Vec2<double> to_double() const {
        return {scalar_traits<R>::to_double(x), scalar_traits<R>::to_double(y)};
    }
};

template <class R>
struct Mat2 {
    R m11{}, m12{}, m21{}, m22{};

    Mat2() = default;
    Mat2(R a, R b, R c, R d)
        : m11(std::move(a)), m12(std::move(b)), m21(std::move(c)), m22(std::move(d)) {}

    static Mat2 identity() { return {1, 0, 0, 1}; }
    static Mat2 scaling(const R& s) { return {s, 0, 0, s}; }

    R det() const { return m11 * m22 - m12 * m21; }

    Vec2<R> operator*(const Vec2<R>& v) const {
        return {m11 * v.x + m12 * v.y, m21 * v.x + m22 * v.y};
    }
    Mat2 operator*(const Mat2& o) const {
        return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22,
                m21 * o.m11 + m22 * o.m21, m21 * o.m12 + m22 * o.m22};
    }
};

// rotation by k * 60 degrees; entries stay in Q(sqrt3)
inline Mat2<QScalar> rotation60(int k) {
    k = ((k % 6) + 6) % 6;
    const QScalar half = QScalar::of(1, 2);
    const QScalar w = QScalar(0, Rational(1, 2));  // sqrt(3)/2
    Mat2<QScalar> r60(half, -w, w, half);
    Mat2<QScalar> acc = Mat2<QScalar>::identity();
    for (int i = 0; i < k; ++i) acc = r60 * acc;
    return acc;
}

// --- predicates --------------------------------------------------------------

// sign of twice the signed area of (a, b, c); +1 = counterclockwise
template <class R>
int orient(const Vec2<R>& a, const Vec2<R>& b, const Vec2<R>& c) {
    R det = (b - a).cross(c - a);
    if constexpr (scalar_traits<R>::exact) {
        return scalar_traits<R>::sign(det);
    } else {
        double bx = b.x - a.x, by = b.y - a.y, cx = c.x - a.x, cy = c.y - a.y;
        double scale = std::abs(bx * cy) + std::abs(by * cx);
        return scalar_traits<R>::sign(det, scale);
    }
}

// +1 iff d lies strictly inside the circumcircle of ccw triangle (a, b, c)
template <class R>
int incircle(const Vec2<R>& a, const Vec2<R>& b, const Vec2<R>& c, const Vec2<R>& d) {
    if (orient(a, b, c) == 0) throw geometry_error("incircle: degenerate triangle");
    Vec2<R> da = a - d, db = b - d, dc = c - d;
    R la = da.norm2(), lb = db.norm2(), lc = dc.norm2();
    R det = da.x * (db.y * lc - dc.y * lb) - da.y * (db.x * lc - dc.x * lb) +
            la * (db.x * dc.y - db.y * dc.x);
    if constexpr (scalar_traits<R>::exact) {
        return scalar_traits<R>::sign(det);
    } else {
        double sa = std::abs(scalar_traits<R>::to_double(la));
        double sb = std::abs(scalar_traits<R>::to_double(lb));
        double sc = std::abs(scalar_traits<R>::to_double(lc));
        double m = std::max(sa, std::max(sb, sc));
        return scalar_traits<R>::sign(det, m * m);
    }
}

// strict point-on-open-segment test (collinear and properly between)
template <class R>
bool on_open_segment(const Vec2<R>& p, const Vec2<R>& a, const Vec2<R>& b) {
    if (orient(a, b, p) != 0) return false;
    R t = (p - a).dot(b - a);
    if (scalar_traits<R>::sign(t) <= 0) return false;
    return scalar_traits<R>::sign(t - (b - a).norm2()) < 0;
}

// closed segments [a,b] and [c,d] share at least one point
template <class R>
bool segments_intersect(const Vec2<R>& a, const Vec2<R>& b, const Vec2<R>& c, const Vec2<R>& d) {
    int o1 = orient(a, b, c), o2 = orient(a, b, d);
    int o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0 && (o1 != 0 || o2 != 0) &&
        (o3 != 0 || o4 != 0))
        return true;
    auto between = [](const Vec2<R>& p, const Vec2<R>& q, const Vec2<R>& r) {
        // r collinear with pq: is it within the closed box?
        R t = (r - p).dot(q - p);
        return scalar_traits<R>::sign(t) >= 0 &&
               scalar_traits<R>::sign(t - (q - p).norm2()) <= 0;
    };
    if (o1 == 0 && between(a, b, c)) return true;
    if (o2 == 0 && between(a, b, d)) return true;
    if (o3 == 0 && between(c, d, a)) return true;
    if (o4 == 0 && between(c, d, b)) return true;
    return false;
}

}  // namespace flatsys
