#pragma once

// Constructors for the extremal surfaces: one-cylinder origamis and their
// shear to equilateral tilings, global maxima per stratum, the five
// hexagon-plus-triangles local maxima, the two nonrigid examples, the
// rigid-but-not-maximal family, and the slit-gluing surgery.

#include "triangulation.hpp"

#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace flatsys {

using QVec = Vec2<QScalar>;
using QSurface = Surface<QScalar>;

namespace detail {

// point of the triangular lattice: a*(1,0) + b*(1/2, sqrt3/2)
inline QVec tri_pt(int a, int b) {
    return {QScalar(Rational(2 * a + b, 2)), QScalar(0, Rational(b, 2))};
}

inline QSurface polygon_surface(const std::vector<std::pair<int, int>>& lattice_vertices,
                                const std::vector<std::pair<int, int>>& edge_pairs,
                                const std::string& name) {
    PolygonSpec<QScalar> p;
    for (auto [a, b] : lattice_vertices) p.vertices.push_back(tri_pt(a, b));
    std::vector<std::pair<EdgeRef, EdgeRef>> glue;
    for (auto [e, f] : edge_pairs) glue.push_back({EdgeRef{0, e}, EdgeRef{0, f}});
    return QSurface({p}, glue, name);
}

}  // namespace detail

// --- the five local maxima and the two nonrigid examples ---------------------

inline QSurface named_example(const std::string& name) {
    using VL = std::vector<std::pair<int, int>>;
    using EL = std::vector<std::pair<int, int>>;
    if (name == "s4") {
        VL v = {{0, 0}, {1, -1}, {1, 0}, {2, 0}, {1, 1}, {1, 2},
                {0, 2}, {-1, 3}, {-1, 2}, {-2, 2}, {-1, 1}, {-1, 0}};
        EL e = {{0, 6}, {1, 10}, {2, 5}, {3, 9}, {4, 7}, {8, 11}};
        return detail::polygon_surface(v, e, "s4");
    }
    if (name == "s110") {
        VL v = {{0, 0}, {1, -1}, {1, 0}, {2, 0}, {1, 1}, {1, 2},
                {0, 2}, {-1, 3}, {-1, 2}, {-2, 2}, {-1, 1}, {-1, 0}};
        EL e = {{0, 3}, {1, 10}, {2, 5}, {4, 7}, {6, 9}, {8, 11}};
        return detail::polygon_surface(v, e, "s110");
    }
    if (name == "s1100") {
        // hexagram plus a parallelogram on its upper right; the shared corner
        // of the two pieces is the figure's second marked point
        PolygonSpec<QScalar> star, par;
        for (auto [a, b] : VL{{0, 0}, {1, -1}, {1, 0}, {2, 0}, {1, 1}, {1, 2},
                              {0, 2}, {-1, 3}, {-1, 2}, {-2, 2}, {-1, 1}, {-1, 0}})
            star.vertices.push_back(detail::tri_pt(a, b));
        for (auto [a, b] : VL{{0, 2}, {1, 2}, {0, 3}, {-1, 3}})
            par.vertices.push_back(detail::tri_pt(a, b));
        std::vector<std::pair<EdgeRef, EdgeRef>> glue = {
            {{0, 5}, {1, 0}}, {{0, 6}, {1, 3}},              // seams under the parallelogram
            {{0, 0}, {0, 3}}, {{0, 1}, {0, 10}},             // 3, 4
            {{0, 2}, {1, 2}}, {{0, 4}, {0, 7}},              // 2, 1
            {{1, 1}, {0, 9}}, {{0, 8}, {0, 11}}};            // 6, 5
        return QSurface({star, par}, glue, "s1100");
    }
    if (name == "s22") {
        VL v = {{0, 0}, {0, -1}, {1, -1}, {1, 0}, {2, 0}, {1, 1}, {1, 2},
                {0, 2}, {0, 3}, {-1, 3}, {-1, 2}, {-2, 2}, {-1, 1}, {-1, 0}};
        EL e = {{0, 7}, {1, 8}, {2, 12}, {3, 6}, {4, 11}, {5, 9}, {10, 13}};
        return detail::polygon_surface(v, e, "s22");
    }
    if (name == "s20") {
        VL v = {{0, 0}, {1, -1}, {1, 0}, {2, 0}, {1, 1},
                {1, 2}, {0, 2}, {-1, 3}, {-1, 2}, {-1, 1}};
        EL e = {{0, 3}, {1, 7}, {2, 5}, {4, 8}, {6, 9}};
        return detail::polygon_surface(v, e, "s20");
    }
    if (name == "nonrigid_h2") {
        VL v = {{0, 0}, {1, -1}, {1, 0}, {1, 1}, {0, 2}, {-1, 3}, {-1, 2}, {-1, 1}};
        EL e = {{0, 4}, {1, 5}, {2, 6}, {3, 7}};
        return detail::polygon_surface(v, e, "nonrigid_h2");
    }
    if (name == "nonrigid_h000") {
        VL v = {{0, 0}, {1, -1}, {1, 0}, {1, 1}, {0, 2}, {-1, 3}, {-1, 2}, {-1, 1}};
        EL e = {{0, 3}, {1, 6}, {2, 5}, {4, 7}};
        return detail::polygon_surface(v, e, "nonrigid_h000");
    }
    throw surface_error("unknown example name: " + name);
}

inline const std::vector<std::string>& named_example_names() {
    static const std::vector<std::string> names = {"s4",   "s22",          "s20",
                                                   "s1100", "s110",         "nonrigid_h2",
                                                   "nonrigid_h000"};
    return names;
}

// --- one-cylinder origamis ----------------------------------------------------

struct CylinderSpec {
    std::vector<std::string> top;
    std::vector<std::string> bottom;
};

inline QSurface one_cylinder_origami(const CylinderSpec& c, const QScalar& height,
                                     const std::string& name = "") {
    const int w = static_cast<int>(c.top.size());
    if (w < 1 || c.bottom.size() != c.top.size())
        throw surface_error("cylinder spec: top and bottom must have equal positive length");
    if (height.sign() <= 0) throw surface_error("cylinder spec: height must be positive");
    {
        std::multiset<std::string> a(c.top.begin(), c.top.end());
        std::multiset<std::string> b(c.bottom.begin(), c.bottom.end());
        if (a != b) throw surface_error("cylinder spec: bottom is not a permutation of top");
        if (a.size() != std::set<std::string>(c.top.begin(), c.top.end()).size())
            throw surface_error("cylinder spec: duplicate labels");
    }
    PolygonSpec<QScalar> p;
    for (int i = 0; i <= w; ++i) p.vertices.push_back({QScalar(i), QScalar(0)});
    for (int i = w; i >= 0; --i) p.vertices.push_back({QScalar(i), height});
    std::vector<std::pair<EdgeRef, EdgeRef>> glue;
    glue.push_back({EdgeRef{0, w}, EdgeRef{0, 2 * w + 1}});  // the two vertical sides
    for (int i = 0; i < w; ++i) {
        int j = -1;
        for (int t = 0; t < w; ++t)
            if (c.top[t] == c.bottom[i]) j = t;
        glue.push_back({EdgeRef{0, i}, EdgeRef{0, 2 * w - j}});
    }
    return QSurface({p}, glue, name);
}

// shear sending unit verticals to the pi/3 direction: ((1, 1/2), (0, sqrt3/2))
inline Mat2<QScalar> equilateral_shear() {
    return {QScalar(1), QScalar(Rational(1, 2)), QScalar(0), QScalar(0, Rational(1, 2))};
}

inline QSurface shear_to_equilateral(const QSurface& s) {
    for (const auto& p : s.polygons())
        for (const auto& v : p.vertices) {
            if (!(v.y.is_zero() || v.y == QScalar(1)))
                throw surface_error("shear_to_equilateral: expects a height-1 origami");
            if (!v.x.sqrt3_part().is_zero() ||
                boost::multiprecision::denominator(v.x.rational_part()) != 1)
                throw surface_error("shear_to_equilateral: expects integer square corners");
        }
    return apply_matrix(s, equilateral_shear());
}

// --- global maxima per stratum -------------------------------------------------

// a slit: an existing gluing pair, or a polygon chord to be split first
struct SlitRef {
    bool is_edge = true;
    int pair_index = -1;  // when is_edge
    int poly = -1, vi = -1, vj = -1;  // when chord
};

struct GlobalMaxResult {
    QSurface surface;
    std::optional<SlitRef> connection;  // unit connection joining the requested pair
};

inline std::optional<CylinderSpec> builtin_cylinder(std::vector<int> orders) {
    std::sort(orders.begin(), orders.end(), std::greater<int>());
    auto labels = [](const std::string& s) {
        std::vector<std::string> v;
        for (char c : s) v.push_back(std::string(1, c));
        return v;
    };
    static const std::map<std::vector<int>, std::pair<std::string, std::string>> table = {
        {{0}, {"a", "a"}},
        {{0, 0}, {"ab", "ba"}},
        {{0, 0, 0}, {"abc", "abc"}},
        {{0, 0, 0, 0}, {"abcd", "abcd"}},
        {{2}, {"abc", "cba"}},
        {{1, 1}, {"abcd", "dcba"}},
        {{4}, {"abcde", "edcba"}},
        {{2, 2}, {"abcdef", "fedcba"}},
        {{6}, {"abcdefg", "gfedcba"}},
        {{3, 3}, {"abcdefgh", "hgfedcba"}},
        {{2, 0}, {"abcd", "acbd"}},
        {{2, 0, 0}, {"abcde", "acbde"}},
        {{4, 0}, {"abcdef", "adbecf"}},
        {{6, 0}, {"abcdefgh", "aebfcgdh"}},
    };
    auto it = table.find(orders);
    if (it == table.end()) return std::nullopt;
    return CylinderSpec{labels(it->second.first), labels(it->second.second)};
}

constexpr int kShearBudget = 100;

inline GlobalMaxResult global_max_surface(std::vector<int> orders,
                                          std::optional<std::pair<int, int>> pair = std::nullopt,
                                          std::optional<CylinderSpec> user_cyl = std::nullopt) {
    std::optional<CylinderSpec> cyl = user_cyl ? user_cyl : builtin_cylinder(orders);
    if (!cyl)
        throw surface_error("no built-in one-cylinder model for this stratum; supply one");
    std::string name = "global_max";
    for (size_t i = 0; i < orders.size(); ++i) name += (i ? "," : "(") + std::to_string(orders[i]);
    name += ")";
    QSurface origami = one_cylinder_origami(*cyl, QScalar(1), name);
    const int w = static_cast<int>(cyl->top.size());

    // the origami's stratum must match the request
    {
        std::vector<int> got = origami.stratum().orders;
        std::vector<int> want = orders;
        std::sort(want.begin(), want.end(), std::greater<int>());
        if (got != want)
            throw surface_error("cylinder model lands in " + origami.stratum().str() +
                                ", not the requested stratum");
    }

    if (!pair) return {shear_to_equilateral(origami), std::nullopt};

    auto [i, j] = *pair;
    if (i == j || i < 0 || j < 0 || i >= static_cast<int>(orders.size()) ||
        j >= static_cast<int>(orders.size()))
        throw surface_error("global_max_surface: pair indices out of range");
    int ki = orders[i], kj = orders[j];

    // bottom corner m has polygon vertex index m; top corner t has 2w+1-t
    auto bottom_class = [&](int m) { return origami.vertex_class(0, m); };
    auto top_class = [&](int t) { return origami.vertex_class(0, 2 * w + 1 - t); };

    for (int n = 0; n <= std::min(kShearBudget, w - 1); ++n) {
        for (int m = n; m <= w; ++m) {
            int cb = bottom_class(m), ct = top_class(m - n);
            int ob = origami.class_order(cb), ot = origami.class_order(ct);
            bool match = (ob == ki && ot == kj) || (ob == kj && ot == ki);
            if (!match) continue;
            if (cb == ct && ki != kj) continue;
            if (ki == kj && cb == ct) continue;  // the pair asks for two singularities
            Mat2<QScalar> shear{QScalar(1), QScalar(n), QScalar(0), QScalar(1)};
            QSurface sheared = apply_matrix(origami, shear);
            QSurface final_surface = apply_matrix(sheared, equilateral_shear());
            SlitRef chord;
            chord.is_edge = false;
            chord.poly = 0;
            chord.vi = m;                    // bottom vertex m
            chord.vj = 2 * w + 1 - (m - n);  // top vertex m-n
            if (n == 0 && (m == 0 || m == w)) {
                // the vertical side is an existing gluing edge, not a chord
                chord.is_edge = true;
                chord.pair_index = 0;
                chord.poly = chord.vi = chord.vj = -1;
            }
            return {std::move(final_surface), chord};
        }
    }
    throw surface_error("global_max_surface: no shear within budget joins the requested pair");
}

// --- the rigid-but-not-maximal family ------------------------------------------

struct RigidFamily {
    QSurface surface;
    int n = 0;
    int strip_poly = 0;
    int par1_poly = -1;
    int par2_poly = -1;  // -1 when n == 2 (the two parallelograms coincide)
};

inline RigidFamily rigid_family(int n) {
    if (n < 2) throw surface_error("rigid_family: n must be >= 2");
    using P = std::pair<int, int>;
    std::vector<std::vector<P>> pieces;
    auto add = [&](std::vector<P> v) {
        pieces.push_back(std::move(v));
        return static_cast<int>(pieces.size()) - 1;
    };

    // strip: bottom left-to-right, right notch, top right-to-left, left notch
    std::vector<P> strip;
    for (int m = 1; m <= n + 1; ++m) strip.push_back({m + 1, -2});
    strip.push_back({n + 2, -1});
    for (int m = n + 1; m >= 1; --m) strip.push_back({m, 0});
    strip.push_back({1, -1});
    int strip_i = add(strip);

    int tl = add({{0, 0}, {1, -1}, {1, 0}});
    int bl = add({{1, -2}, {2, -2}, {1, -1}});
    int tr = add({{n + 1, 0}, {n + 2, -1}, {n + 2, 0}});
    int br = add({{n + 2, -2}, {n + 3, -2}, {n + 2, -1}});
    int par1 = add({{1, 0}, {2, 0}, {2, 1}, {1, 1}});
    int par2 = -1;
    if (n >= 3) par2 = add({{n, 0}, {n + 1, 0}, {n, 1}, {n - 1, 1}});
    std::map<int, int> up;    // base [m, m+1]
    std::map<int, int> down;  // top [k+1/2, k+3/2]
    int up_lo = 2, up_hi = (n >= 3) ? n - 1 : 2;
    for (int m = up_lo; m <= up_hi; ++m) up[m] = add({{m, 0}, {m + 1, 0}, {m, 1}});
    for (int k = 2; k <= n - 2; ++k) down[k] = add({{k + 1, 0}, {k + 1, 1}, {k, 1}});
    int lastdown = add({{n + 1, 0}, {n + 1, 1}, {n, 1}});

    std::vector<PolygonSpec<QScalar>> polys;
    for (const auto& pc : pieces) {
        PolygonSpec<QScalar> p;
        for (auto [a, b] : pc) p.vertices.push_back(detail::tri_pt(a, b));
        polys.push_back(std::move(p));
    }

    std::vector<std::pair<EdgeRef, EdgeRef>> glue;
    std::set<std::pair<int, int>> used;
    auto pair_up = [&](EdgeRef x, EdgeRef y) {
        glue.push_back({x, y});
        used.insert({x.poly, x.edge});
        used.insert({y.poly, y.edge});
    };

    // labelled identifications
    pair_up({tl, 2}, {bl, 0});                                   // a
    pair_up({tl, 0}, {br, 1});                                   // b
    pair_up({bl, 2}, {lastdown, 0});                             // c
    pair_up({tr, 2}, {br, 0});                                   // d
    pair_up({par1, 3}, {tr, 1});                                 // e
    auto top_edge_of = [&](int k) -> EdgeRef {
        if (k == 1) return {par1, 2};
        if (k == n) return {lastdown, 1};
        if (n >= 3 && k == n - 1) return {par2, 2};
        return {down.at(k), 1};
    };
    for (int k = 1; k <= n; ++k) pair_up({strip_i, n - k}, top_edge_of(k));

    // remaining edges are seams: identical segments traversed oppositely
    std::map<std::pair<std::pair<int, int>, std::pair<int, int>>, EdgeRef> open_seams;
    auto key_of = [&](int pi, int e) {
        const auto& pc = pieces[pi];
        int m = static_cast<int>(pc.size());
        return std::make_pair(pc[e], pc[(e + 1) % m]);
    };
    for (size_t pi = 0; pi < pieces.size(); ++pi) {
        for (int e = 0; e < static_cast<int>(pieces[pi].size()); ++e) {
            if (used.count({static_cast<int>(pi), e})) continue;
            auto k = key_of(static_cast<int>(pi), e);
            auto rk = std::make_pair(k.second, k.first);
            auto it = open_seams.find(rk);
            if (it != open_seams.end()) {
                pair_up(it->second, {static_cast<int>(pi), e});
                open_seams.erase(it);
            } else {
                if (open_seams.count(k)) throw surface_error("rigid_family: ambiguous seam");
                open_seams[k] = {static_cast<int>(pi), e};
            }
        }
    }
    if (!open_seams.empty()) throw surface_error("rigid_family: unmatched seam");

    QSurface surf(std::move(polys), std::move(glue), "rigid_family(" + std::to_string(n) + ")");
    return RigidFamily{std::move(surf), n, strip_i, par1, par2};
}

// --- slit gluing ---------------------------------------------------------------

namespace detail {

// split polygon `p` along the chord vi -> vj; the chord becomes a glued pair
inline QSurface split_polygon(const QSurface& s, int p, int vi, int vj, int& out_pair_index) {
    const auto& poly = s.polygons()[p];
    int nv = poly.size();
    {
        std::vector<int> ring(nv);
        std::iota(ring.begin(), ring.end(), 0);
        if (!is_diagonal(poly, ring, vi, vj))
            throw surface_error("slit: chord is not an interior diagonal");
    }
    if (vi > vj) std::swap(vi, vj);
    PolygonSpec<QScalar> p1, p2;
    for (int t = vi; t <= vj; ++t) p1.vertices.push_back(poly.vertices[t]);
    for (int t = vj; t != vi; t = (t + 1) % nv) p2.vertices.push_back(poly.vertices[t]);
    p2.vertices.push_back(poly.vertices[vi]);

    int np = static_cast<int>(s.polygons().size());
    auto remap = [&](EdgeRef e) -> EdgeRef {
        if (e.poly != p) return e;
        if (e.edge >= vi && e.edge < vj) return {p, e.edge - vi};
        int off = (e.edge - vj + nv) % nv;
        return {np, off};
    };
    std::vector<PolygonSpec<QScalar>> polys = s.polygons();
    polys[p] = std::move(p1);
    polys.push_back(std::move(p2));
    std::vector<std::pair<EdgeRef, EdgeRef>> glue;
    for (const auto& pr : s.gluing_pairs()) glue.push_back({remap(pr.first), remap(pr.second)});
    out_pair_index = static_cast<int>(glue.size());
    glue.push_back({EdgeRef{p, vj - vi}, EdgeRef{np, nv - (vj - vi)}});
    return QSurface(std::move(polys), std::move(glue), s.name());
}

}  // namespace detail

struct Slit {
    QSurface surface;
    SlitRef ref;
};

// Cuts both surfaces along their slits (equal holonomy required, exact mode)
// and cross-glues: left of the first to right of the second and vice versa.
inline QSurface slit_glue(const Slit& a, const Slit& b, const std::string& name = "surgery") {
    QSurface A = a.surface;
    SlitRef ra = a.ref;
    if (!ra.is_edge) {
        int idx;
        A = detail::split_polygon(A, ra.poly, ra.vi, ra.vj, idx);
        ra = SlitRef{true, idx, -1, -1, -1};
    }
    QSurface B = b.surface;
    SlitRef rb = b.ref;
    if (!rb.is_edge) {
        int idx;
        B = detail::split_polygon(B, rb.poly, rb.vi, rb.vj, idx);
        rb = SlitRef{true, idx, -1, -1, -1};
    }

    auto pa = A.gluing_pairs()[ra.pair_index];
    auto pb = B.gluing_pairs()[rb.pair_index];
    QVec hol = A.edge_vector(pa.first);  // pa.first is the left side of the slit
    EdgeRef la = pa.first, raE = pa.second;
    EdgeRef lb, rbE;
    if (B.edge_vector(pb.first) == hol) {
        lb = pb.first;
        rbE = pb.second;
    } else if (B.edge_vector(pb.second) == hol) {
        lb = pb.second;
        rbE = pb.first;
    } else {
        throw surface_error("slit_glue: slit holonomies differ (rotate or rescale first)");
    }

    int offset = static_cast<int>(A.polygons().size());
    auto shift = [&](EdgeRef e) { return EdgeRef{e.poly + offset, e.edge}; };

    std::vector<PolygonSpec<QScalar>> polys = A.polygons();
    for (const auto& p : B.polygons()) polys.push_back(p);
    std::vector<std::pair<EdgeRef, EdgeRef>> glue;
    for (size_t i = 0; i < A.gluing_pairs().size(); ++i)
        if (static_cast<int>(i) != ra.pair_index) glue.push_back(A.gluing_pairs()[i]);
    for (size_t i = 0; i < B.gluing_pairs().size(); ++i)
        if (static_cast<int>(i) != rb.pair_index) {
            auto pr = B.gluing_pairs()[i];
            glue.push_back({shift(pr.first), shift(pr.second)});
        }
    glue.push_back({la, shift(rbE)});
    glue.push_back({shift(lb), raE});
    return QSurface(std::move(polys), std::move(glue), name);
}

// unit connection between singularities of the given orders, as an existing
// edge pair first, else as a polygon chord; optional exact holonomy filter
inline std::optional<SlitRef> find_slit(const QSurface& s, int order_a, int order_b,
                                        std::optional<QVec> hol = std::nullopt,
                                        std::optional<QScalar> norm2 = QScalar(1)) {
    auto hol_ok = [&](const QVec& v) {
        if (norm2 && !(v.norm2() == *norm2)) return false;
        if (hol && !(v == *hol || v == -*hol)) return false;
        return true;
    };
    auto orders_ok = [&](int ca, int cb) {
        int oa = s.class_order(ca), ob = s.class_order(cb);
        return (oa == order_a && ob == order_b) || (oa == order_b && ob == order_a);
    };
    for (size_t i = 0; i < s.gluing_pairs().size(); ++i) {
        EdgeRef e = s.gluing_pairs()[i].first;
        const auto& poly = s.polygons()[e.poly];
        int ca = s.vertex_class(e.poly, e.edge);
        int cb = s.vertex_class(e.poly, poly.mod(e.edge + 1));
        if (orders_ok(ca, cb) && hol_ok(s.edge_vector(e))) {
            SlitRef r;
            r.is_edge = true;
            r.pair_index = static_cast<int>(i);
            return r;
        }
    }
    for (size_t p = 0; p < s.polygons().size(); ++p) {
        const auto& poly = s.polygons()[p];
        int nv = poly.size();
        std::vector<int> ring(nv);
        std::iota(ring.begin(), ring.end(), 0);
        for (int vi = 0; vi < nv; ++vi) {
            for (int vj = vi + 2; vj < nv; ++vj) {
                if (vi == 0 && vj == nv - 1) continue;
                QVec v = poly.vertices[vj] - poly.vertices[vi];
                if (!hol_ok(v)) continue;
                if (!orders_ok(s.vertex_class(static_cast<int>(p), vi),
                               s.vertex_class(static_cast<int>(p), vj)))
                    continue;
                if (!detail::is_diagonal(poly, ring, vi, vj)) continue;
                SlitRef r;
                r.is_edge = false;
                r.poly = static_cast<int>(p);
                r.vi = vi;
                r.vj = vj;
                return r;
            }
        }
    }
    return std::nullopt;
}

// rotates s by a multiple of 60 degrees so that `from` maps onto `to`
inline std::optional<QSurface> rotate_to_match(const QSurface& s, const QVec& from, const QVec& to) {
    for (int k = 0; k < 6; ++k) {
        Mat2<QScalar> r = rotation60(k);
        if (r * from == to) return apply_matrix(s, r);
        if (r * from == -to) {
            // the slit is unoriented; matching the opposite vector works too
            return apply_matrix(s, r);
        }
    }
    return std::nullopt;
}

inline QVec slit_holonomy(const QSurface& s, const SlitRef& r) {
    if (r.is_edge) return s.edge_vector(s.gluing_pairs()[r.pair_index].first);
    return s.polygons()[r.poly].vertices[r.vj] - s.polygons()[r.poly].vertices[r.vi];
}

}  // namespace flatsys
