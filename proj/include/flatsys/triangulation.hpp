#pragma once

// Combinatorial triangulations of a glued-polygon surface.
//
// Triangles are stored with per-half-edge holonomy vectors; adjacency is a
// pairing of half-edges. Edge flips keep the vertex set, the holonomy-sum
// invariant and an integer expansion of every current edge over the initial
// edge set (used later for period coordinates).

#include "surface.hpp"

#include <array>
#include <map>
#include <random>

namespace flatsys {

enum class DelaunayStatus { strict, degenerate, non_delaunay };

inline const char* to_string(DelaunayStatus s) {
    switch (s) {
        case DelaunayStatus::strict: return "strict";
        case DelaunayStatus::degenerate: return "degenerate";
        default: return "non_delaunay";
    }
}

struct HalfEdge {
    int tri = -1;
    int k = -1;  // 0..2, edge from corner k to corner k+1

    bool valid() const { return tri >= 0; }
    bool operator==(const HalfEdge& o) const { return tri == o.tri && k == o.k; }
    bool operator!=(const HalfEdge& o) const { return !(*this == o); }
    bool operator<(const HalfEdge& o) const { return tri != o.tri ? tri < o.tri : k < o.k; }
};

template <class R>
class Triangulation {
public:
    struct Tri {
        std::array<int, 3> vclass;       // vertex class id at corner k
        std::array<Vec2<R>, 3> hol;      // corner k -> corner k+1
        std::array<HalfEdge, 3> nbr;     // glued half-edge
        std::array<int, 3> edge;         // edge (pair) id
    };

    std::vector<Tri> tris;
    int edge_count = 0;
    std::vector<HalfEdge> edge_rep;                    // one half-edge per edge id
    std::vector<std::vector<long long>> edge_chain;    // oriented edge over initial edges
    std::vector<std::vector<HalfEdge>> polygon_edge;   // surface polygon edge -> half-edge
    std::vector<bool> edge_is_boundary;                // edge comes from a surface gluing pair
    std::vector<int> tri_polygon;                      // originating polygon (pre-flip only)
    std::vector<std::array<int, 3>> tri_corner;        // polygon corner indices (pre-flip only)
    int flips_performed = 0;

    HalfEdge partner(const HalfEdge& h) const { return tris[h.tri].nbr[h.k]; }
    const Vec2<R>& hol(const HalfEdge& h) const { return tris[h.tri].hol[h.k]; }
    int edge_id(const HalfEdge& h) const { return tris[h.tri].edge[h.k]; }
    int tail_class(const HalfEdge& h) const { return tris[h.tri].vclass[h.k]; }
    int head_class(const HalfEdge& h) const { return tris[h.tri].vclass[(h.k + 1) % 3]; }

    // chain of the half-edge as an oriented 1-chain over initial edges
    std::vector<long long> oriented_chain(const HalfEdge& h) const {
        std::vector<long long> v = edge_chain[edge_id(h)];
        if (!(edge_rep[edge_id(h)] == h))
            for (auto& c : v) c = -c;
        return v;
    }

    int triangle_count() const { return static_cast<int>(tris.size()); }

    // developed apex of the neighbor across h, with h's tail at the origin
    Vec2<R> developed_apex(const HalfEdge& h) const {
        HalfEdge g = partner(h);
        return tris[g.tri].hol[(g.k + 1) % 3];
    }

    // pre-flip lookup: the half-edge from polygon corner u to corner v
    HalfEdge find_polygon_halfedge(int poly, int u, int v) const {
        for (size_t ti = 0; ti < tris.size(); ++ti) {
            if (tri_polygon.empty() || tri_polygon[ti] != poly) continue;
            for (int k = 0; k < 3; ++k)
                if (tri_corner[ti][k] == u && tri_corner[ti][(k + 1) % 3] == v)
                    return HalfEdge{static_cast<int>(ti), k};
        }
        throw surface_error("no triangulation edge between the requested corners");
    }

    Triangulation<double> to_approx() const {
        Triangulation<double> A;
        A.tris.reserve(tris.size());
        for (const auto& t : tris) {
            typename Triangulation<double>::Tri q;
            q.vclass = t.vclass;
            for (int k = 0; k < 3; ++k) q.hol[k] = t.hol[k].to_double();
            q.nbr = t.nbr;
            q.edge = t.edge;
            A.tris.push_back(std::move(q));
        }
        A.edge_count = edge_count;
        A.edge_rep = edge_rep;
        A.edge_chain = edge_chain;
        A.polygon_edge = polygon_edge;
        A.edge_is_boundary = edge_is_boundary;
        A.tri_polygon = tri_polygon;
        A.tri_corner = tri_corner;
        A.flips_performed = flips_performed;
        return A;
    }

    DelaunayStatus status(int eid) const {
        HalfEdge h = edge_rep[eid];
        const Tri& t = tris[h.tri];
        Vec2<R> a{scalar_traits<R>::from_int(0), scalar_traits<R>::from_int(0)};
        Vec2<R> b = t.hol[h.k];
        Vec2<R> c = b + t.hol[(h.k + 1) % 3];
        Vec2<R> d = developed_apex(h);
        int s = incircle(a, b, c, d);
        if (s > 0) return DelaunayStatus::non_delaunay;
        if (s == 0) return DelaunayStatus::degenerate;
        return DelaunayStatus::strict;
    }

    double min_edge_length() const {
        double best = -1;
        for (int e = 0; e < edge_count; ++e) {
            double l = hol(edge_rep[e]).length();
            if (best < 0 || l < best) best = l;
        }
        return best;
    }

    R total_double_area() const {
        R acc = scalar_traits<R>::from_int(0);
        for (const auto& t : tris) acc += t.hol[0].cross(t.hol[0] + t.hol[1]);
        return acc;
    }

    void check_invariants() const {
        for (size_t ti = 0; ti < tris.size(); ++ti) {
            const Tri& t = tris[ti];
            Vec2<R> sum = t.hol[0] + t.hol[1] + t.hol[2];
            if constexpr (scalar_traits<R>::exact) {
                if (!(sum.x.is_zero() && sum.y.is_zero()))
                    throw surface_error("triangle holonomies do not close");
                if (t.hol[0].cross(t.hol[1]).sign() <= 0)
                    throw surface_error("triangle not counterclockwise");
            }
            for (int k = 0; k < 3; ++k) {
                HalfEdge h{static_cast<int>(ti), k};
                HalfEdge g = partner(h);
                if (!(partner(g) == h)) throw surface_error("adjacency is not an involution");
                Vec2<R> opp = hol(h) + hol(g);
                if constexpr (scalar_traits<R>::exact)
                    if (!(opp.x.is_zero() && opp.y.is_zero()))
                        throw surface_error("glued half-edges not opposite");
            }
        }
    }

    // flips the edge, assuming its two sides form a flippable quad
    void flip(int eid) {
        HalfEdge h = edge_rep[eid];
        HalfEdge g = partner(h);
        Tri& t1 = tris[h.tri];
        Tri& t2 = tris[g.tri];
        int k1 = h.k, k2 = g.k;

        int A = t1.vclass[k1], B = t1.vclass[(k1 + 1) % 3], C = t1.vclass[(k1 + 2) % 3];
        int D = t2.vclass[(k2 + 2) % 3];

        Vec2<R> hol_bc = t1.hol[(k1 + 1) % 3], hol_ca = t1.hol[(k1 + 2) % 3];
        Vec2<R> hol_ad = t2.hol[(k2 + 1) % 3], hol_db = t2.hol[(k2 + 2) % 3];

        HalfEdge s_bc{h.tri, (k1 + 1) % 3}, s_ca{h.tri, (k1 + 2) % 3};
        HalfEdge s_ad{g.tri, (k2 + 1) % 3}, s_db{g.tri, (k2 + 2) % 3};
        HalfEdge p_bc = partner(s_bc), p_ca = partner(s_ca);
        HalfEdge p_ad = partner(s_ad), p_db = partner(s_db);
        int e_bc = edge_id(s_bc), e_ca = edge_id(s_ca), e_ad = edge_id(s_ad), e_db = edge_id(s_db);

        // new oriented edge D -> C = (D -> B) + (B -> C)
        std::vector<long long> chain_db = oriented_chain(s_db);
        std::vector<long long> chain_bc = oriented_chain(s_bc);
        for (size_t i = 0; i < chain_db.size(); ++i) chain_db[i] += chain_bc[i];
        Vec2<R> hol_dc = hol_db + hol_bc;

        // t1 becomes (A, D, C); t2 becomes (D, B, C)
        t1.vclass = {A, D, C};
        t1.hol = {hol_ad, hol_dc, hol_ca};
        t1.edge = {e_ad, eid, e_ca};
        t2.vclass = {D, B, C};
        t2.hol = {hol_db, hol_bc, -hol_dc};
        t2.edge = {e_db, e_bc, eid};

        HalfEdge n_ad{h.tri, 0}, n_dc{h.tri, 1}, n_ca{h.tri, 2};
        HalfEdge n_db{g.tri, 0}, n_bc{g.tri, 1}, n_cd{g.tri, 2};

        auto remap = [&](HalfEdge p) {
            if (p == s_bc) return n_bc;
            if (p == s_ca) return n_ca;
            if (p == s_ad) return n_ad;
            if (p == s_db) return n_db;
            return p;
        };
        auto tie = [&](HalfEdge a, HalfEdge b) {
            tris[a.tri].nbr[a.k] = b;
            tris[b.tri].nbr[b.k] = a;
        };
        tie(n_dc, n_cd);
        tie(n_ad, remap(p_ad));
        tie(n_ca, remap(p_ca));
        tie(n_db, remap(p_db));
        tie(n_bc, remap(p_bc));

        edge_rep[eid] = n_dc;
        edge_chain[eid] = std::move(chain_db);
        auto fix_rep = [&](int e) {
            HalfEdge r = edge_rep[e];
            if (r == s_bc || r == s_ca || r == s_ad || r == s_db) edge_rep[e] = remap(r);
            // the rep may also sit on an untouched half-edge of t1/t2; those
            // positions were reassigned above, so remap anything in t1/t2
            r = edge_rep[e];
            if ((r.tri == h.tri || r.tri == g.tri) && edge_id(r) != e)
                edge_rep[e] = partner_scan(e);
        };
        fix_rep(e_bc);
        fix_rep(e_ca);
        fix_rep(e_ad);
        fix_rep(e_db);
        ++flips_performed;
    }

private:
    HalfEdge partner_scan(int eid) const {
        for (size_t ti = 0; ti < tris.size(); ++ti)
            for (int k = 0; k < 3; ++k)
                if (tris[ti].edge[k] == eid) return HalfEdge{static_cast<int>(ti), k};
        throw surface_error("edge id lost");
    }
};

namespace detail {

// strictly inside the ccw open sector from ray a to ray b (angle in (0, 2pi))
template <class R>
bool sector_contains_strict(const Vec2<R>& a, const Vec2<R>& b, const Vec2<R>& u) {
    auto same_dir = [](const Vec2<R>& p, const Vec2<R>& q) {
        return scalar_traits<R>::sign(p.cross(q)) == 0 && scalar_traits<R>::sign(p.dot(q)) > 0;
    };
    if (same_dir(a, u) || same_dir(b, u)) return false;
    int sab = scalar_traits<R>::sign(a.cross(b));
    if (sab > 0)
        return scalar_traits<R>::sign(a.cross(u)) > 0 && scalar_traits<R>::sign(u.cross(b)) > 0;
    if (sab < 0)
        return !(scalar_traits<R>::sign(b.cross(u)) >= 0 &&
                 scalar_traits<R>::sign(u.cross(a)) >= 0);
    return scalar_traits<R>::sign(a.cross(u)) > 0;  // angle exactly pi
}

// is (i, j) a diagonal of the sub-polygon given by `ring` (indices into p)?
template <class R>
bool is_diagonal(const PolygonSpec<R>& p, const std::vector<int>& ring, int ri, int rj) {
    int n = static_cast<int>(ring.size());
    if (ri == rj) return false;
    if ((ri + 1) % n == rj || (rj + 1) % n == ri) return false;
    const Vec2<R>&vi = p.vertices[ring[ri]], &vj = p.vertices[ring[rj]];
    // locally interior at ri
    Vec2<R> a = p.vertices[ring[(ri + 1) % n]] - vi;
    Vec2<R> b = p.vertices[ring[(ri + n - 1) % n]] - vi;
    if (!sector_contains_strict(a, b, vj - vi)) return false;
    for (int k = 0; k < n; ++k) {
        int k1 = (k + 1) % n;
        const Vec2<R>&ek = p.vertices[ring[k]], &ek1 = p.vertices[ring[k1]];
        bool shares = (k == ri || k1 == ri || k == rj || k1 == rj);
        if (!shares) {
            if (segments_intersect(vi, vj, ek, ek1)) return false;
        } else {
            // only the shared endpoint may touch
            if (on_open_segment(ek, vi, vj) || on_open_segment(ek1, vi, vj)) return false;
            if (on_open_segment(vi, ek, ek1) || on_open_segment(vj, ek, ek1)) return false;
        }
    }
    return true;
}

template <class R>
void triangulate_ring(const PolygonSpec<R>& p, std::vector<int> ring,
                      std::vector<std::array<int, 3>>& out) {
    int n = static_cast<int>(ring.size());
    if (n < 3) throw surface_error("degenerate ring in triangulation");
    if (n == 3) {
        out.push_back({ring[0], ring[1], ring[2]});
        return;
    }
    // prefer the shortest valid diagonal; deterministic tie-break by index
    int best_i = -1, best_j = -1;
    bool have = false;
    R best_len{};
    for (int i = 0; i < n; ++i) {
        for (int j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (!is_diagonal(p, ring, i, j)) continue;
            R len = (p.vertices[ring[j]] - p.vertices[ring[i]]).norm2();
            if (!have || scalar_traits<R>::sign(len - best_len) < 0) {
                have = true;
                best_len = len;
                best_i = i;
                best_j = j;
            }
        }
    }
    if (!have) throw surface_error("no diagonal found; polygon not simple?");
    std::vector<int> left(ring.begin() + best_i, ring.begin() + best_j + 1);
    std::vector<int> right(ring.begin() + best_j, ring.end());
    right.insert(right.end(), ring.begin(), ring.begin() + best_i + 1);
    triangulate_ring(p, std::move(left), out);
    triangulate_ring(p, std::move(right), out);
}

}  // namespace detail

// ear-clip every polygon by diagonals between its corners; the vertex set of
// the result is exactly the singularity set and every polygon edge is an edge
template <class R>
Triangulation<R> triangulate(const Surface<R>& s) {
    Triangulation<R> T;
    T.polygon_edge.resize(s.polygons().size());

    std::map<std::pair<int, std::pair<int, int>>, HalfEdge> directed;  // (poly,(u,v)) -> halfedge
    for (size_t pi = 0; pi < s.polygons().size(); ++pi) {
        const auto& poly = s.polygons()[pi];
        T.polygon_edge[pi].assign(poly.size(), HalfEdge{});
        std::vector<int> ring(poly.size());
        std::iota(ring.begin(), ring.end(), 0);
        std::vector<std::array<int, 3>> local;
        detail::triangulate_ring(poly, ring, local);
        for (const auto& tri : local) {
            typename Triangulation<R>::Tri t;
            int ti = T.triangle_count();
            for (int k = 0; k < 3; ++k) {
                int u = tri[k], v = tri[(k + 1) % 3];
                t.vclass[k] = s.vertex_class(static_cast<int>(pi), u);
                t.hol[k] = poly.vertices[v] - poly.vertices[u];
                t.nbr[k] = HalfEdge{};
                t.edge[k] = -1;
                directed[{static_cast<int>(pi), {u, v}}] = HalfEdge{ti, k};
            }
            T.tris.push_back(std::move(t));
            T.tri_polygon.push_back(static_cast<int>(pi));
            T.tri_corner.push_back(tri);
        }
    }

    auto link = [&](HalfEdge a, HalfEdge b, bool boundary) {
        int eid = T.edge_count++;
        T.tris[a.tri].nbr[a.k] = b;
        T.tris[b.tri].nbr[b.k] = a;
        T.tris[a.tri].edge[a.k] = eid;
        T.tris[b.tri].edge[b.k] = eid;
        T.edge_rep.push_back(a);
        T.edge_is_boundary.push_back(boundary);
    };

    for (size_t pi = 0; pi < s.polygons().size(); ++pi) {
        const auto& poly = s.polygons()[pi];
        int n = poly.size();
        // boundary edges through the surface gluing
        for (int e = 0; e < n; ++e) {
            auto it = directed.find({static_cast<int>(pi), {e, (e + 1) % n}});
            if (it == directed.end()) throw surface_error("missing boundary half-edge");
            T.polygon_edge[pi][e] = it->second;
        }
        // internal diagonals
        for (const auto& [key, h] : directed) {
            if (key.first != static_cast<int>(pi)) continue;
            auto [u, v] = key.second;
            if (v == (u + 1) % n) continue;  // boundary, handled via gluing
            if (u < v) {
                auto rev = directed.find({static_cast<int>(pi), {v, u}});
                if (rev == directed.end()) throw surface_error("unmatched diagonal");
                link(h, rev->second, false);
            }
        }
    }
    for (const auto& pr : s.gluing_pairs()) {
        HalfEdge a = T.polygon_edge[pr.first.poly][pr.first.edge];
        HalfEdge b = T.polygon_edge[pr.second.poly][pr.second.edge];
        link(a, b, true);
    }

    T.edge_chain.assign(T.edge_count, {});
    for (int e = 0; e < T.edge_count; ++e) {
        T.edge_chain[e].assign(T.edge_count, 0);
        T.edge_chain[e][e] = 1;
    }
    if (2 * T.edge_count != 3 * T.triangle_count())
        throw surface_error("edge/triangle count mismatch");
    T.check_invariants();
    return T;
}

struct flip_error : std::runtime_error {
    explicit flip_error(const std::string& m) : std::runtime_error(m) {}
};

// Flip until every edge is strict or degenerate under the unfolded-quad
// incircle test. Cocircular edges are never flipped. `seed` permutes the scan
// order (seed 0 keeps index order), exercising the choice among degenerate
// Delaunay triangulations.
template <class R>
Triangulation<R> flip_to_delaunay(Triangulation<R> T, unsigned seed = 0, long long max_flips = -1) {
    if (max_flips < 0) max_flips = 200 + 40LL * T.edge_count * T.edge_count;
    std::vector<int> order(T.edge_count);
    std::iota(order.begin(), order.end(), 0);
    if (seed != 0) {
        std::mt19937 rng(seed);
        std::shuffle(order.begin(), order.end(), rng);
    }
    long long flips = 0;
    bool again = true;
    while (again) {
        again = false;
        for (int eid : order) {
            if (T.status(eid) == DelaunayStatus::non_delaunay) {
                T.flip(eid);
                if (++flips > max_flips)
                    throw flip_error("flip budget exceeded; inconsistent predicates?");
                again = true;
            }
        }
    }
    T.check_invariants();
    return T;
}

// per-triangle circumradius + inradius report against the area bound
struct CarnotAudit {
    std::vector<double> carnot;          // R + r per triangle
    std::vector<bool> equality_triangle; // equilateral with unit side
    double total_area = 0;
    double bound = 0;  // (sqrt(3)/2) * (2g - 2 + r)
    bool holds = false;
};

template <class R>
CarnotAudit carnot_audit(const Triangulation<R>& T, double systole) {
    if (systole < 1.0 - 1e-12)
        throw surface_error("carnot_audit: systole must be >= 1 (rescale first)");
    CarnotAudit a;
    for (const auto& t : T.tris) {
        double l1 = t.hol[0].length(), l2 = t.hol[1].length(), l3 = t.hol[2].length();
        double area = 0.5 * std::abs(scalar_traits<R>::to_double(t.hol[0].cross(t.hol[1])));
        a.total_area += area;
        double s = (l1 + l2 + l3) / 2;
        a.carnot.push_back(l1 * l2 * l3 / (4 * area) + area / s);
        bool eq = std::abs(l1 - 1) < 1e-12 && std::abs(l2 - 1) < 1e-12 && std::abs(l3 - 1) < 1e-12;
        if constexpr (scalar_traits<R>::exact)
            eq = (t.hol[0].norm2() == QScalar(1)) && (t.hol[1].norm2() == QScalar(1)) &&
                 (t.hol[2].norm2() == QScalar(1));
        a.equality_triangle.push_back(eq);
    }
    a.bound = 0.8660254037844386 * (T.triangle_count() / 2.0);
    a.holds = a.total_area >= a.bound - 1e-9;
    return a;
}

}  // namespace flatsys
