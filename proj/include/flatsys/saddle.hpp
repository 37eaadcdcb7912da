#pragma once

// Saddle connection enumeration by unfolding triangle chains.
//
// From every corner of every triangle we expand the chains of triangles
// visible inside a narrowing cone of directions; a chain is pruned as soon as
// its window cannot be reached within the length bound. Connections lying
// inside gluing edges are emitted from edge data directly. Enumeration is
// complete for the closed bound: all unoriented connections with
// |holonomy| <= lmax, each exactly once.

#include "triangulation.hpp"

#include <cstdint>
#include <deque>
#include <map>

namespace flatsys {

struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& m) : std::runtime_error(m) {}
};

constexpr long long kDefaultNodeBudget = 10'000'000;

template <class R>
struct SaddleConnection {
    int start_class = -1;
    int end_class = -1;
    Vec2<R> holonomy;                // canonical: closed upper half-plane, +x tie-break
    double length = 0;
    HalfEdge start_corner;           // sector emitting the connection
    HalfEdge end_corner;             // sector receiving it
    std::vector<HalfEdge> crossings; // half-edges exited, in order from start_corner
    bool along_edge = false;
    int edge_id = -1;                // valid when along_edge

    R norm2() const { return holonomy.norm2(); }
};

template <class R>
struct SystoleReport {
    double systole = 0;
    std::vector<SaddleConnection<R>> shortest;
    int count = 0;
    bool exact = scalar_traits<R>::exact;
};

namespace detail {

inline std::vector<int64_t> oriented_key(const HalfEdge& start, const std::vector<HalfEdge>& xs,
                                         const HalfEdge& end) {
    std::vector<int64_t> k;
    k.reserve(xs.size() + 2);
    k.push_back(start.tri * 3 + start.k);
    for (const auto& h : xs) k.push_back(h.tri * 3 + h.k);
    k.push_back(end.tri * 3 + end.k);
    return k;
}

template <class R>
std::vector<int64_t> reversed_key(const Triangulation<R>& T, const HalfEdge& start,
                                  const std::vector<HalfEdge>& xs, const HalfEdge& end) {
    std::vector<HalfEdge> rev;
    rev.reserve(xs.size());
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) rev.push_back(T.partner(*it));
    return oriented_key(end, rev, start);
}

template <class R>
struct UnfoldState {
    HalfEdge crossed;     // half-edge just crossed (in the triangle we left)
    Vec2<R> right;        // developed tail of `crossed` (right end of the window)
    Vec2<R> left;         // developed head of `crossed` (left end)
    Vec2<R> cone_r;       // open cone of admissible directions, angle < pi
    Vec2<R> cone_l;
    std::vector<HalfEdge> crossings;
};

template <class R>
bool strictly_in_cone(const Vec2<R>& r, const Vec2<R>& l, const Vec2<R>& d) {
    return scalar_traits<R>::sign(r.cross(d)) > 0 && scalar_traits<R>::sign(d.cross(l)) > 0;
}

// does the ray from the origin along d meet the open segment (p, q)?
template <class R>
bool ray_hits_open(const Vec2<R>& d, const Vec2<R>& p, const Vec2<R>& q) {
    R cp = d.cross(p), cq = d.cross(q);
    int sp = scalar_traits<R>::sign(cp), sq = scalar_traits<R>::sign(cq);
    if (sp == 0 || sq == 0 || sp == sq) return false;
    // lambda > 0 at the crossing point
    R num = d.dot(p) * (-cq) + d.dot(q) * cp;
    return scalar_traits<R>::sign(num) * scalar_traits<R>::sign(cp - cq) > 0;
}

// squared distance from the origin to the closed segment [a, b]
template <class R>
double segment_dist2(const Vec2<R>& a, const Vec2<R>& b) {
    Vec2<double> ad = a.to_double(), bd = b.to_double(), e = bd - ad;
    double den = e.norm2();
    if (den <= 0) return ad.norm2();
    double t = -(ad.dot(e)) / den;
    if (t <= 0) return ad.norm2();
    if (t >= 1) return bd.norm2();
    return (ad + e * t).norm2();
}

}  // namespace detail

template <class R>
std::vector<SaddleConnection<R>> enumerate_saddle_connections(const Triangulation<R>& T,
                                                              double lmax,
                                                              long long budget = kDefaultNodeBudget) {
    if (!(lmax > 0)) throw surface_error("enumerate: lmax must be positive");
    const double lmax2 = lmax * lmax * (1 + 1e-12);  // closed bound
    std::map<std::vector<int64_t>, SaddleConnection<R>> found;

    // connections contained in gluing edges
    for (int e = 0; e < T.edge_count; ++e) {
        HalfEdge h = T.edge_rep[e];
        Vec2<R> v = T.hol(h);
        if (scalar_traits<R>::to_double(v.norm2()) > lmax2) continue;
        SaddleConnection<R> c;
        c.start_class = T.tail_class(h);
        c.end_class = T.head_class(h);
        c.holonomy = v;
        c.length = v.length();
        c.start_corner = h;
        c.end_corner = T.partner(h);
        c.along_edge = true;
        c.edge_id = e;
        found.emplace(std::vector<int64_t>{-1 - e}, std::move(c));
    }

    long long nodes = 0;
    std::deque<detail::UnfoldState<R>> queue;

    auto push_state = [&](detail::UnfoldState<R>&& st) {
        if (detail::segment_dist2(st.right, st.left) <= lmax2) queue.push_back(std::move(st));
    };

    for (int ti = 0; ti < T.triangle_count(); ++ti) {
        for (int k = 0; k < 3; ++k) {
            // corner k at the origin; the far edge (k+1) is the first window
            Vec2<R> a = T.tris[ti].hol[k];                    // corner k+1
            Vec2<R> b = a + T.tris[ti].hol[(k + 1) % 3];      // corner k+2
            detail::UnfoldState<R> st;
            st.crossed = HalfEdge{ti, (k + 1) % 3};
            st.right = a;
            st.left = b;
            st.cone_r = a;
            st.cone_l = b;
            st.crossings = {st.crossed};
            push_state(std::move(st));
        }
    }

    while (!queue.empty()) {
        if (++nodes > budget)
            throw budget_error("saddle connection enumeration exceeded node budget");
        detail::UnfoldState<R> st = std::move(queue.front());
        queue.pop_front();

        const HalfEdge g = T.partner(st.crossed);
        const int ti = g.tri;
        const Vec2<R>& a = st.right;  // head of g develops onto the right end
        const Vec2<R>& b = st.left;
        Vec2<R> apex = a + T.tris[ti].hol[(g.k + 1) % 3];  // corner g.k+2

        if (detail::strictly_in_cone(st.cone_r, st.cone_l, apex) &&
            scalar_traits<R>::to_double(apex.norm2()) <= lmax2) {
            HalfEdge first = st.crossings.front();
            HalfEdge start{first.tri, (first.k + 2) % 3};
            HalfEdge end{ti, (g.k + 2) % 3};
            SaddleConnection<R> c;
            c.start_class = T.tris[first.tri].vclass[start.k];
            c.end_class = T.tris[ti].vclass[end.k];
            c.holonomy = apex;
            c.length = std::sqrt(scalar_traits<R>::to_double(apex.norm2()));
            c.start_corner = start;
            c.end_corner = end;
            c.crossings = st.crossings;
            auto own = detail::oriented_key(start, c.crossings, end);
            auto rev = detail::reversed_key(T, start, c.crossings, end);
            auto& key = (own <= rev) ? own : rev;
            if (found.find(key) == found.end()) found.emplace(std::move(key), std::move(c));
        }

        // split the cone along the ray through the apex; each nonempty piece
        // exits through exactly one of the two far edges
        std::vector<std::pair<Vec2<R>, Vec2<R>>> pieces;
        if (detail::strictly_in_cone(st.cone_r, st.cone_l, apex)) {
            pieces.push_back({st.cone_r, apex});
            pieces.push_back({apex, st.cone_l});
        } else if (detail::strictly_in_cone(st.cone_r, st.cone_l, -apex)) {
            pieces.push_back({st.cone_r, -apex});
            pieces.push_back({-apex, st.cone_l});
        } else {
            pieces.push_back({st.cone_r, st.cone_l});
        }
        for (auto& [pr, pl] : pieces) {
            Vec2<R> mid = pr + pl;  // interior direction of the piece
            bool goes_right = detail::ray_hits_open(mid, a, apex);
            bool goes_left = !goes_right && detail::ray_hits_open(mid, apex, b);
            if (!goes_right && !goes_left) continue;
            detail::UnfoldState<R> nx;
            nx.cone_r = pr;
            nx.cone_l = pl;
            nx.crossings = st.crossings;
            if (goes_right) {
                nx.crossed = HalfEdge{ti, (g.k + 1) % 3};  // tail at a, head at apex
                nx.right = a;
                nx.left = apex;
            } else {
                nx.crossed = HalfEdge{ti, (g.k + 2) % 3};  // tail at apex, head at b
                nx.right = apex;
                nx.left = b;
            }
            nx.crossings.push_back(nx.crossed);
            push_state(std::move(nx));
        }
    }

    std::vector<SaddleConnection<R>> out;
    out.reserve(found.size());
    for (auto& [key, c] : found) out.push_back(std::move(c));

    // canonical orientation: holonomy in the closed upper half-plane, +x on the axis
    for (auto& c : out) {
        int sy = scalar_traits<R>::sign(c.holonomy.y);
        bool flip = sy < 0 || (sy == 0 && scalar_traits<R>::sign(c.holonomy.x) < 0);
        if (flip) {
            c.holonomy = -c.holonomy;
            std::swap(c.start_class, c.end_class);
            std::swap(c.start_corner, c.end_corner);
            std::vector<HalfEdge> rev;
            rev.reserve(c.crossings.size());
            for (auto it = c.crossings.rbegin(); it != c.crossings.rend(); ++it)
                rev.push_back(T.partner(*it));
            c.crossings = std::move(rev);
        }
    }

    std::sort(out.begin(), out.end(), [](const SaddleConnection<R>& x, const SaddleConnection<R>& y) {
        if constexpr (scalar_traits<R>::exact) {
            int s = (x.norm2() - y.norm2()).sign();
            if (s != 0) return s < 0;
            s = (x.holonomy.x - y.holonomy.x).sign();
            if (s != 0) return s < 0;
            s = (x.holonomy.y - y.holonomy.y).sign();
            return s < 0;
        } else {
            if (x.length != y.length) return x.length < y.length;
            if (x.holonomy.x != y.holonomy.x) return x.holonomy.x < y.holonomy.x;
            return x.holonomy.y < y.holonomy.y;
        }
    });
    return out;
}

template <class R>
std::vector<SaddleConnection<R>> enumerate_saddle_connections(const Surface<R>& s, double lmax,
                                                              long long budget = kDefaultNodeBudget) {
    return enumerate_saddle_connections(triangulate(s), lmax, budget);
}

// Systole and all realizers. The shortest triangulation edge bounds the
// systole from above, so one enumeration at that bound suffices; if the node
// budget trips, the bound is halved and retried (the systole may be far below
// the shortest edge).
template <class R>
SystoleReport<R> systole(const Triangulation<R>& T, long long budget = kDefaultNodeBudget) {
    double l0 = T.min_edge_length();
    std::vector<SaddleConnection<R>> all;
    for (int attempt = 0;; ++attempt) {
        try {
            all = enumerate_saddle_connections(T, l0, budget);
        } catch (const budget_error&) {
            if (attempt >= 6) throw;
            l0 /= 2;
            continue;
        }
        if (all.empty())
            throw budget_error("systole: enumeration emptied below the edge bound");
        break;
    }

    SystoleReport<R> rep;
    rep.systole = all.front().length;
    if constexpr (scalar_traits<R>::exact) {
        R min2 = all.front().norm2();
        for (auto& c : all)
            if ((c.norm2() - min2).sign() == 0) rep.shortest.push_back(std::move(c));
    } else {
        double tau = scalar_traits<double>::tau;
        for (auto& c : all)
            if (c.length <= rep.systole + tau) rep.shortest.push_back(std::move(c));
    }
    rep.count = static_cast<int>(rep.shortest.size());
    return rep;
}

template <class R>
SystoleReport<R> systole(const Surface<R>& s, long long budget = kDefaultNodeBudget) {
    return systole(triangulate(s), budget);
}

// Replays a crossing certificate: develops the chain, checks every crossing
// lies strictly inside its open window and that the holonomy is the final
// apex. Returns the developed crossing positions.
template <class R>
std::vector<Vec2<R>> replay_certificate(const Triangulation<R>& T, const SaddleConnection<R>& c) {
    std::vector<Vec2<R>> positions;
    if (c.along_edge) return positions;
    const HalfEdge s = c.start_corner;
    if (c.crossings.empty() || !(c.crossings.front() == HalfEdge{s.tri, (s.k + 1) % 3}))
        throw surface_error("certificate does not start at its start corner");
    Vec2<R> a = T.tris[s.tri].hol[s.k];
    Vec2<R> b = a + T.tris[s.tri].hol[(s.k + 1) % 3];
    const Vec2<R>& d = c.holonomy;
    HalfEdge g{};
    for (size_t i = 0; i < c.crossings.size(); ++i) {
        R ca = d.cross(a), cb = d.cross(b);
        if (!(scalar_traits<R>::sign(ca) < 0 && scalar_traits<R>::sign(cb) > 0))
            throw surface_error("certificate crossing not strictly inside its window");
        R t = ca / (ca - cb);
        Vec2<R> x = a + (b - a) * t;
        if (scalar_traits<R>::sign(x.dot(d)) <= 0)
            throw surface_error("certificate crossing behind the start vertex");
        positions.push_back(x);
        g = T.partner(c.crossings[i]);
        Vec2<R> apex = a + T.tris[g.tri].hol[(g.k + 1) % 3];
        if (i + 1 < c.crossings.size()) {
            HalfEdge next = c.crossings[i + 1];
            if (next == HalfEdge{g.tri, (g.k + 1) % 3}) {
                b = apex;
            } else if (next == HalfEdge{g.tri, (g.k + 2) % 3}) {
                a = apex;
            } else {
                throw surface_error("certificate crossings not contiguous");
            }
        } else {
            if (!(c.end_corner == HalfEdge{g.tri, (g.k + 2) % 3}))
                throw surface_error("certificate does not end at its end corner");
            if constexpr (scalar_traits<R>::exact) {
                if (!(apex == d)) throw surface_error("certificate holonomy mismatch");
            } else {
                if ((apex - d).length() > 1e-7 * (1 + d.length()))
                    throw surface_error("certificate holonomy mismatch");
            }
        }
    }
    return positions;
}

}  // namespace flatsys
