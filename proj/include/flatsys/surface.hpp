#pragma once

// Translation surfaces as polygon gluings.
//
// A surface is a list of ccw simple polygons together with a fixed-point-free
// involution pairing edges; paired edges are parallel of equal length and
// traversed in opposite directions, so the identification is a translation.
// Every polygon corner is a singularity (possibly a marked point). Vertex
// classes, cone angles, stratum and genus are derived on construction.

#include "geometry.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace flatsys {

struct surface_error : std::runtime_error {
    explicit surface_error(const std::string& m) : std::runtime_error(m) {}
};

struct EdgeRef {
    int poly = -1;
    int edge = -1;

    bool valid() const { return poly >= 0; }
    bool operator==(const EdgeRef& o) const { return poly == o.poly && edge == o.edge; }
    bool operator!=(const EdgeRef& o) const { return !(*this == o); }
    bool operator<(const EdgeRef& o) const {
        return poly != o.poly ? poly < o.poly : edge < o.edge;
    }
};

template <class R>
struct PolygonSpec {
    std::vector<Vec2<R>> vertices;  // ccw

    int size() const { return static_cast<int>(vertices.size()); }
    const Vec2<R>& vertex(int i) const { return vertices[mod(i)]; }
    Vec2<R> edge_vector(int e) const { return vertices[mod(e + 1)] - vertices[mod(e)]; }
    int mod(int i) const {
        int n = size();
        return ((i % n) + n) % n;
    }

    // twice the signed area
    R double_area() const {
        R acc = scalar_traits<R>::from_int(0);
        for (int i = 0; i < size(); ++i) acc += vertices[i].cross(vertices[mod(i + 1)]);
        return acc;
    }
};

struct StratumSignature {
    std::vector<int> orders;  // sorted descending, marked points as 0
    int genus = 0;

    bool operator==(const StratumSignature& o) const {
        return orders == o.orders && genus == o.genus;
    }
    std::string str() const {
        std::string s = "H(";
        for (size_t i = 0; i < orders.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(orders[i]);
        }
        return s + ")";
    }
};

template <class R>
class Surface {
public:
    using Scalar = R;

    Surface(std::vector<PolygonSpec<R>> polygons, std::vector<std::pair<EdgeRef, EdgeRef>> gluing,
            std::string name = "")
        : polys_(std::move(polygons)), pairs_(std::move(gluing)), name_(std::move(name)) {
        validate_polygons();
        build_partner_table();
        validate_gluing_geometry();
        check_connected();
        walk_vertex_classes();
        derive_topology();
    }

    const std::vector<PolygonSpec<R>>& polygons() const { return polys_; }
    const std::vector<std::pair<EdgeRef, EdgeRef>>& gluing_pairs() const { return pairs_; }
    const std::string& name() const { return name_; }

    EdgeRef partner(const EdgeRef& e) const { return partner_[e.poly][e.edge]; }
    Vec2<R> edge_vector(const EdgeRef& e) const { return polys_[e.poly].edge_vector(e.edge); }

    int vertex_class(int poly, int corner) const { return corner_class_[poly][corner]; }
    int vertex_class_count() const { return static_cast<int>(class_order_.size()); }
    int class_order(int cls) const { return class_order_[cls]; }
    const StratumSignature& stratum() const { return stratum_; }
    int genus() const { return stratum_.genus; }
    int edge_pair_count() const { return static_cast<int>(pairs_.size()); }

    R area() const {
        R acc = scalar_traits<R>::from_int(0);
        for (const auto& p : polys_) acc += p.double_area();
        return acc / scalar_traits<R>::from_int(2);
    }

    double shortest_edge_length() const {
        double best = -1;
        for (const auto& pr : pairs_) {
            double l = edge_vector(pr.first).length();
            if (best < 0 || l < best) best = l;
        }
        return best;
    }

    // corner-walk step: rotating ccw about the vertex of corner (p, i) lands
    // on the corner across the glued incoming edge
    std::pair<int, int> next_corner_ccw(int poly, int corner) const {
        int prev_edge = polys_[poly].mod(corner - 1);
        EdgeRef q = partner_[poly][prev_edge];
        return {q.poly, q.edge};
    }

    Surface<double> to_approx() const {
        std::vector<PolygonSpec<double>> ps;
        ps.reserve(polys_.size());
        for (const auto& p : polys_) {
            PolygonSpec<double> q;
            q.vertices.reserve(p.vertices.size());
            for (const auto& v : p.vertices) q.vertices.push_back(v.to_double());
            ps.push_back(std::move(q));
        }
        return Surface<double>(std::move(ps), pairs_, name_);
    }

private:
    std::vector<PolygonSpec<R>> polys_;
    std::vector<std::pair<EdgeRef, EdgeRef>> pairs_;
    std::string name_;
    std::vector<std::vector<EdgeRef>> partner_;
    std::vector<std::vector<int>> corner_class_;
    std::vector<int> class_order_;
    StratumSignature stratum_;

    void validate_polygons() const {
        if (polys_.empty()) throw surface_error("surface needs at least one polygon");
        for (size_t pi = 0; pi < polys_.size(); ++pi) {
            const auto& p = polys_[pi];
            int n = p.size();
            if (n < 3) throw surface_error("polygon " + std::to_string(pi) + " has fewer than 3 vertices");
            if (scalar_traits<R>::sign(p.double_area()) <= 0)
                throw surface_error("polygon " + std::to_string(pi) + " is not counterclockwise");
            for (int i = 0; i < n; ++i) {
                Vec2<R> a = p.edge_vector(i);
                if (scalar_traits<R>::sign(a.norm2()) == 0)
                    throw surface_error("polygon " + std::to_string(pi) + " has a zero-length edge");
                // zero interior angle (spike) is not simple
                Vec2<R> back = p.vertex(i - 1) - p.vertex(i);
                Vec2<R> fwd = p.vertex(i + 1) - p.vertex(i);
                if (scalar_traits<R>::sign(fwd.cross(back)) == 0 &&
                    scalar_traits<R>::sign(fwd.dot(back)) > 0)
                    throw surface_error("polygon " + std::to_string(pi) + " has a zero-angle corner");
            }
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
                    if (adjacent) continue;
                    if (segments_intersect(p.vertex(i), p.vertex(i + 1), p.vertex(j),
                                           p.vertex(j + 1)))
                        throw surface_error("polygon " + std::to_string(pi) + " is not simple");
                }
            }
        }
    }

    void build_partner_table() {
        partner_.assign(polys_.size(), {});
        for (size_t pi = 0; pi < polys_.size(); ++pi)
            partner_[pi].assign(polys_[pi].size(), EdgeRef{});
        auto place = [&](const EdgeRef& a, const EdgeRef& b) {
            if (a.poly < 0 || a.poly >= static_cast<int>(polys_.size()) || a.edge < 0 ||
                a.edge >= polys_[a.poly].size())
                throw surface_error("gluing references edge out of range");
            if (partner_[a.poly][a.edge].valid())
                throw surface_error("edge glued more than once");
            partner_[a.poly][a.edge] = b;
        };
        for (const auto& pr : pairs_) {
            if (pr.first == pr.second) throw surface_error("edge glued to itself");
            place(pr.first, pr.second);
            place(pr.second, pr.first);
        }
        for (size_t pi = 0; pi < polys_.size(); ++pi)
            for (int e = 0; e < polys_[pi].size(); ++e)
                if (!partner_[pi][e].valid())
                    throw surface_error("edge (" + std::to_string(pi) + "," + std::to_string(e) +
                                        ") is unglued");
    }

    void validate_gluing_geometry() const {
        for (const auto& pr : pairs_) {
            Vec2<R> va = edge_vector(pr.first);
            Vec2<R> vb = edge_vector(pr.second);
            Vec2<R> sum = va + vb;
            if constexpr (scalar_traits<R>::exact) {
                if (!(sum.x.is_zero() && sum.y.is_zero()))
                    throw surface_error("glued edges are not opposite translates");
            } else {
                double scale = std::max(1.0, std::max(std::abs(va.x) + std::abs(va.y),
                                                      std::abs(vb.x) + std::abs(vb.y)));
                if (std::abs(sum.x) > scalar_traits<double>::tau * scale ||
                    std::abs(sum.y) > scalar_traits<double>::tau * scale)
                    throw surface_error("glued edges are not opposite translates");
            }
        }
    }

    void check_connected() const {
        std::vector<int> root(polys_.size());
        std::iota(root.begin(), root.end(), 0);
        std::function<int(int)> find = [&](int x) {
            while (root[x] != x) x = root[x] = root[root[x]];
            return x;
        };
        for (const auto& pr : pairs_) root[find(pr.first.poly)] = find(pr.second.poly);
        for (size_t pi = 0; pi < polys_.size(); ++pi)
            if (find(static_cast<int>(pi)) != find(0))
                throw surface_error("surface is disconnected");
    }

    // ccw half-open arc (a, b] of directions contains u?  The arc angle is the
    // corner's interior angle, anywhere in (0, 2pi).
    static bool arc_contains(const Vec2<R>& a, const Vec2<R>& b, const Vec2<R>& u) {
        auto same_dir = [](const Vec2<R>& p, const Vec2<R>& q) {
            return scalar_traits<R>::sign(p.cross(q)) == 0 && scalar_traits<R>::sign(p.dot(q)) > 0;
        };
        if (same_dir(b, u)) return true;
        if (same_dir(a, u)) return false;
        int sab = scalar_traits<R>::sign(a.cross(b));
        if (sab > 0)
            return scalar_traits<R>::sign(a.cross(u)) > 0 && scalar_traits<R>::sign(u.cross(b)) > 0;
        if (sab < 0)
            return !(scalar_traits<R>::sign(b.cross(u)) > 0 &&
                     scalar_traits<R>::sign(u.cross(a)) > 0);
        // a, b antiparallel: angle exactly pi
        return scalar_traits<R>::sign(a.cross(u)) > 0;
    }

    void walk_vertex_classes() {
        corner_class_.assign(polys_.size(), {});
        for (size_t pi = 0; pi < polys_.size(); ++pi)
            corner_class_[pi].assign(polys_[pi].size(), -1);
        class_order_.clear();

        for (size_t pi = 0; pi < polys_.size(); ++pi) {
            for (int ci = 0; ci < polys_[pi].size(); ++ci) {
                if (corner_class_[pi][ci] >= 0) continue;
                int cls = static_cast<int>(class_order_.size());
                // outgoing ray of the first corner is the crossing reference
                Vec2<R> ref = polys_[pi].edge_vector(ci);
                int turns = 0;
                int p = static_cast<int>(pi), c = ci;
                do {
                    if (corner_class_[p][c] >= 0)
                        throw surface_error("inconsistent corner walk");
                    corner_class_[p][c] = cls;
                    Vec2<R> a = polys_[p].edge_vector(c);
                    Vec2<R> b = polys_[p].vertex(c - 1) - polys_[p].vertex(c);
                    if (arc_contains(a, b, ref)) ++turns;
                    auto [np, nc] = next_corner_ccw(p, c);
                    p = np;
                    c = nc;
                } while (!(p == static_cast<int>(pi) && c == ci));
                if (turns < 1) throw surface_error("vertex class with vanishing cone angle");
                class_order_.push_back(turns - 1);  // angle = turns * 2pi
            }
        }
    }

    void derive_topology() {
        int V = vertex_class_count();
        int E = static_cast<int>(pairs_.size());
        int F = static_cast<int>(polys_.size());
        int chi = V - E + F;
        if (chi % 2 != 0) throw surface_error("odd Euler characteristic");
        int g = (2 - chi) / 2;
        if (g < 0) throw surface_error("negative genus");
        stratum_.orders = class_order_;
        std::sort(stratum_.orders.begin(), stratum_.orders.end(), std::greater<int>());
        stratum_.genus = g;
        int total_order = std::accumulate(class_order_.begin(), class_order_.end(), 0);
        if (total_order != 2 * g - 2)
            throw surface_error("Gauss-Bonnet mismatch: sum of orders " +
                                std::to_string(total_order) + " != 2g-2 = " +
                                std::to_string(2 * g - 2));
        if (scalar_traits<R>::sign(area()) <= 0) throw surface_error("non-positive area");
    }
};

template <class R>
Surface<R> apply_matrix(const Surface<R>& s, const Mat2<R>& m) {
    if (scalar_traits<R>::sign(m.det()) <= 0)
        throw surface_error("apply_matrix: determinant must be positive");
    std::vector<PolygonSpec<R>> ps;
    ps.reserve(s.polygons().size());
    for (const auto& p : s.polygons()) {
        PolygonSpec<R> q;
        q.vertices.reserve(p.vertices.size());
        for (const auto& v : p.vertices) q.vertices.push_back(m * v);
        ps.push_back(std::move(q));
    }
    return Surface<R>(std::move(ps), s.gluing_pairs(), s.name());
}

template <class R>
Surface<R> scale(const Surface<R>& s, const R& factor) {
    return apply_matrix(s, Mat2<R>::scaling(factor));
}

// homothety to unit area; necessarily approximate (the factor is 1/sqrt(area))
template <class R>
Surface<double> normalize_area(const Surface<R>& s) {
    Surface<double> a = [&] {
        if constexpr (scalar_traits<R>::exact) return s.to_approx();
        else return s;
    }();
    double f = 1.0 / std::sqrt(a.area());
    return scale(a, f);
}

}  // namespace flatsys
