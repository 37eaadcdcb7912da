#pragma once

// Certification: decomposition classifier (Carnot/local-maximum criteria),
// kissing-number audit, period-coordinate perturbation probes, directed
// deformations and first-order rigidity.

#include "extremal.hpp"
#include "forms.hpp"
#include "homology.hpp"

#include <random>

namespace flatsys {

inline double global_systole_bound(int genus, int r) {
    return 1.0 / std::sqrt(0.8660254037844386 * (2 * genus - 2 + r));
}

// everything the verifier needs about one surface, computed once
template <class R>
struct SurfaceAnalysis {
    Surface<R> surface;
    Triangulation<R> T0;   // ear-clip triangulation (polygon edges are edges)
    Triangulation<R> TD;   // Delaunay triangulation
    SystoleReport<R> sys;
    PeriodBasis<R> basis;
    double area;
};

template <class R>
SurfaceAnalysis<R> analyze(const Surface<R>& s, long long budget = kDefaultNodeBudget,
                           unsigned flip_seed = 0) {
    Triangulation<R> T0 = triangulate(s);
    Triangulation<R> TD = flip_to_delaunay(T0, flip_seed);
    SystoleReport<R> rep = systole(TD, budget);
    PeriodBasis<R> B = build_period_basis(T0, TD);
    double area = scalar_traits<R>::to_double(s.area());
    return SurfaceAnalysis<R>{s, std::move(T0), std::move(TD), std::move(rep), std::move(B), area};
}

template <class R>
double normalized_systole(const SurfaceAnalysis<R>& A) {
    return A.sys.systole / std::sqrt(A.area);
}

// --- shortest-connection / Delaunay containment -------------------------------

struct ContainmentWitness {
    bool contained = false;
    // (holonomy, class pair) keys of shortest connections missing from the
    // Delaunay edge multiset, printable for diagnostics
    std::vector<std::string> missing;
};

// Shortest connections sharing a holonomy all have equal length, so multiset
// counting by (canonical holonomy, unordered endpoint classes) decides set
// containment exactly.
template <class R>
ContainmentWitness delaunay_contains_shortest(const Triangulation<R>& TD,
                                              const SystoleReport<R>& rep) {
    auto key_of = [](const Vec2<R>& hol, int a, int b) {
        std::ostringstream os;
        if constexpr (scalar_traits<R>::exact) {
            os << hol.x.to_literal() << "|" << hol.y.to_literal();
        } else {
            // bucket approximate holonomies at half the tolerance
            os.precision(9);
            os << std::round(hol.x / 1e-7) << "|" << std::round(hol.y / 1e-7);
        }
        os << "|" << std::min(a, b) << "," << std::max(a, b);
        return os.str();
    };
    auto canon = [](Vec2<R> v) {
        int sy = scalar_traits<R>::sign(v.y);
        if (sy < 0 || (sy == 0 && scalar_traits<R>::sign(v.x) < 0)) v = -v;
        return v;
    };
    std::map<std::string, int> want;
    for (const auto& c : rep.shortest)
        ++want[key_of(c.holonomy, c.start_class, c.end_class)];
    std::map<std::string, int> have;
    double tol = scalar_traits<R>::exact ? 0 : scalar_traits<double>::tau;
    for (int e = 0; e < TD.edge_count; ++e) {
        HalfEdge h = TD.edge_rep[e];
        if (TD.hol(h).length() <= rep.systole + tol)
            ++have[key_of(canon(TD.hol(h)), TD.tail_class(h), TD.head_class(h))];
    }
    ContainmentWitness w;
    w.contained = true;
    for (const auto& [k, n] : want) {
        if (have[k] < n) {
            w.contained = false;
            w.missing.push_back(k + " x" + std::to_string(n - have[k]));
        }
    }
    return w;
}

// --- decomposition classifier (exact mode) -------------------------------------

enum class PieceType { unit_triangle, regular_unit_hexagon, other_polygon, non_polygonal };

inline const char* to_string(PieceType t) {
    switch (t) {
        case PieceType::unit_triangle: return "unit_triangle";
        case PieceType::regular_unit_hexagon: return "regular_unit_hexagon";
        case PieceType::other_polygon: return "other_polygon";
        default: return "non_polygonal";
    }
}

struct Decomposition {
    struct Piece {
        PieceType type;
        std::vector<int> triangles;
        double area = 0;
    };
    std::vector<Piece> pieces;
    std::vector<int> piece_of_triangle;
    int triangle_pieces = 0, hexagon_pieces = 0, other_pieces = 0;
    bool triangles_connected = false;
    bool hexagon_boundary_in_triangles = false;
};

// Cut along all shortest saddle connections (all of them are Delaunay edges;
// verified) and classify the pieces. Classification is relative to the
// systole: "unit" means side length equal to the systole.
inline Decomposition classify_decomposition(const SurfaceAnalysis<QScalar>& A) {
    const auto& TD = A.TD;
    QScalar min2 = A.sys.shortest.front().norm2();
    std::vector<bool> cut(TD.edge_count, false);
    int cut_edges = 0;
    for (int e = 0; e < TD.edge_count; ++e) {
        if ((TD.hol(TD.edge_rep[e]).norm2() - min2).sign() == 0) {
            cut[e] = true;
            ++cut_edges;
        }
    }
    if (cut_edges != A.sys.count)
        throw surface_error("decomposition: shortest connections not all realized as Delaunay "
                            "edges (count mismatch)");

    const int F = TD.triangle_count();
    std::vector<int> root(F);
    std::iota(root.begin(), root.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (root[x] != x) x = root[x] = root[root[x]];
        return x;
    };
    for (int t = 0; t < F; ++t)
        for (int k = 0; k < 3; ++k)
            if (!cut[TD.tris[t].edge[k]]) root[find(t)] = find(TD.tris[t].nbr[k].tri);

    std::map<int, int> piece_index;
    Decomposition dec;
    dec.piece_of_triangle.assign(F, -1);
    for (int t = 0; t < F; ++t) {
        int r = find(t);
        if (!piece_index.count(r)) {
            piece_index[r] = static_cast<int>(dec.pieces.size());
            dec.pieces.push_back({});
        }
        int pi = piece_index[r];
        dec.pieces[pi].triangles.push_back(t);
        dec.piece_of_triangle[t] = pi;
    }

    // interior vertices: a vertex class none of whose incident edges is cut
    std::map<int, bool> class_has_cut;
    for (int t = 0; t < F; ++t)
        for (int k = 0; k < 3; ++k)
            class_has_cut[TD.tris[t].vclass[k]] =
                class_has_cut[TD.tris[t].vclass[k]] || cut[TD.tris[t].edge[k]] ||
                cut[TD.tris[t].edge[(k + 2) % 3]];
    std::set<int> pieces_with_interior_vertex;
    for (int t = 0; t < F; ++t)
        for (int k = 0; k < 3; ++k)
            if (!class_has_cut[TD.tris[t].vclass[k]])
                pieces_with_interior_vertex.insert(dec.piece_of_triangle[t]);

    for (auto& piece : dec.pieces) {
        // develop the piece; tree placement with consistency on non-tree edges
        std::map<int, std::array<QVec, 3>> pos;
        std::vector<int> stack = {piece.triangles.front()};
        const auto& t0 = TD.tris[piece.triangles.front()];
        pos[piece.triangles.front()] = {QVec{QScalar(0), QScalar(0)}, t0.hol[0],
                                        t0.hol[0] + t0.hol[1]};
        bool consistent = true;
        size_t processed = 0;
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            ++processed;
            for (int k = 0; k < 3; ++k) {
                int eid = TD.tris[t].edge[k];
                if (cut[eid]) continue;
                HalfEdge g = TD.tris[t].nbr[k];
                QVec tail = pos[t][k], head = pos[t][(k + 1) % 3];
                std::array<QVec, 3> p;
                p[g.k] = head;
                p[(g.k + 1) % 3] = tail;
                p[(g.k + 2) % 3] = tail + TD.tris[g.tri].hol[(g.k + 1) % 3];
                auto it = pos.find(g.tri);
                if (it == pos.end()) {
                    pos[g.tri] = p;
                    stack.push_back(g.tri);
                } else {
                    for (int m = 0; m < 3; ++m)
                        if (!(it->second[m] == p[m])) consistent = false;
                }
            }
        }
        for (int t : piece.triangles) {
            const auto& h = TD.tris[t].hol;
            piece.area += 0.5 * std::abs(scalar_traits<QScalar>::to_double(h[0].cross(h[1])));
        }
        bool interior_vertex =
            pieces_with_interior_vertex.count(dec.piece_of_triangle[piece.triangles.front()]) > 0;
        if (!consistent || interior_vertex || pos.size() != piece.triangles.size()) {
            piece.type = PieceType::non_polygonal;
            continue;
        }
        if (piece.triangles.size() == 1) {
            bool all_cut = cut[TD.tris[piece.triangles[0]].edge[0]] &&
                           cut[TD.tris[piece.triangles[0]].edge[1]] &&
                           cut[TD.tris[piece.triangles[0]].edge[2]];
            piece.type = all_cut ? PieceType::unit_triangle : PieceType::other_polygon;
            continue;
        }
        // boundary walk; a single 6-cycle of systole-length sides on a common
        // circumcircle is a regular hexagon
        HalfEdge start{};
        int boundary_halves = 0;
        for (int t : piece.triangles)
            for (int k = 0; k < 3; ++k)
                if (cut[TD.tris[t].edge[k]]) {
                    ++boundary_halves;
                    start = HalfEdge{t, k};
                }
        auto next_boundary = [&](HalfEdge h) {
            HalfEdge g{h.tri, (h.k + 1) % 3};
            while (!cut[TD.tris[g.tri].edge[g.k]]) {
                HalfEdge p = TD.partner(g);
                g = HalfEdge{p.tri, (p.k + 1) % 3};
            }
            return g;
        };
        std::vector<HalfEdge> cycle;
        HalfEdge h = start;
        do {
            cycle.push_back(h);
            h = next_boundary(h);
        } while (!(h == start) && static_cast<int>(cycle.size()) <= boundary_halves);
        bool single_cycle = (static_cast<int>(cycle.size()) == boundary_halves) && (h == start);
        piece.type = PieceType::other_polygon;
        if (!single_cycle) {
            piece.type = PieceType::non_polygonal;
            continue;
        }
        if (piece.triangles.size() == 4 && cycle.size() == 6) {
            std::vector<QVec> verts;
            for (const auto& bh : cycle) verts.push_back(pos[bh.tri][bh.k]);
            QVec centroid{QScalar(0), QScalar(0)};
            for (const auto& v : verts) centroid = centroid + v;
            Mat2<QScalar> inv6 = Mat2<QScalar>::scaling(QScalar(Rational(1, 6)));
            centroid = inv6 * centroid;
            bool regular = true;
            for (const auto& v : verts)
                if (!((v - centroid).norm2() == min2)) regular = false;
            if (regular) piece.type = PieceType::regular_unit_hexagon;
        }
    }

    for (const auto& p : dec.pieces) {
        if (p.type == PieceType::unit_triangle) ++dec.triangle_pieces;
        else if (p.type == PieceType::regular_unit_hexagon) ++dec.hexagon_pieces;
        else ++dec.other_pieces;
    }

    // adjacency conditions across cut edges
    dec.hexagon_boundary_in_triangles = true;
    std::map<int, int> troot;
    std::function<int(int)> tfind = [&](int x) {
        while (troot[x] != x) x = troot[x] = troot[troot[x]];
        return x;
    };
    for (size_t i = 0; i < dec.pieces.size(); ++i)
        if (dec.pieces[i].type == PieceType::unit_triangle) troot[static_cast<int>(i)] = static_cast<int>(i);
    for (int e = 0; e < TD.edge_count; ++e) {
        if (!cut[e]) continue;
        HalfEdge h = TD.edge_rep[e], g = TD.partner(h);
        int pa = dec.piece_of_triangle[h.tri], pb = dec.piece_of_triangle[g.tri];
        bool hex_a = dec.pieces[pa].type == PieceType::regular_unit_hexagon;
        bool hex_b = dec.pieces[pb].type == PieceType::regular_unit_hexagon;
        bool tri_a = dec.pieces[pa].type == PieceType::unit_triangle;
        bool tri_b = dec.pieces[pb].type == PieceType::unit_triangle;
        if (hex_a && !tri_b) dec.hexagon_boundary_in_triangles = false;
        if (hex_b && !tri_a) dec.hexagon_boundary_in_triangles = false;
        if (tri_a && tri_b) troot[tfind(pa)] = tfind(pb);
    }
    std::set<int> comps;
    for (auto& [p, r] : troot) comps.insert(tfind(p));
    dec.triangles_connected = comps.size() <= 1;
    return dec;
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

// Theorem-style global maximum check: the decomposition is all unit
// equilateral triangles, cross-checked against the closed-form bound.
inline Verdict check_global_max(const SurfaceAnalysis<QScalar>& A) {
    Decomposition dec = classify_decomposition(A);
    bool all_triangles = dec.hexagon_pieces == 0 && dec.other_pieces == 0;
    double bound = global_systole_bound(A.surface.genus(), A.surface.vertex_class_count());
    double norm_sys = normalized_systole(A);
    bool numeric = std::abs(norm_sys - bound) <= 1e-12;
    Verdict v;
    v.pass = all_triangles && numeric;
    std::ostringstream os;
    os << "pieces=" << dec.pieces.size() << " all_triangles=" << (all_triangles ? "yes" : "no")
       << " normalized_systole=" << norm_sys << " bound=" << bound;
    v.detail = os.str();
    return v;
}

// Sufficient local-maximum criterion: unit triangles and regular unit
// hexagons only, triangle set connected, hexagon boundaries inside the
// triangle-set boundary.
inline Verdict check_local_max_criterion(const SurfaceAnalysis<QScalar>& A) {
    Decomposition dec = classify_decomposition(A);
    bool only = dec.other_pieces == 0;
    Verdict v;
    v.pass = only && dec.triangles_connected && dec.hexagon_boundary_in_triangles;
    std::ostringstream os;
    os << "triangles=" << dec.triangle_pieces << " hexagons=" << dec.hexagon_pieces
       << " other=" << dec.other_pieces
       << " triangles_connected=" << (dec.triangles_connected ? "yes" : "no")
       << " hexagon_boundary_ok=" << (dec.hexagon_boundary_in_triangles ? "yes" : "no");
    v.detail = os.str();
    return v;
}

struct KissingAudit {
    int count = 0;
    int bound = 0;
    bool equality = false;
    bool within_bound = false;
    bool matches_global_max = true;  // equality <=> global maximum (exact mode)
};

template <class R>
KissingAudit kissing_audit(const SurfaceAnalysis<R>& A) {
    KissingAudit k;
    k.count = A.sys.count;
    k.bound = 3 * (2 * A.surface.genus() - 2 + A.surface.vertex_class_count());
    k.equality = k.count == k.bound;
    k.within_bound = k.count <= k.bound;
    if constexpr (scalar_traits<R>::exact) {
        bool is_max = check_global_max(A).pass;
        k.matches_global_max = (k.equality == is_max);
    }
    return k;
}

// --- perturbation in period coordinates ----------------------------------------

using Deformation = std::vector<Vec2<double>>;

struct perturb_error : std::runtime_error {
    explicit perturb_error(const std::string& m) : std::runtime_error(m) {}
};

namespace detail {

// per-initial-edge holonomy increments induced by basis deltas
inline std::vector<Vec2<double>> edge_increments(const PeriodBasis<QScalar>& B,
                                                 const Deformation& d) {
    std::vector<Vec2<double>> inc(B.initial_coeff.size(), Vec2<double>{0, 0});
    for (size_t e = 0; e < B.initial_coeff.size(); ++e)
        for (int j = 0; j < B.k; ++j) {
            double c = B.initial_coeff[e][j].convert_to<double>();
            if (c == 0) continue;
            inc[e] = inc[e] + d[j] * c;
        }
    return inc;
}

}  // namespace detail

struct PerturbResult {
    Surface<double> surface;        // area one, first basis element horizontal
    double normalized_systole = 0;
};

// Rebuild polygon vertices from perturbed basis holonomies, then normalize to
// area one and rotate the first basis element back to the horizontal axis.
inline PerturbResult perturb(const SurfaceAnalysis<QScalar>& A, const Deformation& d,
                             long long budget = kDefaultNodeBudget) {
    if (static_cast<int>(d.size()) != A.basis.k)
        throw perturb_error("deformation dimension mismatch");
    auto inc = detail::edge_increments(A.basis, d);

    auto halfedge_inc = [&](const HalfEdge& h) {
        int eid = A.T0.tris[h.tri].edge[h.k];
        Vec2<double> v = inc[eid];
        if (!(A.T0.edge_rep[eid] == h)) v = -v;
        return v;
    };
    for (size_t ti = 0; ti < A.T0.tris.size(); ++ti) {
        Vec2<double> h0 = A.T0.tris[ti].hol[0].to_double() + halfedge_inc(HalfEdge{(int)ti, 0});
        Vec2<double> h1 = A.T0.tris[ti].hol[1].to_double() + halfedge_inc(HalfEdge{(int)ti, 1});
        if (h0.cross(h1) <= 0)
            throw perturb_error("deformation too large: a reference triangle degenerates");
    }

    // polygons rebuilt edge by edge from the perturbed holonomies
    std::vector<PolygonSpec<double>> polys;
    for (size_t pi = 0; pi < A.surface.polygons().size(); ++pi) {
        const auto& p = A.surface.polygons()[pi];
        PolygonSpec<double> q;
        Vec2<double> cur = p.vertices[0].to_double();
        for (int e = 0; e < p.size(); ++e) {
            q.vertices.push_back(cur);
            Vec2<double> vec = p.edge_vector(e).to_double() +
                               halfedge_inc(A.T0.polygon_edge[pi][e]);
            cur = cur + vec;
        }
        polys.push_back(std::move(q));
    }
    Surface<double> pert(std::move(polys), A.surface.gluing_pairs(), A.surface.name());

    double f = 1.0 / std::sqrt(pert.area());
    Vec2<double> g1 = A.basis.elements[0].hol.to_double() + d[0];
    double len = std::sqrt(g1.norm2());
    Mat2<double> rot{g1.x / len, g1.y / len, -g1.y / len, g1.x / len};
    Surface<double> norm = apply_matrix(scale(pert, f), rot);

    PerturbResult r{std::move(norm), 0};
    r.normalized_systole = systole(r.surface, budget).systole;
    return r;
}

namespace detail {

// fast probe path: transform the Delaunay holonomies in place, no polygon
// rebuild; the systole/area ratio is scale invariant
inline std::optional<double> probe_normalized_systole(const SurfaceAnalysis<QScalar>& A,
                                                      Triangulation<double>& scratch,
                                                      const Triangulation<double>& base,
                                                      const std::vector<Vec2<double>>& inc,
                                                      double lmax_hint, long long budget) {
    for (size_t ti = 0; ti < base.tris.size(); ++ti) {
        for (int k = 0; k < 3; ++k) {
            int eid = base.tris[ti].edge[k];
            Vec2<double> v = inc[eid];
            if (!(base.edge_rep[eid] == HalfEdge{(int)ti, k})) v = -v;
            scratch.tris[ti].hol[k] = base.tris[ti].hol[k] + v;
        }
        if (scratch.tris[ti].hol[0].cross(scratch.tris[ti].hol[1]) <= 0)
            return std::nullopt;  // inverted triangle: trial skipped
    }
    double area = 0;
    for (const auto& t : scratch.tris) area += 0.5 * t.hol[0].cross(t.hol[1]);
    double lmax = std::min(scratch.min_edge_length(), lmax_hint * std::sqrt(area));
    auto all = enumerate_saddle_connections(scratch, lmax, budget);
    if (all.empty()) all = enumerate_saddle_connections(scratch, scratch.min_edge_length(), budget);
    return all.front().length / std::sqrt(area);
}

inline double gaussian(std::mt19937_64& rng) {
    double u1 = (static_cast<double>(rng() >> 11) + 1.0) / 9007199254740993.0;
    double u2 = (static_cast<double>(rng() >> 11) + 1.0) / 9007199254740993.0;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace detail

struct ProbeTrial {
    double step = 0;
    uint64_t seed = 0;
    double normalized_systole = 0;
    double delta = 0;
    bool skipped = false;
};

struct ProbeReport {
    double baseline = 0;
    std::vector<ProbeTrial> trials;
    bool improvement_found = false;
    std::optional<Deformation> witness;
    int skipped = 0;
};

constexpr double kProbeImprovementTolerance = 1e-10;

// Seeded random-direction probe; extra deformations (e.g. rigidity kernel
// vectors or the paper's directed deformations) run first, scaled by each
// step. Verdict: improvement-found iff some trial strictly exceeds the
// baseline normalized systole by more than 1e-10.
inline ProbeReport perturbation_probe(const SurfaceAnalysis<QScalar>& A,
                                      const std::vector<double>& steps, int trials, uint64_t seed,
                                      const std::vector<Deformation>& extra = {},
                                      long long budget = kDefaultNodeBudget) {
    ProbeReport rep;
    rep.baseline = normalized_systole(A);
    const int k = A.basis.k;
    Triangulation<double> base = A.TD.to_approx();
    Triangulation<double> scratch = base;
    const double lmax_hint = 1.2 * rep.baseline;

    // coefficient table of the Delaunay edges over the basis, once
    std::vector<std::vector<double>> td_coeff(A.TD.edge_count, std::vector<double>(k, 0));
    for (int e = 0; e < A.TD.edge_count; ++e) {
        auto coeff = A.basis.expand(A.TD.edge_chain[e]);
        if (!coeff) throw surface_error("probe: Delaunay edge outside period span");
        for (int j = 0; j < k; ++j) td_coeff[e][j] = (*coeff)[j].convert_to<double>();
    }

    auto run_one = [&](const Deformation& d, double step, uint64_t trial_seed) {
        std::vector<Vec2<double>> inc(A.TD.edge_count, Vec2<double>{0, 0});
        for (int e = 0; e < A.TD.edge_count; ++e) {
            Vec2<double> v{0, 0};
            for (int j = 0; j < k; ++j)
                if (td_coeff[e][j] != 0) v = v + d[j] * td_coeff[e][j];
            inc[e] = v;
        }
        ProbeTrial t;
        t.step = step;
        t.seed = trial_seed;
        auto val = detail::probe_normalized_systole(A, scratch, base, inc, lmax_hint, budget);
        if (!val) {
            t.skipped = true;
            ++rep.skipped;
        } else {
            t.normalized_systole = *val;
            t.delta = *val - rep.baseline;
            if (t.delta > kProbeImprovementTolerance && !rep.improvement_found) {
                rep.improvement_found = true;
                rep.witness = d;
            }
        }
        rep.trials.push_back(t);
    };

    for (double step : steps) {
        for (size_t x = 0; x < extra.size(); ++x) {
            Deformation d = extra[x];
            for (auto& v : d) v = v * step;
            run_one(d, step, 0);
        }
        for (int t = 0; t < trials; ++t) {
            uint64_t ts = seed + static_cast<uint64_t>(t);
            std::mt19937_64 rng(ts);
            Deformation d(k);
            double n2 = 0;
            for (int j = 0; j < k; ++j) {
                d[j] = {detail::gaussian(rng), detail::gaussian(rng)};
                n2 += d[j].norm2();
            }
            double inv = step / std::sqrt(n2);
            for (auto& v : d) v = v * inv;
            run_one(d, step, ts);
        }
    }
    return rep;
}

// --- directed deformations and first-order rigidity ----------------------------

// deformation prescribed on named triangulation edges (by polygon corners)
struct DeformationTarget {
    // (polygon, corner u, corner v, increment of the u->v period)
    std::vector<std::tuple<int, int, int, QVec>> prescribed;
    // unit-length ear-clip diagonals of these polygons are left free
    std::vector<int> free_polygons;
};

inline DeformationTarget directed_target(const RigidFamily& rf) {
    DeformationTarget t;
    // top edge of the first fat parallelogram: corners 2 -> 3, oriented -x;
    // the prescription is on the +x orientation, so flip the sign
    auto top_of = [&](int poly) {
        // quad (base0, base1, top_right, top_left): top edge is corner 2 -> 3
        return std::make_pair(poly, std::make_pair(2, 3));
    };
    auto [p1, e1] = top_of(rf.par1_poly);
    t.prescribed.push_back({p1, e1.first, e1.second, QVec{QScalar(0), QScalar(1)}});
    // label "1" carries -i eps; its top edge is traversed in the -x direction,
    // so the u->v increment is +i
    int p2 = rf.par2_poly >= 0 ? rf.par2_poly : rf.par1_poly;
    t.prescribed.push_back({p2, 2, 3, QVec{QScalar(0), QScalar(-1)}});
    t.free_polygons = {rf.par1_poly};
    if (rf.par2_poly >= 0) t.free_polygons.push_back(rf.par2_poly);
    return t;
}

inline DeformationTarget directed_target_nonrigid(const std::string& name) {
    const QScalar half = QScalar(Rational(1, 2));
    const QScalar w = QScalar(0, Rational(1, 2));
    DeformationTarget t;
    if (name == "nonrigid_h2") {
        // rotate the self-glued hexagon side pair (corners 2 -> 3, holonomy v1)
        t.prescribed.push_back({0, 2, 3, QVec{-w, half}});  // i * v1
        return t;
    }
    if (name == "nonrigid_h000") {
        // rotate the top triangle rigidly: its three sides are the pair-1 and
        // pair-2 edges and the internal diagonal (corners 6 -> 4, holonomy v0)
        t.prescribed.push_back({0, 2, 3, QVec{-w, half}});                  // i * v1
        t.prescribed.push_back({0, 4, 5, QVec{-w, -half}});                 // i * v2
        t.prescribed.push_back({0, 6, 4, QVec{QScalar(0), QScalar(1)}});    // i * v0
        return t;
    }
    throw surface_error("no directed deformation for " + name);
}

// Solve for the basis deltas realizing the target: prescribed edges get their
// increments, every other systole-length edge is frozen (excluding free
// ear-clip diagonals). Returns nullopt when inconsistent.
inline std::optional<Deformation> directed_deformation(const SurfaceAnalysis<QScalar>& A,
                                                       const DeformationTarget& target) {
    const auto& T0 = A.T0;
    const int k = A.basis.k;
    QScalar min2 = A.sys.shortest.front().norm2();

    std::map<int, QVec> rhs;  // edge id -> prescribed increment (rep orientation)
    for (const auto& [poly, u, v, w] : target.prescribed) {
        HalfEdge h = T0.find_polygon_halfedge(poly, u, v);
        int eid = T0.tris[h.tri].edge[h.k];
        QVec val = w;
        if (!(T0.edge_rep[eid] == h)) val = -val;
        auto it = rhs.find(eid);
        if (it == rhs.end()) rhs[eid] = val;
        else it->second = it->second + val;
    }
    std::set<int> free_diag;
    for (int e = 0; e < T0.edge_count; ++e) {
        if (T0.edge_is_boundary[e]) continue;
        HalfEdge h = T0.edge_rep[e];
        int p = T0.tri_polygon[h.tri];
        for (int fp : target.free_polygons)
            if (p == fp) free_diag.insert(e);
    }

    std::vector<std::vector<Rational>> rows;
    std::vector<QScalar> bx, by;
    for (int e = 0; e < T0.edge_count; ++e) {
        bool prescribed = rhs.count(e) > 0;
        bool frozen = !prescribed && free_diag.find(e) == free_diag.end() &&
                      (T0.hol(T0.edge_rep[e]).norm2() - min2).sign() == 0;
        if (!prescribed && !frozen) continue;
        rows.push_back(A.basis.initial_coeff[e]);
        QVec w = prescribed ? rhs[e] : QVec{QScalar(0), QScalar(0)};
        bx.push_back(w.x);
        by.push_back(w.y);
    }

    auto solve_q = [&](auto part) -> std::optional<std::vector<Rational>> {
        std::vector<Rational> b;
        for (const auto& q : part) b.push_back(q);
        return solve_rational(rows, b, k);
    };
    auto split = [](const std::vector<QScalar>& v, bool sqrt3) {
        std::vector<Rational> out;
        for (const auto& q : v) out.push_back(sqrt3 ? q.sqrt3_part() : q.rational_part());
        return out;
    };
    auto xa = solve_q(split(bx, false)), xb = solve_q(split(bx, true));
    auto ya = solve_q(split(by, false)), yb = solve_q(split(by, true));
    if (!xa || !xb || !ya || !yb) return std::nullopt;
    const double s3 = 1.7320508075688772935;
    Deformation d(k);
    for (int j = 0; j < k; ++j) {
        d[j].x = (*xa)[j].convert_to<double>() + s3 * (*xb)[j].convert_to<double>();
        d[j].y = (*ya)[j].convert_to<double>() + s3 * (*yb)[j].convert_to<double>();
    }
    return d;
}

struct RigidityReport {
    int kernel_dim = 0;
    std::vector<Deformation> kernel;
    bool infinitesimally_rigid = false;
    int rows = 0;
};

// Linear system: <v_gamma, delta v_gamma> = 0 for every shortest saddle
// connection (as Delaunay edges), plus the normalization row keeping the
// first basis element horizontal. Kernel dimension zero = infinitesimally
// rigid; kernel vectors are candidate flexes for the probe.
template <class R>
RigidityReport first_order_rigidity(const SurfaceAnalysis<R>& A) {
    const auto& TD = A.TD;
    const int k = A.basis.k;
    R min2 = A.sys.shortest.front().norm2();

    std::vector<std::vector<R>> M;
    double scale = 0;
    for (int e = 0; e < TD.edge_count; ++e) {
        bool shortest;
        if constexpr (scalar_traits<R>::exact) shortest = (TD.hol(TD.edge_rep[e]).norm2() - min2).sign() == 0;
        else shortest = std::abs(TD.hol(TD.edge_rep[e]).length() - A.sys.systole) <= scalar_traits<double>::tau;
        if (!shortest) continue;
        auto coeff = A.basis.expand(TD.edge_chain[e]);
        if (!coeff) throw surface_error("rigidity: edge outside period span");
        Vec2<R> hol = TD.hol(TD.edge_rep[e]);
        std::vector<R> row(2 * k, scalar_traits<R>::from_int(0));
        for (int j = 0; j < k; ++j) {
            Rational c = (*coeff)[j];
            if (c == 0) continue;
            if constexpr (scalar_traits<R>::exact) {
                QScalar qc{c};
                row[2 * j] = qc * hol.x;
                row[2 * j + 1] = qc * hol.y;
            } else {
                double dc = c.convert_to<double>();
                row[2 * j] = dc * hol.x;
                row[2 * j + 1] = dc * hol.y;
                scale = std::max(scale, std::abs(row[2 * j]) + std::abs(row[2 * j + 1]));
            }
        }
        M.push_back(std::move(row));
    }
    std::vector<R> norm_row(2 * k, scalar_traits<R>::from_int(0));
    norm_row[1] = scalar_traits<R>::from_int(1);
    M.push_back(std::move(norm_row));

    RigidityReport rep;
    rep.rows = static_cast<int>(M.size());
    std::vector<std::vector<R>> ker;
    if constexpr (scalar_traits<R>::exact) {
        ker = kernel_basis(std::move(M), 2 * k, [](const QScalar& v) { return v.sign() == 0; });
    } else {
        double guard = std::max(scale, 1.0) * 1e-9;
        ker = kernel_basis(std::move(M), 2 * k, [guard](double v) { return std::abs(v) <= guard; });
    }
    rep.kernel_dim = static_cast<int>(ker.size());
    rep.infinitesimally_rigid = rep.kernel_dim == 0;
    for (const auto& v : ker) {
        Deformation d(k);
        for (int j = 0; j < k; ++j)
            d[j] = {scalar_traits<R>::to_double(v[2 * j]), scalar_traits<R>::to_double(v[2 * j + 1])};
        rep.kernel.push_back(std::move(d));
    }
    return rep;
}

// --- Lemma 4.5-style chain propagation -----------------------------------------

struct ChainPropagation {
    double max_single_ratio = 0;   // apex displacement / input bound, per step
    double max_cumulative = 0;     // total apex displacement at the chain end
    bool within_bound = true;      // per-step ratio <= 10
};

// Builds a planar chain of adjacent unit equilateral triangles, perturbs the
// base vertices by <= eps and the side lengths into [1, 1+eps], re-solves the
// apexes, and checks the tenfold propagation bound at every step.
inline ChainPropagation triangle_chain_propagation_test(int chain_length, double eps, int trials,
                                                        uint64_t seed) {
    if (chain_length < 1) throw geometry_error("chain length must be >= 1");
    ChainPropagation out;
    std::mt19937_64 rng(seed);
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) / 9007199254740992.0);
    };
    const double s3 = 0.8660254037844386;
    for (int trial = 0; trial < trials; ++trial) {
        // exact strip of unit triangles: base points P_i, apexes alternate
        std::vector<Vec2<double>> pts = {{0, 0}, {1, 0}};
        std::vector<Vec2<double>> ref = pts;
        for (int i = 0; i < chain_length; ++i) {
            Vec2<double> a = ref[i], b = ref[i + 1];
            int side = (i % 2 == 0) ? 1 : -1;
            // the exact chain zig-zags: apex of triangle i becomes base point i+2
            Vec2<double> apex = apex_solve(a, b, 1.0, 1.0, side);
            (void)s3;
            ref.push_back(apex);
        }
        // perturb the two roots
        std::vector<Vec2<double>> per = ref;
        for (int r = 0; r < 2; ++r) {
            double ang = uni(0, 6.283185307179586), rad = uni(0, eps);
            per[r] = ref[r] + Vec2<double>{rad * std::cos(ang), rad * std::sin(ang)};
        }
        if ((per[1] - per[0]).length() < 1.0) {
            // lemma wants all sides >= 1; stretch back onto the admissible range
            Vec2<double> dir = per[1] - per[0];
            double l = dir.length();
            per[1] = per[0] + dir * ((1.0 + uni(0, eps / 2)) / l);
        }
        double bound = eps;
        for (int i = 0; i < chain_length; ++i) {
            Vec2<double> a = per[i], b = per[i + 1];
            double la = uni(1.0, 1.0 + eps), lb = uni(1.0, 1.0 + eps);
            int side = (i % 2 == 0) ? 1 : -1;
            Vec2<double> apex = apex_solve(a, b, la, lb, side);
            per.push_back(apex);
            double da = (per[i] - ref[i]).length();
            double db = (per[i + 1] - ref[i + 1]).length();
            double input = std::max({da, db, eps});
            double disp = (apex - ref[i + 2]).length();
            double ratio = disp / input;
            out.max_single_ratio = std::max(out.max_single_ratio, ratio);
            if (ratio > 10.0) out.within_bound = false;
            bound = 10.0 * std::max(bound, input);
        }
        out.max_cumulative =
            std::max(out.max_cumulative, (per.back() - ref.back()).length());
    }
    return out;
}

}  // namespace flatsys
