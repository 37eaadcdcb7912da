#include "flatsys/saddle.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace flatsys;
using namespace testutil;

namespace {

// Brute-force oracle: develop every triangle chain up to a fixed depth and
// validate candidate segments by direct window checks, no cone pruning.
template <class R>
struct BruteOracle {
    const Triangulation<R>& T;
    double lmax2;
    std::set<std::vector<int64_t>> keys;

    void dfs(HalfEdge crossed, Vec2<R> right, Vec2<R> left, std::vector<HalfEdge>& xs, int depth,
             const HalfEdge& start) {
        HalfEdge g = T.partner(crossed);
        Vec2<R> a = right;
        Vec2<R> b = left;
        Vec2<R> apex = a + T.tris[g.tri].hol[(g.k + 1) % 3];
        if (scalar_traits<R>::to_double(apex.norm2()) <= lmax2) validate(start, xs, apex, g);
        if (depth == 0) return;
        {
            xs.push_back(HalfEdge{g.tri, (g.k + 1) % 3});
            dfs(xs.back(), a, apex, xs, depth - 1, start);
            xs.pop_back();
        }
        {
            xs.push_back(HalfEdge{g.tri, (g.k + 2) % 3});
            dfs(xs.back(), apex, b, xs, depth - 1, start);
            xs.pop_back();
        }
    }

    void validate(const HalfEdge& start, const std::vector<HalfEdge>& xs, const Vec2<R>& apex,
                  const HalfEdge& last_entry) {
        Vec2<R> a = T.tris[start.tri].hol[start.k];
        Vec2<R> b = a + T.tris[start.tri].hol[(start.k + 1) % 3];
        const Vec2<R>& d = apex;
        for (size_t i = 0; i < xs.size(); ++i) {
            if (!(scalar_traits<R>::sign(a.cross(d)) > 0 && scalar_traits<R>::sign(d.cross(b)) > 0))
                return;  // misses the open window
            HalfEdge g = T.partner(xs[i]);
            Vec2<R> ap = a + T.tris[g.tri].hol[(g.k + 1) % 3];
            if (i + 1 < xs.size()) {
                if (xs[i + 1] == HalfEdge{g.tri, (g.k + 1) % 3}) b = ap;
                else a = ap;
            } else {
                if (!(ap == d)) return;  // another chain's corner
            }
        }
        HalfEdge end{last_entry.tri, (last_entry.k + 2) % 3};
        auto own = detail::oriented_key(start, xs, end);
        auto rev = detail::reversed_key(T, start, xs, end);
        keys.insert(own <= rev ? own : rev);
    }
};

template <class R>
std::set<std::vector<int64_t>> brute_force_keys(const Triangulation<R>& T, double lmax, int depth) {
    BruteOracle<R> o{T, lmax * lmax * (1 + 1e-12), {}};
    for (int ti = 0; ti < T.triangle_count(); ++ti) {
        for (int k = 0; k < 3; ++k) {
            std::vector<HalfEdge> xs = {HalfEdge{ti, (k + 1) % 3}};
            Vec2<R> a = T.tris[ti].hol[k];
            Vec2<R> b = a + T.tris[ti].hol[(k + 1) % 3];
            o.dfs(xs.front(), a, b, xs, depth - 1, HalfEdge{ti, k});
        }
    }
    for (int e = 0; e < T.edge_count; ++e)
        if (scalar_traits<R>::to_double(T.hol(T.edge_rep[e]).norm2()) <= o.lmax2)
            o.keys.insert({-1 - e});
    return o.keys;
}

template <class R>
std::set<std::vector<int64_t>> enumeration_keys(const Triangulation<R>& T, double lmax) {
    std::set<std::vector<int64_t>> keys;
    for (const auto& c : enumerate_saddle_connections(T, lmax)) {
        if (c.along_edge) {
            keys.insert({-1 - c.edge_id});
            continue;
        }
        auto own = detail::oriented_key(c.start_corner, c.crossings, c.end_corner);
        auto rev = detail::reversed_key(T, c.start_corner, c.crossings, c.end_corner);
        keys.insert(own <= rev ? own : rev);
    }
    return keys;
}

}  // namespace

TEST_CASE("square torus enumeration matches the lattice") {
    QSurface sq = square_torus();
    auto conns = enumerate_saddle_connections(sq, 1.5);
    REQUIRE(conns.size() == 4);
    std::multiset<std::pair<double, double>> got;
    for (const auto& c : conns)
        got.insert({c.holonomy.x.to_double(), c.holonomy.y.to_double()});
    std::multiset<std::pair<double, double>> want = {{1, 0}, {0, 1}, {1, 1}, {-1, 1}};
    CHECK(got == want);

    CHECK(enumerate_saddle_connections(sq, 0.5).empty());
}

TEST_CASE("triangle torus: three unit connections") {
    auto conns = enumerate_saddle_connections(triangle_torus(), 1.0);
    REQUIRE(conns.size() == 3);
    for (const auto& c : conns) CHECK(c.norm2() == QScalar(1));
}

TEST_CASE("systole reports") {
    auto sq = systole(square_torus());
    CHECK(sq.systole == doctest::Approx(1.0));
    CHECK(sq.count == 2);

    auto tri = systole(triangle_torus());
    CHECK(tri.systole == doctest::Approx(1.0));
    CHECK(tri.count == 3);

    auto s4 = systole(named_example("s4"));
    CHECK(s4.systole == doctest::Approx(1.0));
    CHECK(s4.count == 12);
}

TEST_CASE("torus enumeration equals the primitive-vector oracle") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int trial = 0; trial < 10; ++trial) {
        Vec2<double> a{1.0 + 0.3 * u(rng), u(rng)};
        Vec2<double> b{u(rng), 1.0 + 0.3 * u(rng)};
        if (a.cross(b) < 0.4) continue;
        auto s = parallelogram_torus(a, b);
        double lmax = 3.0;
        auto conns = enumerate_saddle_connections(s, lmax);
        auto oracle = lattice_oracle(a, b, lmax);
        REQUIRE(conns.size() == oracle.size());
        for (size_t i = 0; i < oracle.size(); ++i) {
            CHECK(std::abs(conns[i].holonomy.x - oracle[i].x) < 1e-9);
            CHECK(std::abs(conns[i].holonomy.y - oracle[i].y) < 1e-9);
        }
    }
}

TEST_CASE("enumeration agrees with the brute-force chain oracle") {
    {
        auto T = triangulate(triangle_torus());
        CHECK(enumeration_keys(T, 2.5) == brute_force_keys(T, 2.5, 9));
    }
    {
        auto T = triangulate(square_torus());
        CHECK(enumeration_keys(T, 2.2) == brute_force_keys(T, 2.2, 9));
    }
    {
        auto T = triangulate(named_example("nonrigid_h2"));
        CHECK(enumeration_keys(T, 1.9) == brute_force_keys(T, 1.9, 8));
    }
    {
        auto T = triangulate(named_example("s4"));
        CHECK(enumeration_keys(T, 1.74) == brute_force_keys(T, 1.74, 7));
    }
}

TEST_CASE("certificates replay") {
    for (const auto& s : {named_example("s4"), named_example("s20")}) {
        auto T = triangulate(s);
        for (const auto& c : enumerate_saddle_connections(T, 1.8)) {
            auto pos = replay_certificate(T, c);
            CHECK(pos.size() == c.crossings.size());
        }
    }
}

TEST_CASE("rotation invariance and exact scaling") {
    QSurface s4 = named_example("s4");
    auto base = systole(s4);

    auto d = s4.to_approx();
    double ang = 0.7341;
    Mat2<double> rot{std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang)};
    auto rep = systole(apply_matrix(d, rot));
    CHECK(std::abs(rep.systole - base.systole) <= 1e-9);
    CHECK(rep.count == base.count);

    QScalar lam{Rational(3, 2)};
    auto scaled = systole(scale(s4, lam));
    QScalar expect = lam * lam * base.shortest.front().norm2();
    CHECK(scaled.shortest.front().norm2() == expect);
    CHECK(scaled.count == base.count);
}

TEST_CASE("kissing bound over the corpus") {
    for (const auto& s : exact_corpus()) {
        auto rep = systole(s);
        int bound = 3 * (2 * s.genus() - 2 + s.vertex_class_count());
        CHECK(rep.count <= bound);
    }
}

TEST_CASE("node budget is a hard stop") {
    CHECK_THROWS_AS(enumerate_saddle_connections(named_example("s4"), 1.5, 10), budget_error);
}

TEST_CASE("closed length bound includes realizers at lmax") {
    auto conns = enumerate_saddle_connections(square_torus(), 1.0);
    CHECK(conns.size() == 2);  // (1,0) and (0,1) exactly at the bound
}

TEST_CASE("connections sort by length then holonomy") {
    auto conns = enumerate_saddle_connections(named_example("s20"), 2.0);
    for (size_t i = 1; i < conns.size(); ++i)
        CHECK(conns[i - 1].length <= conns[i].length + 1e-12);
}
