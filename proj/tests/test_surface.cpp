#include "flatsys/io.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace flatsys;
using namespace testutil;

TEST_CASE("square torus derived data") {
    QSurface s = square_torus();
    CHECK(s.stratum().orders == std::vector<int>{0});
    CHECK(s.genus() == 1);
    CHECK(s.area() == QScalar(1));
    CHECK(s.vertex_class_count() == 1);
}

TEST_CASE("two glued unit triangles form the hexagonal torus") {
    QSurface s = two_triangle_torus();
    CHECK(s.stratum().orders == std::vector<int>{0});
    CHECK(s.genus() == 1);
    CHECK(s.area() == QScalar(0, Rational(1, 2)));  // sqrt(3)/2
}

TEST_CASE("named figure surfaces land in their strata") {
    CHECK(named_example("s4").stratum().orders == std::vector<int>{4});
    CHECK(named_example("s4").genus() == 3);
    CHECK(named_example("s22").stratum().orders == std::vector<int>{2, 2});
    CHECK(named_example("s20").stratum().orders == std::vector<int>{2, 0});
    CHECK(named_example("s1100").stratum().orders == std::vector<int>{1, 1, 0, 0});
    CHECK(named_example("s110").stratum().orders == std::vector<int>{1, 1, 0});
    CHECK(named_example("nonrigid_h2").stratum().orders == std::vector<int>{2});
    CHECK(named_example("nonrigid_h000").stratum().orders == std::vector<int>{0, 0, 0});
    CHECK_THROWS_AS(named_example("nope"), surface_error);
}

TEST_CASE("areas of the figure surfaces") {
    // 1 hexagon + 6 unit triangles
    CHECK(named_example("s4").area() == QScalar(0, 3));  // 3 sqrt3
    // 1 hexagon + 4 unit triangles
    CHECK(named_example("s20").area() == QScalar(0, Rational(5, 2)));
    // 1 hexagon + 8 unit triangles
    CHECK(named_example("s22").area() == QScalar(0, Rational(7, 2)));
    CHECK(named_example("s1100").area() == QScalar(0, Rational(7, 2)));
    CHECK(named_example("nonrigid_h2").area() == QScalar(0, 2));
}

TEST_CASE("apply_matrix: action, composition, area scaling") {
    QSurface sq = square_torus();
    QSurface id = apply_matrix(sq, Mat2<QScalar>::identity());
    CHECK(id.stratum() == sq.stratum());
    CHECK(id.area() == sq.area());

    QSurface tri = apply_matrix(sq, equilateral_shear());
    CHECK(tri.area() == QScalar(0, Rational(1, 2)));
    CHECK(tri.stratum().orders == std::vector<int>{0});

    // unit shear preserves area
    for (int n : {1, 3, 7}) {
        Mat2<QScalar> sh{QScalar(1), QScalar(n), QScalar(0), QScalar(1)};
        CHECK(apply_matrix(sq, sh).area() == sq.area());
    }

    std::mt19937 rng(19);
    auto rnd = [&]() { return QScalar(Rational(int(rng() % 5) + 1, int(rng() % 3) + 1)); };
    for (int i = 0; i < 20; ++i) {
        Mat2<QScalar> m1{rnd(), rnd(), QScalar(0), rnd()};
        Mat2<QScalar> m2{rnd(), QScalar(0), rnd(), rnd()};
        if ((m1.det() * m2.det()).sign() <= 0) continue;
        QSurface lhs = apply_matrix(sq, m1 * m2);
        QSurface rhs = apply_matrix(apply_matrix(sq, m2), m1);
        for (size_t p = 0; p < lhs.polygons().size(); ++p)
            for (int v = 0; v < lhs.polygons()[p].size(); ++v)
                CHECK(lhs.polygons()[p].vertices[v] == rhs.polygons()[p].vertices[v]);
        CHECK(lhs.area() == (m1 * m2).det() * sq.area());
    }
    CHECK_THROWS_AS(apply_matrix(sq, Mat2<QScalar>{QScalar(1), QScalar(0), QScalar(0), QScalar(-1)}),
                    surface_error);
}

TEST_CASE("normalize_area") {
    auto n = normalize_area(square_torus());
    CHECK(n.area() == doctest::Approx(1.0).epsilon(1e-15));
    auto t = normalize_area(triangle_torus());
    CHECK(t.area() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Gauss-Bonnet and polygon closure over the corpus") {
    for (const auto& s : exact_corpus()) {
        int total = 0;
        for (int c = 0; c < s.vertex_class_count(); ++c) total += s.class_order(c);
        CHECK(total == 2 * s.genus() - 2);
        for (const auto& p : s.polygons()) {
            Vec2<QScalar> sum{QScalar(0), QScalar(0)};
            for (int e = 0; e < p.size(); ++e) sum = sum + p.edge_vector(e);
            CHECK(sum.x.is_zero());
            CHECK(sum.y.is_zero());
        }
        for (const auto& pr : s.gluing_pairs()) {
            Vec2<QScalar> sum = s.edge_vector(pr.first) + s.edge_vector(pr.second);
            CHECK(sum.x.is_zero());
            CHECK(sum.y.is_zero());
        }
    }
}

TEST_CASE("tsf round trip preserves derived data byte for byte") {
    for (const auto& s : exact_corpus()) {
        std::string text = serialize_surface(s);
        AnySurface back = parse_surface(text);
        REQUIRE(std::holds_alternative<QSurface>(back));
        const QSurface& t = std::get<QSurface>(back);
        CHECK(t.stratum() == s.stratum());
        CHECK(t.area() == s.area());
        CHECK(t.vertex_class_count() == s.vertex_class_count());
        CHECK(serialize_surface(t) == text);
    }
}

TEST_CASE("build_surface is deterministic") {
    std::string text = serialize_surface(named_example("s22"));
    auto a = std::get<QSurface>(parse_surface(text));
    auto b = std::get<QSurface>(parse_surface(text));
    CHECK(a.stratum() == b.stratum());
    for (size_t p = 0; p < a.polygons().size(); ++p)
        for (int v = 0; v < a.polygons()[p].size(); ++v)
            CHECK(a.vertex_class(static_cast<int>(p), v) == b.vertex_class(static_cast<int>(p), v));
}

TEST_CASE("parser rejects malformed documents") {
    CHECK_THROWS_AS(parse_surface("{\"polygons\":[],\"gluings\":[],\"extra\":1}"), io_error);
    CHECK_THROWS_AS(parse_surface("not json"), io_error);
    // approximate-mode file parses into a double surface
    auto any = parse_surface(R"({"polygons":[{"vertices":[["0","0"],["1.0","0"],["1.0","1.0"],["0","1.0"]]}],
        "gluings":[[[0,0],[0,2]],[[0,1],[0,3]]]})");
    CHECK(std::holds_alternative<Surface<double>>(any));
}

TEST_CASE("build_surface error paths") {
    PolygonSpec<QScalar> sq;
    sq.vertices = {{QScalar(0), QScalar(0)}, {QScalar(1), QScalar(0)},
                   {QScalar(1), QScalar(1)}, {QScalar(0), QScalar(1)}};
    // edge glued twice
    CHECK_THROWS_AS(QSurface({sq}, {{{0, 0}, {0, 2}}, {{0, 1}, {0, 2}}}), surface_error);
    // unglued edge
    CHECK_THROWS_AS(QSurface({sq}, {{{0, 0}, {0, 2}}}), surface_error);
    // non-parallel pairing
    CHECK_THROWS_AS(QSurface({sq}, {{{0, 0}, {0, 1}}, {{0, 2}, {0, 3}}}), surface_error);
    // disconnected: two tori sharing nothing
    PolygonSpec<QScalar> sq2 = sq;
    CHECK_THROWS_AS(QSurface({sq, sq2}, {{{0, 0}, {0, 2}}, {{0, 1}, {0, 3}},
                                          {{1, 0}, {1, 2}}, {{1, 1}, {1, 3}}}),
                    surface_error);
    // clockwise polygon
    PolygonSpec<QScalar> cw;
    cw.vertices = {{QScalar(0), QScalar(0)}, {QScalar(0), QScalar(1)}, {QScalar(1), QScalar(0)}};
    CHECK_THROWS_AS(QSurface({cw}, {{{0, 0}, {0, 1}}, {{0, 2}, {0, 2}}}), surface_error);
}
