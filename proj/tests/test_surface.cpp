#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "flatlab/surface.hpp"

using namespace flatlab;

namespace {

PolygonSpec right_triangle() {
    PolygonSpec p;
    p.vertices = {{0, 0}, {1, 0}, {0, 1}};
    p.angles = {{1, 2}, {1, 4}, {1, 4}};
    return p;
}

PolygonSpec golden_gnomon_like() {
    // triangle with angles (pi/5, 2pi/5, 2pi/5)
    PolygonSpec p;
    double c = std::cos(M_PI / 5), s = std::sin(M_PI / 5);
    p.vertices = {{0, 0}, {1, 0}, {c, s}};
    p.angles = {{1, 5}, {2, 5}, {2, 5}};
    return p;
}

long long gauss_bonnet_excess(const Surface& s) {
    long long e = 0;
    for (const auto& sg : s.singularities) e += sg.cone_angle_over_pi - 2;
    return e;
}

}  // namespace

TEST_CASE("torus basics") {
    Surface t = make_torus();
    CHECK(t.area == doctest::Approx(1));
    CHECK(t.genus == 1);
    REQUIRE(t.singularities.size() == 1);
    CHECK(t.singularities[0].cone_angle_over_pi == 2);  // regular marked point
    CHECK(t.singularities[0].prongs() == 2);
    CHECK(t.singularities[0].marked);
    CHECK(t.cover_basis.has_value());
    CHECK(t.lattice_multiplicity == 1);
}

TEST_CASE("square-tiled n=3 example") {
    // right = (1 2 3), up = (1 2) in cycle notation
    Surface s = make_square_tiled({1, 2, 0}, {1, 0, 2});
    CHECK(s.area == doctest::Approx(3));
    REQUIRE(s.singularities.size() == 1);
    CHECK(s.singularities[0].cone_angle_over_pi == 6);  // cone angle 6 pi
    CHECK(s.singularities[0].zero_order() == 4);
    CHECK(s.genus == 2);
    CHECK(gauss_bonnet_excess(s) == 4 * s.genus - 4);
}

TEST_CASE("square-tiled rejects bad input") {
    CHECK_THROWS_AS(make_square_tiled({0, 1}, {0, 1}), std::invalid_argument);  // disconnected
    CHECK_THROWS_AS(make_square_tiled({0, 0}, {1, 0}), std::invalid_argument);  // not a bijection
    CHECK_THROWS_AS(make_square_tiled({1, 2, 0}, {1, 0}), std::invalid_argument);
}

TEST_CASE("square-tiled is invariant under simultaneous conjugation") {
    std::mt19937_64 rng(31);
    std::vector<int> right{1, 2, 0, 4, 3};
    std::vector<int> up{2, 1, 3, 0, 4};
    Surface a = make_square_tiled(right, up);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<int> perm{0, 1, 2, 3, 4};
        for (int i = 4; i > 0; --i) std::swap(perm[i], perm[rng() % (i + 1)]);
        std::vector<int> r2(5), u2(5);
        for (int i = 0; i < 5; ++i) {
            r2[perm[i]] = perm[right[i]];
            u2[perm[i]] = perm[up[i]];
        }
        Surface b = make_square_tiled(r2, u2);
        CHECK(a.genus == b.genus);
        CHECK(a.area == b.area);
        REQUIRE(a.singularities.size() == b.singularities.size());
        std::vector<long long> ca, cb;
        for (const auto& sg : a.singularities) ca.push_back(sg.cone_angle_over_pi);
        for (const auto& sg : b.singularities) cb.push_back(sg.cone_angle_over_pi);
        std::sort(ca.begin(), ca.end());
        std::sort(cb.begin(), cb.end());
        CHECK(ca == cb);
    }
}

TEST_CASE("unfolding the unit square") {
    Surface s = unfold(PolygonSpec::unit_square());
    CHECK(s.copies.size() == 4);
    CHECK(s.area == doctest::Approx(4));
    CHECK(s.genus == 1);
    for (const auto& sg : s.singularities) CHECK_FALSE(sg.is_cone_point());
    CHECK(s.marked_count() == 1);
    REQUIRE(s.cover_basis.has_value());
    double det = std::fabs(s.cover_basis->det());
    CHECK(det == doctest::Approx(4));
    // reduced basis of 2Z^2
    Basis2 g = *s.cover_basis;
    CHECK(std::hypot(g.x1, g.y1) == doctest::Approx(2));
    CHECK(std::hypot(g.x2, g.y2) == doctest::Approx(2));
}

TEST_CASE("unfolding the right isoceles triangle") {
    Surface s = unfold(right_triangle());
    CHECK(s.copies.size() == 8);
    CHECK(s.area == doctest::Approx(4));
    CHECK(s.genus == 1);  // integrable table
    CHECK(gauss_bonnet_excess(s) == 0);
}

TEST_CASE("unfolding a genus-2 triangle") {
    Surface s = unfold(golden_gnomon_like());
    CHECK(s.copies.size() == 10);
    CHECK(s.genus == 2);
    int cones = 0;
    for (const auto& sg : s.singularities)
        if (sg.is_cone_point()) {
            CHECK(sg.cone_angle_over_pi == 4);
            CHECK(sg.marked);
            ++cones;
        }
    CHECK(cones == 2);
    CHECK(gauss_bonnet_excess(s) == 4 * s.genus - 4);
    CHECK_FALSE(s.cover_basis.has_value());
}

TEST_CASE("polygon validation") {
    PolygonSpec p = PolygonSpec::unit_square();
    CHECK_NOTHROW(p.validate());

    PolygonSpec bad = p;
    bad.angles[0] = {1, 3};  // sum no longer (n-2) pi
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    PolygonSpec bad2 = p;
    bad2.angles[0] = {2, 4};  // not lowest terms
    CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);

    PolygonSpec bad3 = p;
    bad3.vertices[2] = {1.2, 1.3};  // coordinates disagree with angles
    CHECK_THROWS_AS(bad3.validate(), std::invalid_argument);

    PolygonSpec cw;
    cw.vertices = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
    cw.angles = {{1, 2}, {1, 2}, {1, 2}, {1, 2}};
    CHECK_THROWS_AS(cw.validate(), std::invalid_argument);
}

TEST_CASE("transformed surfaces compose frames") {
    Surface t = make_torus();
    Surface t2 = t.transformed(geodesic(2)).transformed(horocycle(0.5));
    Mat2 expect = horocycle(0.5) * geodesic(2);
    CHECK(t2.frame.a11 == doctest::Approx(expect.a11));
    CHECK(t2.frame.a12 == doctest::Approx(expect.a12));
    CHECK(t2.frame.a21 == doctest::Approx(expect.a21));
    CHECK(t2.frame.a22 == doctest::Approx(expect.a22));
}

TEST_CASE("describe mentions stratum data") {
    Surface s = make_square_tiled({1, 2, 0}, {1, 0, 2});
    std::string d = s.describe();
    CHECK(d.find("cone angle 6*pi") != std::string::npos);
    CHECK(d.find("genus: 2") != std::string::npos);
}
