#include <doctest.h>

#include <cmath>
#include <random>

#include "geometry.hpp"

using namespace dtotsim;

namespace {

// Containment check done in the rect's local frame, independent of the SAT
// implementation under test.
bool pointInside(const Vec2 &p, const OrientedRect &r, double margin) {
    Vec2 d{p.x - r.center.x, p.y - r.center.y};
    double c = std::cos(r.center.theta), s = std::sin(r.center.theta);
    double lx = d.x * c + d.y * s;
    double ly = -d.x * s + d.y * c;
    return std::abs(lx) <= r.length / 2.0 - margin && std::abs(ly) <= r.width / 2.0 - margin;
}

// Any grid point of one rect strictly inside the other witnesses an overlap.
bool sampledOverlap(const OrientedRect &a, const OrientedRect &b, int n) {
    for (int i = 0; i <= n; i++) {
        for (int j = 0; j <= n; j++) {
            double fx = -0.5 + static_cast<double>(i) / n;
            double fy = -0.5 + static_cast<double>(j) / n;
            for (const auto &[from, to] : {std::pair{&a, &b}, std::pair{&b, &a}}) {
                double c = std::cos(from->center.theta), s = std::sin(from->center.theta);
                double lx = fx * from->length, ly = fy * from->width;
                Vec2 p{from->center.x + lx * c - ly * s, from->center.y + lx * s + ly * c};
                if (pointInside(p, *to, 1e-9)) return true;
            }
        }
    }
    return false;
}

// Min distance between boundary samples; over-estimates the true distance by
// at most one sampling pitch.
double sampledBoundaryDistance(const OrientedRect &a, const OrientedRect &b, int perEdge) {
    auto boundary = [&](const OrientedRect &r, std::vector<Vec2> &out) {
        auto cs = r.corners();
        for (int e = 0; e < 4; e++) {
            Vec2 p0 = cs[e], p1 = cs[(e + 1) % 4];
            for (int i = 0; i < perEdge; i++) {
                double f = static_cast<double>(i) / perEdge;
                out.push_back({p0.x + (p1.x - p0.x) * f, p0.y + (p1.y - p0.y) * f});
            }
        }
    };
    std::vector<Vec2> pa, pb;
    boundary(a, pa);
    boundary(b, pb);
    double best = 1e18;
    for (const auto &p : pa)
        for (const auto &q : pb) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
    return best;
}

}  // namespace

TEST_CASE("normalizeAngle maps into [-pi, pi)") {
    CHECK(normalizeAngle(0.0) == doctest::Approx(0.0));
    CHECK(normalizeAngle(M_PI) == doctest::Approx(-M_PI));
    CHECK(normalizeAngle(-M_PI) == doctest::Approx(-M_PI));
    CHECK(normalizeAngle(2.0 * M_PI) == doctest::Approx(0.0));
    CHECK(normalizeAngle(3.0 * M_PI / 2.0) == doctest::Approx(-M_PI / 2.0));
    CHECK(normalizeAngle(-7.0 * M_PI / 2.0) == doctest::Approx(M_PI / 2.0));
}

TEST_CASE("corners are ordered front-left, front-right, rear-right, rear-left") {
    OrientedRect r{{0.0, 0.0, 0.0}, 4.0, 2.0};
    auto cs = r.corners();
    CHECK(cs[0].x == doctest::Approx(2.0));
    CHECK(cs[0].y == doctest::Approx(1.0));
    CHECK(cs[1].x == doctest::Approx(2.0));
    CHECK(cs[1].y == doctest::Approx(-1.0));
    CHECK(cs[2].x == doctest::Approx(-2.0));
    CHECK(cs[2].y == doctest::Approx(-1.0));
    CHECK(cs[3].x == doctest::Approx(-2.0));
    CHECK(cs[3].y == doctest::Approx(1.0));
}

TEST_CASE("segment distance on known configurations") {
    CHECK(segmentDistance({0, 0}, {1, 0}, {0, 1}, {1, 1}) == doctest::Approx(1.0));
    CHECK(segmentDistance({0, 0}, {2, 2}, {0, 2}, {2, 0}) == doctest::Approx(0.0));
    CHECK(segmentDistance({0, 0}, {1, 0}, {2, 1}, {3, 1}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(segmentDistance({0, 0}, {1, 0}, {3, 0}, {4, 0}) == doctest::Approx(2.0));
    CHECK(segmentDistance({0, 0}, {0, 0}, {1, 1}, {1, 1}) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("interval overlap is closed") {
    CHECK(intervalsOverlap({0.0, 1.0}, {1.0, 2.0}));
    CHECK(intervalsOverlap({0.0, 1.0}, {0.5, 0.6}));
    CHECK_FALSE(intervalsOverlap({0.0, 1.0}, {1.0 + 2e-9, 2.0}));
    CHECK_FALSE(intervalsOverlap({0.0, 1.0}, {2.0, 3.0}));
}

TEST_CASE("rect overlap on crafted configurations") {
    OrientedRect unitA{{0.0, 0.0, 0.0}, 1.0, 1.0};

    SUBCASE("identical rects overlap") { CHECK(rectsOverlap(unitA, unitA)); }

    SUBCASE("touching edges count as overlap") {
        OrientedRect b{{1.0, 0.0, 0.0}, 1.0, 1.0};
        CHECK(rectsOverlap(unitA, b));
        CHECK(rectDistance(unitA, b) == doctest::Approx(0.0));
    }

    SUBCASE("separation just past the tolerance is detected") {
        OrientedRect b{{1.0 + 1e-6, 0.0, 0.0}, 1.0, 1.0};
        CHECK_FALSE(rectsOverlap(unitA, b));
    }

    SUBCASE("cross shape with no contained corners") {
        OrientedRect h{{0.0, 0.0, 0.0}, 4.0, 1.0};
        OrientedRect v{{0.0, 0.0, M_PI / 2.0}, 4.0, 1.0};
        CHECK(rectsOverlap(h, v));
    }

    SUBCASE("contained rect") {
        OrientedRect big{{0.0, 0.0, 0.3}, 10.0, 10.0};
        OrientedRect small{{0.5, -0.5, 1.2}, 1.0, 0.5};
        CHECK(rectsOverlap(big, small));
        CHECK(rectsOverlap(small, big));
    }

    SUBCASE("rotated corner-on gap") {
        OrientedRect b{{2.0, 0.0, M_PI / 4.0}, 1.0, 1.0};
        CHECK_FALSE(rectsOverlap(unitA, b));
        CHECK(rectDistance(unitA, b) == doctest::Approx(2.0 - 0.5 - std::sqrt(0.5)));
    }

    SUBCASE("axis-aligned gap distance") {
        OrientedRect b{{3.0, 0.0, 0.0}, 1.0, 1.0};
        CHECK(rectDistance(unitA, b) == doctest::Approx(2.0));
    }
}

TEST_CASE("rect overlap and distance agree with sampling on random pairs") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> posD(-6.0, 6.0), sizeD(0.5, 6.0), angD(-M_PI, M_PI);

    int checkedOverlap = 0, checkedDisjoint = 0;
    for (int iter = 0; iter < 500; iter++) {
        OrientedRect a{{posD(rng), posD(rng), angD(rng)}, sizeD(rng), sizeD(rng)};
        OrientedRect b{{posD(rng), posD(rng), angD(rng)}, sizeD(rng), sizeD(rng)};

        bool inside = sampledOverlap(a, b, 40);
        double pitch = std::max({a.length, a.width, b.length, b.width}) / 40.0;
        double bd = sampledBoundaryDistance(a, b, 48);

        if (inside) {
            CHECK(rectsOverlap(a, b));
            CHECK(rectDistance(a, b) == doctest::Approx(0.0));
            checkedOverlap++;
        } else if (bd > 2.0 * pitch) {
            CHECK_FALSE(rectsOverlap(a, b));
            CHECK(rectDistance(a, b) <= bd + 1e-9);
            CHECK(rectDistance(a, b) >= bd - 2.0 * pitch);
            checkedDisjoint++;
        }
    }
    // The generator must exercise both outcomes, or the test proves nothing.
    CHECK(checkedOverlap > 100);
    CHECK(checkedDisjoint > 100);
}

TEST_CASE("rectContains matches the local-frame definition") {
    OrientedRect r{{1.0, 2.0, M_PI / 6.0}, 4.0, 2.0};
    CHECK(rectContains(r, {1.0, 2.0}));
    for (double fx : {-0.49, 0.0, 0.49}) {
        for (double fy : {-0.49, 0.0, 0.49}) {
            double c = std::cos(r.center.theta), s = std::sin(r.center.theta);
            double lx = fx * r.length, ly = fy * r.width;
            Vec2 p{r.center.x + lx * c - ly * s, r.center.y + lx * s + ly * c};
            CHECK(rectContains(r, p));
        }
    }
    CHECK_FALSE(rectContains(r, {1.0 + 3.0, 2.0 + 3.0}));
    CHECK_FALSE(rectContains(r, {-5.0, 2.0}));
}
