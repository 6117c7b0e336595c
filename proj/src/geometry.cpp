#include "geometry.hpp"

#include <algorithm>
#include <limits>

namespace dtotsim {

double normalizeAngle(double theta) {
    double t = std::fmod(theta + M_PI, 2.0 * M_PI);
    if (t < 0) t += 2.0 * M_PI;
    return t - M_PI;
}

std::array<Vec2, 4> OrientedRect::corners() const {
    Vec2 h = center.headingVec() * (length / 2.0);
    Vec2 n = center.normalVec() * (width / 2.0);
    Vec2 c = center.position();
    return {c + h + n, c + h - n, c - h - n, c - h + n};
}

namespace {

// Half-extent of a rectangle projected onto a unit axis.
double projectedExtent(const OrientedRect &r, const Vec2 &axis) {
    double along = std::abs(r.center.headingVec().dot(axis)) * r.length / 2.0;
    double across = std::abs(r.center.normalVec().dot(axis)) * r.width / 2.0;
    return along + across;
}

bool separatedOnAxis(const OrientedRect &a, const OrientedRect &b, const Vec2 &axis) {
    double centerGap = std::abs((b.center.position() - a.center.position()).dot(axis));
    return centerGap > projectedExtent(a, axis) + projectedExtent(b, axis) + kGeomEps;
}

}  // namespace

bool rectsOverlap(const OrientedRect &a, const OrientedRect &b) {
    const Vec2 axes[4] = {a.center.headingVec(), a.center.normalVec(),
                          b.center.headingVec(), b.center.normalVec()};
    for (const Vec2 &axis : axes)
        if (separatedOnAxis(a, b, axis)) return false;
    return true;
}

double segmentDistance(const Vec2 &p0, const Vec2 &p1, const Vec2 &q0, const Vec2 &q1) {
    // Closest point from point to segment.
    auto pointSeg = [](const Vec2 &p, const Vec2 &a, const Vec2 &b) {
        Vec2 ab = b - a;
        double len2 = ab.dot(ab);
        double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        return (p - (a + ab * t)).norm();
    };

    // Proper crossing means distance zero.
    auto orient = [](const Vec2 &a, const Vec2 &b, const Vec2 &c) {
        return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    };
    double d1 = orient(p0, p1, q0), d2 = orient(p0, p1, q1);
    double d3 = orient(q0, q1, p0), d4 = orient(q0, q1, p1);
    if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return 0.0;

    return std::min(std::min(pointSeg(p0, q0, q1), pointSeg(p1, q0, q1)),
                    std::min(pointSeg(q0, p0, p1), pointSeg(q1, p0, p1)));
}

double rectDistance(const OrientedRect &a, const OrientedRect &b) {
    if (rectsOverlap(a, b)) return 0.0;
    auto ca = a.corners();
    auto cb = b.corners();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; i++) {
        for (int j = 0; j < 4; j++) {
            double d = segmentDistance(ca[i], ca[(i + 1) % 4], cb[j], cb[(j + 1) % 4]);
            best = std::min(best, d);
        }
    }
    return best;
}

bool intervalsOverlap(const Interval &a, const Interval &b) {
    return std::max(a.lo, b.lo) <= std::min(a.hi, b.hi) + kGeomEps;
}

bool rectContains(const OrientedRect &r, const Vec2 &p) {
    Vec2 d = p - r.center.position();
    return std::abs(d.dot(r.center.headingVec())) <= r.length / 2.0 + kGeomEps &&
           std::abs(d.dot(r.center.normalVec())) <= r.width / 2.0 + kGeomEps;
}

}  // namespace dtotsim
