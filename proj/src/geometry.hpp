#ifndef DTOTSIM_GEOMETRY_H
#define DTOTSIM_GEOMETRY_H

#include <array>
#include <cmath>

namespace dtotsim {

// Comparison slack for all geometric predicates. Sets are closed: boundary
// contact counts as overlap.
constexpr double kGeomEps = 1e-9;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2 &o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2 &o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2 &o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

// Normalize an angle into [-pi, pi).
double normalizeAngle(double theta);

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;  // heading, radians

    Vec2 position() const { return {x, y}; }
    Vec2 headingVec() const { return {std::cos(theta), std::sin(theta)}; }
    Vec2 normalVec() const { return {-std::sin(theta), std::cos(theta)}; }
};

// Rectangle centered on `center`, `length` along the heading, `width` across.
struct OrientedRect {
    Pose center;
    double length = 0.0;
    double width = 0.0;

    // Corner order: front-left, front-right, rear-right, rear-left,
    // where "front" is along the heading and "left" is +90 deg from it.
    std::array<Vec2, 4> corners() const;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Separating-axis test over the four edge normals of the two rectangles.
bool rectsOverlap(const OrientedRect &a, const OrientedRect &b);

// Minimum Euclidean distance between the two rectangles; 0 when they overlap.
double rectDistance(const OrientedRect &a, const OrientedRect &b);

// Closed-interval overlap: max(lo) <= min(hi).
bool intervalsOverlap(const Interval &a, const Interval &b);

// Minimum distance between segments p0-p1 and q0-q1.
double segmentDistance(const Vec2 &p0, const Vec2 &p1, const Vec2 &q0, const Vec2 &q1);

// True if p lies inside (or on the boundary of) the rectangle.
bool rectContains(const OrientedRect &r, const Vec2 &p);

}  // namespace dtotsim

#endif
