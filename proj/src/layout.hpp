#ifndef DTOTSIM_LAYOUT_H
#define DTOTSIM_LAYOUT_H

#include <string>
#include <vector>

#include "geometry.hpp"

namespace dtotsim {

struct LayoutParams {
    double laneWidth = 3.5;
    double commRegionLength = 50.0;  // distance from the entrance line covered by V2I comms
    double vMax = 70.0 / 3.6;
    double aMax = 2.0;   // max acceleration, m/s^2
    double aMin = 4.5;   // max deceleration magnitude, m/s^2
    double aLat = 2.5;   // lateral acceleration cap on arcs, m/s^2

    // Vehicle envelope used when precomputing conflict zones. Requests for
    // vehicles larger than this envelope are rejected by the coordinator.
    double envelopeLength = 5.0;
    double envelopeWidth = 1.8;

    double zoneSampleStep = 0.1;  // arc-length step for the zone sweep
    double zoneBuffer = 5.0;      // window padding, one envelope length
};

enum class Approach { North = 0, East = 1, South = 2, West = 3 };
enum class Movement { Left = 0, Straight = 1, Right = 2 };

const char *approachName(Approach a);
const char *movementName(Movement m);

// One signed route through the intersection. The parameter s is arc length
// along the centerline; s = 0 where the centerline crosses the entrance line,
// s = totalLength where it crosses out of the intersection region. The domain
// [sMin, sMax] extends upstream onto the approach lane and downstream far
// enough for any envelope-sized vehicle to clear the region.
class Route {
  public:
    int id = -1;
    Approach approach = Approach::North;
    Movement movement = Movement::Straight;
    int entryLane = -1;
    int exitLane = -1;

    double turnRadius = 0.0;  // 0 on straight routes
    double arcLength = 0.0;   // length of the turning arc (0 on straight routes)
    double vTurn = 0.0;       // speed cap while on the arc; vMax on straight routes
    double totalLength = 0.0;
    double sMin = 0.0;
    double sMax = 0.0;

    Pose pose(double s) const;
    std::string name() const;

    const std::vector<Vec2> &centerline() const { return centerline_; }

    // Smallest center-to-center arc-length gap at which an envelope-sized
    // vehicle behind/ahead of position s no longer touches one at s.
    // Tabulated numerically at construction; linear interpolation between
    // samples. On straights this is the envelope length; on arcs slightly
    // more, because rotated rectangles reach across the chord.
    double clearanceBehind(double s) const;
    double clearanceAhead(double s) const;

  private:
    friend class Layout;
    // Canonical geometry is laid out for a south approach (heading +y) and
    // rotated into place.
    double rotation_ = 0.0;
    double entryOffset_ = 0.0;  // lateral offset of the entry lane from the road axis
    double exitOffset_ = 0.0;
    double regionHalf_ = 0.0;
    Vec2 arcCenter_;      // canonical frame
    double arcPhi0_ = 0.0;
    int arcDir_ = 0;      // +1 CCW (left), -1 CW (right), 0 straight
    std::vector<Vec2> centerline_;
    double clearStep_ = 0.5;
    std::vector<double> clearBehind_, clearAhead_;
    double clearanceLookup(const std::vector<double> &table, double s) const;
    Pose canonicalPose(double s) const;
};

// Four-leg intersection, right-hand traffic, three incoming lanes per road
// (dedicated left / straight / right) and two outgoing lanes per road.
// Left turns exit on the outer outgoing lane, right turns on the inner one,
// straights keep their lateral offset.
class Layout {
  public:
    explicit Layout(const LayoutParams &params);

    const LayoutParams &params() const { return params_; }
    double regionHalf() const { return regionHalf_; }
    OrientedRect regionRect() const;

    const std::vector<Route> &routes() const { return routes_; }
    const Route &route(int id) const { return routes_.at(id); }
    int routeIdFor(Approach a, Movement m) const { return static_cast<int>(a) * 3 + static_cast<int>(m); }

    double maxRouteLength() const { return maxRouteLength_; }
    double stoppingDistance() const;

    // True when two routes can never put envelope-sized vehicles in contact,
    // established by a dense sweep at construction. A route is incompatible
    // with itself (following on the same route is handled separately).
    bool routesCompatible(int a, int b) const;

    // Arc-length window on route `a` inside which contact with some occupancy
    // of route `b` is possible. Only meaningful for incompatible pairs; the
    // window is padded by zoneBuffer on each side.
    Interval conflictWindow(int a, int b) const;

    bool vehicleFullyOutside(const OrientedRect &rect) const;

  private:
    LayoutParams params_;
    double regionHalf_ = 0.0;
    double maxRouteLength_ = 0.0;
    std::vector<Route> routes_;
    std::vector<bool> compatible_;       // 12x12
    std::vector<Interval> windows_;      // 12x12, window on the row route
    void buildRoutes();
    void buildClearances();
    void buildZones();
};

}  // namespace dtotsim

#endif
