#ifndef DTOTSIM_MOTION_H
#define DTOTSIM_MOTION_H

#include <cstdint>
#include <vector>

#include "layout.hpp"

namespace dtotsim {

struct VehicleSpec {
    double length = 5.0;
    double width = 1.8;
};

// One sample of a vehicle's planned motion. `s` is arc length along the
// route centerline (see Route); `t` is absolute simulation time, always a
// multiple of the sampling step.
struct TimedState {
    double t = 0.0;
    double s = 0.0;
    double speed = 0.0;
    Pose pose;
};

// The over-the-wire trajectory payload: what a vehicle proposes in a REQUEST
// and what the coordinator returns in a RESPONSE.
struct TimedStateSequence {
    int routeId = -1;
    VehicleSpec vehicle;
    double step = 0.0;
    std::vector<TimedState> states;
};

struct Occupancy {
    double t = 0.0;
    double s = 0.0;
    OrientedRect rect;
};

// Discrete-time occupancies trajectory: the rectangle footprint of the
// vehicle at every sampled time.
struct Dtot {
    int routeId = -1;
    VehicleSpec vehicle;
    double step = 0.0;
    std::vector<Occupancy> occ;

    double entryTime() const { return occ.front().t; }
    double exitTime() const { return occ.back().t; }
    Interval span() const { return {entryTime(), exitTime()}; }
};

// Operation counters, reset per coordination request. rectChecks includes the
// pairwise checks done inside exact interval scans, which is where the cubic
// worst case lives.
struct OpCounters {
    std::uint64_t rectChecks = 0;
    std::uint64_t exactOtiCalls = 0;
    std::uint64_t estOtiCalls = 0;
    std::uint64_t bisectionSteps = 0;
    std::uint64_t whileIterations = 0;

    std::uint64_t total() const { return rectChecks + estOtiCalls + bisectionSteps; }
    void reset() { *this = OpCounters{}; }
};

// Speed cap at arc-length position s: vTurn while the center is on or before
// the turning arc, the supplied cap elsewhere (and on straight routes).
double routeSpeedCap(const Route &route, double s, double cap);

// Fastest feasible crossing profile: accelerate at aMax from entrySpeed
// toward min(speedCap, vTurn) and hold; on turning routes the vTurn cap
// applies until the arc ends. The first state has the front bumper on the
// entrance line; the last state is fully outside the intersection region.
// entryTime must sit on the h grid.
TimedStateSequence generateTss(const Layout &layout, int routeId, const VehicleSpec &vehicle,
                               double entryTime, double entrySpeed, double speedCap, double h);

Dtot tssToDtot(const TimedStateSequence &tss);
TimedStateSequence dtotToTss(const Dtot &dtot);

// Uniform time shift of every occupancy; geometry is untouched.
void shiftDtot(Dtot &dtot, double delta);

// Occupancy time interval of occupancy k, computed from the trajectory
// itself: bounded by the nearest earlier and later samples whose rectangles
// do not touch occupancy k (falling back to the first/last sample). The scan
// deliberately visits every other occupancy, which is the linear cost the
// enhanced path avoids.
Interval exactOti(const Dtot &dtot, int k, OpCounters *counters = nullptr);

// Cheap estimate of the same interval without any footprint tests: positions
// are strictly increasing along a trajectory, so the times at which the
// center crosses s ± clearance are found by binary search over the occupancy
// array and linear interpolation, using the route's clearance tables for the
// contact distances. O(log n) per call.
Interval estimatedOti(const Dtot &dtot, int k, const Layout &layout, OpCounters *counters = nullptr);

}  // namespace dtotsim

#endif
