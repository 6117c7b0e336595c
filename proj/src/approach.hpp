#ifndef DTOTSIM_APPROACH_H
#define DTOTSIM_APPROACH_H

#include <optional>

namespace dtotsim {

// Closed-form kinematics for the approach lane: meeting an entry time at an
// entry speed, and discrete-time car-following caps. Everything here is pure
// arithmetic on one spatial axis; distances are measured from the vehicle's
// current center, speeds in m/s.

struct ArrivalEstimate {
    double time = 0.0;   // seconds from now
    double speed = 0.0;  // speed when the distance has been covered
};

// Minimum time to cover distance d starting at v0 and finishing at or below
// entryCap: accelerate at aMax toward the peak (or vMax), brake at aMin into
// the cap if needed. Throws std::logic_error when even full braking cannot
// get below entryCap within d (callers prevent this with the stop governor).
ArrivalEstimate fastestArrival(double d, double v0, double entryCap, double vMax, double aMax,
                               double aMin);

// Three-segment profile: constant acceleration v0 -> u, cruise at u,
// constant acceleration u -> vStar; covers exactly distance d in exactly
// time T. tau below is time since the profile start, in [0, T].
struct ApproachProfile {
    double v0 = 0.0, u = 0.0, vStar = 0.0;
    double tA = 0.0, tC = 0.0, tB = 0.0;
    double aA = 0.0, aB = 0.0;  // signed segment accelerations

    double position(double tau) const;
    double speed(double tau) const;
    double duration() const { return tA + tC + tB; }
};

// Solves for the cruise speed u (monotone bisection: covered distance grows
// with u). Returns nullopt when no profile exists: T too short even for the
// direct ramp, the slowest admissible profile still overshoots d, or the
// fastest one falls short.
std::optional<ApproachProfile> solveApproach(double d, double T, double v0, double vStar,
                                             double vMax, double aMax, double aMin);

// Largest entry speed for which solveApproach(d, T, v0, vStar, ...) succeeds,
// capped at `cap`. 0 when no entry speed is feasible at all.
double maxFeasibleEntrySpeed(double d, double T, double v0, double cap, double vMax, double aMax,
                             double aMin);

// Largest next-step speed that keeps a follower able to stop behind the
// leader under trapezoidal integration (s advances by (v + v')h/2), assuming
// both can brake at aMin and the leader is vLead fast at bumperGap ahead.
// Keeps at least minGap of bumper-to-bumper distance.
double safeFollowSpeed(double bumperGap, double v, double vLead, double aMin, double h,
                       double minGap);

// Constant-time-headway shaping: next-step speed that keeps
// bumperGap >= minGap + headway * speed after the move.
double headwayFollowSpeed(double bumperGap, double v, double h, double minGap, double headway);

// Largest next-step speed that can still stop within dist (same discrete
// model as safeFollowSpeed with a stationary target and no gap).
double stopBySpeed(double dist, double v, double aMin, double h);

}  // namespace dtotsim

#endif
