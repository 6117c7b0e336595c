#include "motion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dtotsim {

double routeSpeedCap(const Route &route, double s, double cap) {
    if (route.turnRadius > 0.0 && s <= route.arcLength) return std::min(cap, route.vTurn);
    return cap;
}

namespace {

double speedCapAt(const Route &route, double s, double speedCap) {
    return routeSpeedCap(route, s, speedCap);
}

}  // namespace

TimedStateSequence generateTss(const Layout &layout, int routeId, const VehicleSpec &vehicle,
                               double entryTime, double entrySpeed, double speedCap, double h) {
    if (h <= 0.0) throw std::invalid_argument("sampling step must be positive");
    const Route &route = layout.route(routeId);
    if (vehicle.length <= 0.0 || vehicle.width <= 0.0)
        throw std::invalid_argument("vehicle dimensions must be positive");
    if (vehicle.length > layout.params().envelopeLength + kGeomEps ||
        vehicle.width > layout.params().envelopeWidth + kGeomEps)
        throw std::invalid_argument("vehicle exceeds the layout's planning envelope");
    double gridError = std::abs(entryTime / h - std::round(entryTime / h));
    if (gridError > 1e-6)
        throw std::invalid_argument("entry time is not aligned to the sampling grid");

    double s = -vehicle.length / 2.0;  // front bumper on the entrance line
    double cap0 = speedCapAt(route, s, std::min(speedCap, layout.params().vMax));
    if (entrySpeed < 0.0 || entrySpeed > cap0 + 1e-9)
        throw std::invalid_argument("entry speed outside [0, speed cap] for this route");

    const double aMax = layout.params().aMax;
    const double capGlobal = std::min(speedCap, layout.params().vMax);

    TimedStateSequence tss;
    tss.routeId = routeId;
    tss.vehicle = vehicle;
    tss.step = h;

    double v = entrySpeed;
    double t = std::round(entryTime / h) * h;
    for (int k = 0;; k++) {
        Pose pose = route.pose(s);
        tss.states.push_back({t, s, v, pose});
        if (layout.vehicleFullyOutside({pose, vehicle.length, vehicle.width})) break;
        if (s > route.sMax)
            throw std::logic_error("trajectory ran past the route domain without clearing the region");

        double vNext = std::min(v + aMax * h, speedCapAt(route, s, capGlobal));
        s += 0.5 * (v + vNext) * h;
        v = vNext;
        t += h;
        if (k > 2000000) throw std::logic_error("trajectory failed to clear the region");
    }
    return tss;
}

Dtot tssToDtot(const TimedStateSequence &tss) {
    Dtot d;
    d.routeId = tss.routeId;
    d.vehicle = tss.vehicle;
    d.step = tss.step;
    d.occ.reserve(tss.states.size());
    for (const TimedState &st : tss.states)
        d.occ.push_back({st.t, st.s, {st.pose, tss.vehicle.length, tss.vehicle.width}});
    return d;
}

TimedStateSequence dtotToTss(const Dtot &dtot) {
    TimedStateSequence tss;
    tss.routeId = dtot.routeId;
    tss.vehicle = dtot.vehicle;
    tss.step = dtot.step;
    tss.states.reserve(dtot.occ.size());
    for (size_t k = 0; k < dtot.occ.size(); k++) {
        const Occupancy &o = dtot.occ[k];
        double v;
        if (k + 1 < dtot.occ.size())
            v = (dtot.occ[k + 1].s - o.s) / dtot.step;
        else if (k > 0)
            v = (o.s - dtot.occ[k - 1].s) / dtot.step;
        else
            v = 0.0;
        tss.states.push_back({o.t, o.s, v, o.rect.center});
    }
    return tss;
}

void shiftDtot(Dtot &dtot, double delta) {
    for (Occupancy &o : dtot.occ) o.t += delta;
}

Interval exactOti(const Dtot &dtot, int k, OpCounters *counters) {
    const int n = static_cast<int>(dtot.occ.size());
    if (k < 0 || k >= n) throw std::invalid_argument("occupancy index out of range");
    if (counters) counters->exactOtiCalls++;

    const OrientedRect &target = dtot.occ[k].rect;
    double lb = dtot.occ.front().t;
    double ub = dtot.occ.back().t;
    bool lbFound = false, ubFound = false;
    for (int j = 0; j < n; j++) {
        if (j == k) continue;
        if (counters) counters->rectChecks++;
        if (rectsOverlap(dtot.occ[j].rect, target)) continue;
        if (j < k) {
            lb = dtot.occ[j].t;  // ascending scan keeps the latest clear sample
            lbFound = true;
        } else if (!ubFound) {
            ub = dtot.occ[j].t;
            ubFound = true;
        }
    }
    (void)lbFound;
    return {lb, ub};
}

Interval estimatedOti(const Dtot &dtot, int k, const Layout &layout, OpCounters *counters) {
    const int n = static_cast<int>(dtot.occ.size());
    if (k < 0 || k >= n) throw std::invalid_argument("occupancy index out of range");
    if (counters) counters->estOtiCalls++;
    if (n < 2) return dtot.span();

    const Occupancy &o = dtot.occ[k];

    // Along-path contact distances from the route's clearance tables. The
    // tables hold envelope-sized footprints; smaller vehicles clear sooner,
    // which only widens the estimate.
    const Route &route = layout.route(dtot.routeId);

    // Positions increase strictly along a trajectory, so the time at which
    // the center crosses a given arc-length falls out of the occupancy array
    // by binary search and linear interpolation — no footprint tests needed.
    auto timeAt = [&](double s) {
        if (s <= dtot.occ.front().s) return dtot.entryTime();
        if (s >= dtot.occ.back().s) return dtot.exitTime();
        auto it = std::lower_bound(dtot.occ.begin(), dtot.occ.end(), s,
                                   [](const Occupancy &occ, double val) { return occ.s < val; });
        const Occupancy &hiO = *it;
        const Occupancy &loO = *(it - 1);
        double ds = hiO.s - loO.s;
        double f = ds > 1e-12 ? (s - loO.s) / ds : 0.0;
        return loO.t + f * (hiO.t - loO.t);
    };

    double lb = timeAt(o.s - route.clearanceBehind(o.s));
    double ub = timeAt(o.s + route.clearanceAhead(o.s));
    return {lb, ub};
}

}  // namespace dtotsim
