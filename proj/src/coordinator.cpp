#include "coordinator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <tuple>

namespace dtotsim {

namespace {

// [first, last) occupancy indices whose arc-length position lies in the window.
std::pair<int, int> indexRange(const Dtot &d, const Interval &w) {
    auto lo = std::lower_bound(d.occ.begin(), d.occ.end(), w.lo,
                               [](const Occupancy &o, double v) { return o.s < v; });
    auto hi = std::upper_bound(d.occ.begin(), d.occ.end(), w.hi,
                               [](double v, const Occupancy &o) { return v < o.s; });
    return {static_cast<int>(lo - d.occ.begin()), static_cast<int>(hi - d.occ.begin())};
}

Interval padded(const Interval &i, double p) { return {i.lo - p, i.hi + p}; }

double exitSpeed(const Dtot &d) {
    size_t n = d.occ.size();
    return (d.occ[n - 1].s - d.occ[n - 2].s) / d.step;
}

}  // namespace

Coordinator::Coordinator(std::shared_ptr<const Layout> layout, const CoordinatorOptions &options)
    : layout_(std::move(layout)), options_(options) {
    if (!layout_) throw std::invalid_argument("coordinator needs a layout");
    if (options_.h <= 0.0) throw std::invalid_argument("sampling step must be positive");
    if ((options_.techniques & kBisection) && !(options_.techniques & kConflictZones))
        throw std::invalid_argument("bisection searches the zone windows; enable kConflictZones");
}

void Coordinator::registerArrival(std::uint64_t vin, int routeId, double t) {
    (void)t;
    layout_->route(routeId);  // validates the id
    laneQueue_[routeId].push_back(vin);
}

void Coordinator::markEntered(std::uint64_t vin) {
    for (auto &[route, q] : laneQueue_) {
        if (!q.empty() && q.front() == vin) {
            q.pop_front();
            return;
        }
    }
    throw std::invalid_argument("markEntered: vehicle is not at the head of any lane");
}

void Coordinator::validateProposal(std::uint64_t vin, const TimedStateSequence &p, double now) const {
    const double h = options_.h;
    if (p.states.size() < 2) throw RequestRejected("proposal has fewer than two states");
    if (std::abs(p.step - h) > 1e-12) throw RequestRejected("proposal uses a different sampling step");
    const Route &route = layout_->route(p.routeId);  // throws on unknown id
    if (p.vehicle.length <= 0 || p.vehicle.width <= 0 ||
        p.vehicle.length > layout_->params().envelopeLength + 1e-9 ||
        p.vehicle.width > layout_->params().envelopeWidth + 1e-9)
        throw RequestRejected("vehicle dimensions outside the planning envelope");

    auto it = laneQueue_.find(p.routeId);
    if (it == laneQueue_.end() || it->second.empty() || it->second.front() != vin)
        throw RequestRejected("request from a vehicle that is not first in its lane");

    const auto &st = p.states;
    if (st.front().t < now - 1e-9) throw RequestRejected("proposal starts in the past");
    if (std::abs(st.front().t / h - std::round(st.front().t / h)) > 1e-6)
        throw RequestRejected("proposal times are off the sampling grid");
    if (std::abs(st.front().s + p.vehicle.length / 2.0) > 1e-6)
        throw RequestRejected("first state must put the front bumper on the entrance line");

    const double vMax = layout_->params().vMax;
    const double aMax = layout_->params().aMax, aMin = layout_->params().aMin;
    double prevV = -1.0;
    for (size_t k = 0; k < st.size(); k++) {
        if (k > 0) {
            if (std::abs(st[k].t - st[k - 1].t - h) > 1e-9)
                throw RequestRejected("proposal times must advance by exactly one step");
            double v = (st[k].s - st[k - 1].s) / h;
            if (v < -1e-9 || v > vMax + 1e-6) throw RequestRejected("proposal speed out of range");
            if (prevV >= 0.0) {
                double a = (v - prevV) / h;
                if (a > aMax + 1e-6 || a < -aMin - 1e-6)
                    throw RequestRejected("proposal acceleration out of range");
            }
            prevV = v;
        }
        if (k % 10 == 0 || k + 1 == st.size()) {
            Pose expect = route.pose(st[k].s);
            if (std::abs(expect.x - st[k].pose.x) > 1e-6 || std::abs(expect.y - st[k].pose.y) > 1e-6)
                throw RequestRejected("proposal poses do not follow the declared route");
        }
    }
    OrientedRect last{st.back().pose, p.vehicle.length, p.vehicle.width};
    if (!layout_->vehicleFullyOutside(last))
        throw RequestRejected("proposal must end fully outside the intersection region");
}

Interval Coordinator::exactIntervalCached(const Dtot &dtot, int k, OpCounters &counters) {
    auto &flags = otiCached_[&dtot];
    auto &vals = otiCache_[&dtot];
    if (flags.size() != dtot.occ.size()) {
        flags.assign(dtot.occ.size(), 0);
        vals.assign(dtot.occ.size(), Interval{});
    }
    if (!flags[k]) {
        vals[k] = exactOti(dtot, k, &counters);
        flags[k] = 1;
    }
    return vals[k];
}

bool Coordinator::conflictWith(std::size_t entryIndex, const Dtot &requester, Conflict *out,
                               OpCounters &counters) {
    const ConfirmedEntry &e = confirmed_[entryIndex];
    const Dtot &blk = e.dtot;
    const double h = options_.h;
    const double estPad = 4.0 * h + 1e-9;

    int bLo = 0, bHi = static_cast<int>(blk.occ.size());
    int rLo = 0, rHi = static_cast<int>(requester.occ.size());
    if (has(kConflictZones)) {
        if (layout_->routesCompatible(e.routeId, requester.routeId)) return false;
        std::tie(bLo, bHi) = indexRange(blk, layout_->conflictWindow(e.routeId, requester.routeId));
        std::tie(rLo, rHi) = indexRange(requester, layout_->conflictWindow(requester.routeId, e.routeId));
        if (bLo >= bHi || rLo >= rHi) return false;
    }

    auto fill = [&](int kb, int kr, const Interval &ib, const Interval &ir) {
        out->entryIndex = entryIndex;
        out->kBlocker = kb;
        out->kRequester = kr;
        out->otiBlocker = ib;
        out->otiRequester = ir;
        out->firstTimeAtCollision = ib.lo;
        return true;
    };

    // Exact-interval check of one pair; the estimate only gates the search.
    auto confirmExact = [&](int kb, int kr, Interval *ib, Interval *ir) {
        *ib = exactIntervalCached(blk, kb, counters);
        *ir = exactIntervalCached(requester, kr, counters);
        return intervalsOverlap(*ib, *ir);
    };

    if (!has(kBisection)) {
        for (int kb = bLo; kb < bHi; kb++) {
            for (int kr = rLo; kr < rHi; kr++) {
                counters.rectChecks++;
                if (!rectsOverlap(blk.occ[kb].rect, requester.occ[kr].rect)) continue;
                Interval ib, ir;
                if (has(kEstimatedIntervals)) {
                    Interval eb = estimatedOti(blk, kb, *layout_, &counters);
                    Interval er = estimatedOti(requester, kr, *layout_, &counters);
                    if (!intervalsOverlap(padded(eb, estPad), padded(er, estPad))) continue;
                    if (!confirmExact(kb, kr, &ib, &ir)) continue;
                } else {
                    ib = exactOti(blk, kb, &counters);
                    ir = exactOti(requester, kr, &counters);
                    if (!intervalsOverlap(ib, ir)) continue;
                }
                return fill(kb, kr, ib, ir);
            }
        }
        return false;
    }

    // Bisection over the requester's occupancies, driven by the time axis.
    for (int kb = bLo; kb < bHi; kb++) {
        Interval tb = has(kEstimatedIntervals)
                          ? padded(estimatedOti(blk, kb, *layout_, &counters), estPad)
                          : exactOti(blk, kb, &counters);

        auto timeHit = [&](int kr) {
            if (has(kEstimatedIntervals))
                return intervalsOverlap(tb, padded(estimatedOti(requester, kr, *layout_, &counters), estPad));
            return intervalsOverlap(tb, exactOti(requester, kr, &counters));
        };

        int lo = rLo, hi = rHi - 1, found = -1;
        while (lo <= hi) {
            counters.bisectionSteps++;
            int mid = lo + (hi - lo) / 2;
            if (timeHit(mid)) {
                found = mid;
                break;
            }
            if (requester.occ[mid].t < blk.occ[kb].t)
                lo = mid + 1;
            else
                hi = mid - 1;
        }
        if (found < 0) {
            // The walk can land next to a hit; sweep a small neighborhood.
            for (int kr = std::max(rLo, lo - 3); kr <= std::min(rHi - 1, lo + 3); kr++) {
                if (timeHit(kr)) {
                    found = kr;
                    break;
                }
            }
        }
        if (found < 0) continue;

        // Expand to the whole run of time hits around the landing point.
        int wLo = found, wHi = found;
        for (int kr = found - 1, miss = 0; kr >= rLo && miss < 3; kr--) {
            if (timeHit(kr)) {
                wLo = kr;
                miss = 0;
            } else {
                miss++;
            }
        }
        for (int kr = found + 1, miss = 0; kr < rHi && miss < 3; kr++) {
            if (timeHit(kr)) {
                wHi = kr;
                miss = 0;
            } else {
                miss++;
            }
        }

        for (int kr = wLo; kr <= wHi; kr++) {
            counters.rectChecks++;
            if (!rectsOverlap(blk.occ[kb].rect, requester.occ[kr].rect)) continue;
            Interval ib, ir;
            if (has(kEstimatedIntervals)) {
                if (!confirmExact(kb, kr, &ib, &ir)) continue;
            } else {
                ib = tb;
                ir = exactOti(requester, kr, &counters);
                if (!intervalsOverlap(ib, ir)) continue;
            }
            return fill(kb, kr, ib, ir);
        }
    }
    return false;
}

std::vector<Coordinator::Conflict> Coordinator::collectCandidates(const Dtot &requester,
                                                                  OpCounters &counters) {
    std::vector<Conflict> out;
    const double pad = 2.0 * options_.h;
    for (std::size_t idx = 0; idx < confirmed_.size(); idx++) {
        const ConfirmedEntry &e = confirmed_[idx];
        // Same-route predecessors are never space-time conflicts in the
        // crossing sense: the front-vehicle pass already serialized them
        // with a standstill gap, and a follower re-occupying the same space
        // later is exactly what following means. The occupancy-interval
        // test would flag them anyway (it is deliberately conservative), so
        // they are excluded structurally in every mode.
        if (e.routeId == requester.routeId) continue;
        if (has(kFilterConfirmedSet)) {
            if (layout_->routesCompatible(e.routeId, requester.routeId)) continue;
            if (!intervalsOverlap(padded(e.dtot.span(), pad), padded(requester.span(), pad))) continue;
        }
        Conflict c;
        if (conflictWith(idx, requester, &c, counters)) out.push_back(c);
    }
    std::sort(out.begin(), out.end(), [this](const Conflict &a, const Conflict &b) {
        if (a.firstTimeAtCollision != b.firstTimeAtCollision)
            return a.firstTimeAtCollision < b.firstTimeAtCollision;
        return confirmed_[a.entryIndex].vin < confirmed_[b.entryIndex].vin;
    });
    return out;
}

Dtot Coordinator::applyFrontVehicleConstraints(const TimedStateSequence &proposal, Dtot dtot,
                                               bool *capped, OpCounters &counters) {
    (void)counters;
    const Route &route = layout_->route(dtot.routeId);
    const double h = options_.h;

    // Vehicles headed for the same exit lane: never exit faster than a
    // vehicle that exits ahead, or the gap at the exit would close.
    for (int pass = 0; pass < 8; pass++) {
        double cap = std::numeric_limits<double>::infinity();
        for (const ConfirmedEntry &e : confirmed_) {
            if (e.routeId == dtot.routeId) continue;
            if (layout_->route(e.routeId).exitLane != route.exitLane) continue;
            if (e.dtot.exitTime() <= dtot.exitTime() + 1e-9) cap = std::min(cap, exitSpeed(e.dtot));
        }
        if (exitSpeed(dtot) <= cap + 1e-9) break;
        double entrySpeed = std::min(proposal.states.front().speed, cap);
        TimedStateSequence regen = generateTss(*layout_, dtot.routeId, dtot.vehicle,
                                               proposal.states.front().t, entrySpeed, cap, h);
        dtot = tssToDtot(regen);
        *capped = true;
    }

    // Vehicles already confirmed on the same route: keep a standstill margin
    // of 2 m beyond the bumper-to-bumper distance at every common step.
    double needed = 0.0;
    for (const ConfirmedEntry &e : confirmed_) {
        if (e.routeId != dtot.routeId) continue;
        const Dtot &front = e.dtot;
        double gap = front.vehicle.length / 2.0 + dtot.vehicle.length / 2.0 + 2.0;
        for (const Occupancy &of : front.occ) {
            double limit = of.s - gap;
            if (limit >= dtot.occ.back().s) continue;  // front is beyond my whole plan
            double lastOk;
            if (limit < dtot.occ.front().s) {
                lastOk = dtot.entryTime() - h;  // must not even have entered yet
            } else {
                auto it = std::upper_bound(dtot.occ.begin(), dtot.occ.end(), limit,
                                           [](double v, const Occupancy &o) { return v < o.s; });
                lastOk = (it - 1)->t;
            }
            needed = std::max(needed, of.t - lastOk);
        }
    }
    if (needed > 0.0) shiftDtot(dtot, std::ceil(needed / h - 1e-9) * h);
    return dtot;
}

void Coordinator::validateAgainstAll(const Dtot &requester, std::uint64_t vin) const {
    for (const ConfirmedEntry &e : confirmed_) {
        const Dtot &other = e.dtot;
        for (const Occupancy &mine : requester.occ) {
            auto it = std::lower_bound(other.occ.begin(), other.occ.end(), mine.t - 1e-9,
                                       [](const Occupancy &o, double v) { return o.t < v; });
            if (it == other.occ.end() || std::abs(it->t - mine.t) > 1e-9) continue;
            if (rectsOverlap(mine.rect, it->rect))
                throw SafetyViolation("confirmed plans for vehicles " + std::to_string(vin) + " and " +
                                      std::to_string(e.vin) + " overlap at t=" + std::to_string(mine.t));
        }
    }
}

RequestOutcome Coordinator::processRequest(std::uint64_t vin, const TimedStateSequence &proposal,
                                           double now) {
    validateProposal(vin, proposal, now);

    // A re-request replaces the vehicle's previous plan.
    confirmed_.erase(std::remove_if(confirmed_.begin(), confirmed_.end(),
                                    [vin](const ConfirmedEntry &e) { return e.vin == vin; }),
                     confirmed_.end());
    otiCache_.clear();
    otiCached_.clear();

    OpCounters counters;
    auto t0 = std::chrono::steady_clock::now();

    bool capped = false;
    Dtot dtot = applyFrontVehicleConstraints(proposal, tssToDtot(proposal), &capped, counters);

    int rounds = 0;
    std::vector<std::uint64_t> conflictVins;
    while (true) {
        auto candidates = collectCandidates(dtot, counters);
        if (candidates.empty()) break;
        for (const Conflict &c : candidates) conflictVins.push_back(confirmed_[c.entryIndex].vin);
        counters.whileIterations++;
        if (++rounds > static_cast<int>(confirmed_.size()) + 2)
            throw std::logic_error("conflict resolution did not settle within the confirmed-set bound");

        Conflict cur = candidates.front();
        for (int inner = 0;; inner++) {
            double delta = cur.otiBlocker.hi - cur.otiRequester.lo + options_.h;
            if (delta <= 0.0) throw std::logic_error("non-positive delay computed for a conflict");
            shiftDtot(dtot, delta);
            otiCache_.erase(&dtot);
            otiCached_.erase(&dtot);
            if (!conflictWith(cur.entryIndex, dtot, &cur, counters)) break;
            if (inner > 200000) throw std::logic_error("conflict with one vehicle failed to resolve");
        }
    }

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (options_.validateConfirmed) validateAgainstAll(dtot, vin);

    confirmed_.push_back({vin, dtot.routeId, dtot, now});

    stats_.lastRequest = counters;
    stats_.cumulative.rectChecks += counters.rectChecks;
    stats_.cumulative.exactOtiCalls += counters.exactOtiCalls;
    stats_.cumulative.estOtiCalls += counters.estOtiCalls;
    stats_.cumulative.bisectionSteps += counters.bisectionSteps;
    stats_.cumulative.whileIterations += counters.whileIterations;
    stats_.requests++;
    stats_.wallSecondsLast = wall;
    stats_.wallSecondsTotal += wall;
    stats_.wallPerRequest.push_back(wall);

    std::sort(conflictVins.begin(), conflictVins.end());
    conflictVins.erase(std::unique(conflictVins.begin(), conflictVins.end()), conflictVins.end());

    RequestOutcome outcome;
    outcome.tss = dtotToTss(dtot);
    outcome.delay = dtot.entryTime() - proposal.states.front().t;
    outcome.speedCapped = capped;
    outcome.conflictsResolved = rounds;
    outcome.conflictVins = std::move(conflictVins);
    outcome.counters = counters;
    outcome.wallSeconds = wall;
    return outcome;
}

void Coordinator::prune(double now) {
    confirmed_.erase(std::remove_if(confirmed_.begin(), confirmed_.end(),
                                    [now](const ConfirmedEntry &e) { return e.dtot.exitTime() < now - 1e-9; }),
                     confirmed_.end());
}

}  // namespace dtotsim
