#include "sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dtotsim {

namespace {
constexpr double kMinBumperGap = 2.0;  // m, standstill bumper-to-bumper
constexpr double kCthHeadway = 1.0;    // s, constant-time-headway shaping
constexpr int kMaxRequestRounds = 4;
// An unconfirmed vehicle is held this far short of the entry line so a
// re-request from standstill still has runway to launch to a usable entry
// speed instead of creeping across from rest.
constexpr double kHoldSetback = 12.0;
}  // namespace

const char *phaseName(VehiclePhase p) {
    switch (p) {
        case VehiclePhase::kApproaching: return "approaching";
        case VehiclePhase::kHead: return "head";
        case VehiclePhase::kConfirmed: return "confirmed";
        case VehiclePhase::kCrossing: return "crossing";
    }
    return "?";
}

SimEngine::SimEngine(const ScenarioConfig &cfg, std::shared_ptr<const Layout> layout,
                     const EngineOptions &opts)
    : cfg_(cfg), opts_(opts), layout_(std::move(layout)) {
    cfg_.validate();
    if (!layout_) layout_ = std::make_shared<Layout>(LayoutParams{});

    stepsPerSecond_ = std::max<std::int64_t>(1, std::llround(1.0 / cfg_.h));

    if (cfg_.mode == SimMode::kTrafficLight) {
        // Demand per movement in vehicles per second, from the per-second
        // arrival probability and the turning shares.
        std::array<double, 12> demand{};
        for (int road = 0; road < 4; road++) {
            double p = spawnProbability(cfg_.volume) * cfg_.spawnScale;
            if (cfg_.unbalanced && (road == 1 || road == 3)) p *= 0.3;
            demand[static_cast<size_t>(road * 3 + 0)] = p * cfg_.pLeft;
            demand[static_cast<size_t>(road * 3 + 1)] = p * cfg_.pStraight;
            demand[static_cast<size_t>(road * 3 + 2)] = p * cfg_.pRight;
        }
        plan_ = optimizePlan(demand, 0.5);
    } else {
        CoordinatorOptions co;
        co.h = cfg_.h;
        co.techniques = cfg_.mode == SimMode::kEnhanced ? kAllTechniques : 0u;
        if (opts_.techniques) co.techniques = *opts_.techniques;
        coordinator_ = std::make_unique<Coordinator>(layout_, co);
    }

    for (int road = 0; road < 4; road++) {
        rng_[static_cast<size_t>(road)][0] = makeStream(cfg_.seed, road, RngPurpose::kSpawn);
        rng_[static_cast<size_t>(road)][1] = makeStream(cfg_.seed, road, RngPurpose::kRoute);
        rng_[static_cast<size_t>(road)][2] = makeStream(cfg_.seed, road, RngPurpose::kSpeed);
    }
}

double SimEngine::entrySpeedCap(const Route &r) const {
    return r.turnRadius > 0.0 ? r.vTurn : layout_->params().vMax;
}

std::int64_t SimEngine::ceilToStep(double t) const {
    return static_cast<std::int64_t>(std::ceil(t / cfg_.h - 1e-9));
}

void SimEngine::tracef(const char *fmt, ...) {
    char buf[192];
    va_list args;
    va_start(args, fmt);
    vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    trace_ += buf;
}

bool SimEngine::insertVehicle(int routeId, double speed) {
    const LayoutParams &p = layout_->params();
    VehicleSpec spec;
    double s0 = -(p.commRegionLength + spec.length / 2.0);

    auto &lane = lanes_[static_cast<size_t>(routeId)];
    double vIns = std::min(speed, p.vMax);
    if (!lane.empty()) {
        const VehicleAgent &tail = lane.back();
        double gap = tail.s - s0 - (tail.spec.length + spec.length) / 2.0;
        if (gap < kMinBumperGap) return false;
        // Born already able to stop behind the tail from the next step on.
        double vSafe = std::sqrt(std::max(0.0, 2.0 * p.aMin * (gap - kMinBumperGap) + tail.v * tail.v));
        vIns = std::min(vIns, vSafe);
    }

    VehicleAgent a;
    a.vin = nextVin_++;
    a.routeId = routeId;
    a.spec = spec;
    a.phase = VehiclePhase::kApproaching;
    a.s = s0;
    a.v = std::max(0.0, vIns);
    a.spawnTime = now();
    lane.push_back(a);
    generated_++;
    live_++;
    metrics_.recordCommEntry(a.vin, a.spawnTime);
    if (coordinator_) coordinator_->registerArrival(a.vin, routeId, a.spawnTime);
    tracef("%.2f %llu spawn route=%d v=%.3f\n", a.spawnTime, (unsigned long long)a.vin, routeId,
           a.v);
    return true;
}

std::uint64_t SimEngine::inject(int routeId, double speed) {
    if (routeId < 0 || routeId >= 12) throw std::invalid_argument("route id out of range");
    std::uint64_t vin = nextVin_;
    if (!insertVehicle(routeId, speed))
        throw std::runtime_error("no room at the communication boundary");
    return vin;
}

void SimEngine::spawnDraws() {
    for (int road = 0; road < 4; road++) {
        if (cfg_.vehicleTarget > 0 && generated_ >= static_cast<std::uint64_t>(cfg_.vehicleTarget))
            return;
        auto &streams = rng_[static_cast<size_t>(road)];
        double p = spawnProbability(cfg_.volume) * cfg_.spawnScale;
        if (cfg_.unbalanced && (road == 1 || road == 3)) p *= 0.3;
        if (!streams[0].bernoulli(p)) continue;

        double rm = streams[1].uniform();
        int movement = rm < cfg_.pLeft ? 0 : (rm < cfg_.pLeft + cfg_.pStraight ? 1 : 2);
        double frac = streams[2].uniform(cfg_.speedFracLo, cfg_.speedFracHi);
        insertVehicle(road * 3 + movement, frac * layout_->params().vMax);
    }
}

void SimEngine::maybeBeginCrossing(VehicleAgent &a) {
    double sNow = a.path[a.pathIdx];
    if (sNow >= -a.spec.length / 2.0 - 1e-9) {
        a.phase = VehiclePhase::kCrossing;
        a.enterTime = now();
        if (coordinator_) coordinator_->markEntered(a.vin);
        tracef("%.2f %llu enter\n", now(), (unsigned long long)a.vin);
    }
}

void SimEngine::laneTransitions(int laneId) {
    auto &lane = lanes_[static_cast<size_t>(laneId)];
    bool blocked = false;
    for (std::size_t i = 0; i < lane.size(); i++) {
        VehicleAgent &a = lane[i];
        if (a.phase == VehiclePhase::kCrossing) continue;
        if (a.phase == VehiclePhase::kConfirmed) {
            maybeBeginCrossing(a);
        } else if (!blocked) {
            if (a.phase == VehiclePhase::kApproaching) {
                a.phase = VehiclePhase::kHead;
                tracef("%.2f %llu head\n", now(), (unsigned long long)a.vin);
            }
            headAction(a, laneId, i);
            // A plan confirmed for this very step enters immediately.
            if (a.phase == VehiclePhase::kConfirmed) maybeBeginCrossing(a);
        }
        if (a.phase != VehiclePhase::kCrossing) blocked = true;
    }
}

void SimEngine::headAction(VehicleAgent &a, int laneId, std::size_t idx) {
    if (cfg_.mode == SimMode::kTrafficLight)
        lightHeadAction(a, laneId, idx);
    else
        dicaHeadAction(a, laneId, idx);
}

void SimEngine::dicaHeadAction(VehicleAgent &a, int laneId, std::size_t idx) {
    if (stepIndex_ < a.retryStep) return;
    const LayoutParams &p = layout_->params();
    const Route &route = layout_->route(a.routeId);
    double d = std::max(0.0, -a.spec.length / 2.0 - a.s);
    double cap = entrySpeedCap(route);

    ArrivalEstimate fastest = fastestArrival(d, a.v, cap, p.vMax, p.aMax, p.aMin);
    std::int64_t entryStep = std::max(stepIndex_, ceilToStep(now() + fastest.time));
    // Rounding the entry up to the grid can make the unrounded fastest entry
    // speed unreachable; clamp the proposal to what the rounded time allows.
    double gridT = static_cast<double>(entryStep - stepIndex_) * cfg_.h;
    double vProp = std::min({fastest.speed, cap,
                             maxFeasibleEntrySpeed(d, gridT, a.v, cap, p.vMax, p.aMax, p.aMin) *
                                 (1.0 - 1e-9)});

    for (int round = 0; round < kMaxRequestRounds; round++) {
        TimedStateSequence proposal =
            generateTss(*layout_, a.routeId, a.spec, static_cast<double>(entryStep) * cfg_.h,
                        vProp, p.vMax, cfg_.h);
        RequestOutcome out = coordinator_->processRequest(a.vin, proposal, now());
        if (a.requested) rerequests_++;
        a.requested = true;

        std::int64_t confirmedStep = std::llround(out.tss.states.front().t / cfg_.h);
        // The confirmed sequence carries finite-difference speeds, so a plan
        // accelerating off the line echoes back slightly above the proposed
        // entry speed; the proposal itself is the exact target.
        double vConf = std::min(vProp, out.tss.states.front().speed);
        double T = static_cast<double>(confirmedStep - stepIndex_) * cfg_.h;

        auto prof = solveApproach(d, T, a.v, vConf, p.vMax, p.aMax, p.aMin);
        if (prof && predecessorGapOk(a, laneId, idx, *prof, confirmedStep)) {
            adoptPlan(a, *prof, out.tss, confirmedStep);
            metrics_.recordConfirmation(a.vin, now());
            tracef("%.2f %llu confirm entry=%.2f delay=%.2f\n", now(), (unsigned long long)a.vin,
                   out.tss.states.front().t, out.delay);
            return;
        }
        if (!prof) {
            // The confirmed entry time cannot be met at this entry speed;
            // ask again for the same time at the fastest speed that works.
            double vFeas = maxFeasibleEntrySpeed(d, T, a.v, cap, p.vMax, p.aMax, p.aMin);
            if (vFeas > 1e-6) {
                vProp = vFeas * (1.0 - 1e-9);
                entryStep = confirmedStep;
                continue;
            }
        }
        break;
    }

    // Unadoptable; the coordinator keeps a plan nobody follows, which is
    // safe (everyone else avoids it) and is replaced on the next request.
    // Back off for a second while the speed governor eases the vehicle
    // toward the held position; from standstill there a dwell-then-launch
    // profile always exists.
    a.retryStep = stepIndex_ + stepsPerSecond_;
    holds_++;
    tracef("%.2f %llu hold\n", now(), (unsigned long long)a.vin);
}

bool SimEngine::predecessorGapOk(const VehicleAgent &a, int laneId, std::size_t idx,
                                 const ApproachProfile &prof, std::int64_t entryStep) const {
    if (idx == 0) return true;
    const VehicleAgent &pred = lanes_[static_cast<size_t>(laneId)][idx - 1];
    double minCenterGap = (pred.spec.length + a.spec.length) / 2.0 + kMinBumperGap;
    for (std::int64_t k = stepIndex_; k <= entryStep; k++) {
        std::size_t pi = pred.pathIdx + static_cast<std::size_t>(k - stepIndex_);
        if (pi >= pred.path.size()) break;  // predecessor past its plan: far gone
        double mine = a.s + prof.position(static_cast<double>(k - stepIndex_) * cfg_.h);
        if (pred.path[pi] - mine < minCenterGap - 1e-6) return false;
    }
    return true;
}

void SimEngine::adoptPlan(VehicleAgent &a, const ApproachProfile &prof,
                          const TimedStateSequence &tss, std::int64_t entryStep) {
    std::int64_t approachSteps = entryStep - stepIndex_;
    a.path.clear();
    a.path.reserve(static_cast<std::size_t>(approachSteps) + tss.states.size());
    for (std::int64_t k = 0; k < approachSteps; k++)
        a.path.push_back(a.s + prof.position(static_cast<double>(k) * cfg_.h));
    if (std::abs(a.s + prof.position(static_cast<double>(approachSteps) * cfg_.h) -
                 tss.states.front().s) > 1e-6)
        throw std::logic_error("approach profile does not meet the confirmed entry state");
    for (const TimedState &st : tss.states) a.path.push_back(st.s);
    a.pathStartStep = stepIndex_;
    a.pathIdx = 0;
    a.phase = VehiclePhase::kConfirmed;
    a.confirmTime = now();
}

void SimEngine::lightHeadAction(VehicleAgent &a, int laneId, std::size_t idx) {
    if (signalState(*plan_, now(), a.routeId) != SignalColor::kGreen) return;
    double remaining = phaseRemaining(*plan_, now(), a.routeId);
    const VehicleAgent *pred = idx > 0 ? &lanes_[static_cast<size_t>(laneId)][idx - 1] : nullptr;
    std::vector<double> traj = integrateCommitted(a, pred);
    double duration = static_cast<double>(traj.size() - 1) * cfg_.h;
    if (duration > remaining + 1e-9) return;  // cannot clear inside the slot

    a.path = std::move(traj);
    a.pathStartStep = stepIndex_;
    a.pathIdx = 0;
    a.phase = VehiclePhase::kConfirmed;
    a.confirmTime = now();
    metrics_.recordConfirmation(a.vin, now());
    tracef("%.2f %llu commit clear=%.2f\n", now(), (unsigned long long)a.vin, now() + duration);
}

std::vector<double> SimEngine::integrateCommitted(const VehicleAgent &a,
                                                  const VehicleAgent *pred) const {
    const LayoutParams &p = layout_->params();
    const Route &route = layout_->route(a.routeId);
    double lineS = -a.spec.length / 2.0;
    double s = a.s, v = a.v;
    std::vector<double> traj{s};
    for (int k = 1; k <= 200000; k++) {
        double cap = p.vMax;
        if (route.turnRadius > 0.0) {
            if (s < lineS)
                cap = std::min(cap, safeFollowSpeed(lineS - s, v, route.vTurn, p.aMin, cfg_.h, 0.0));
            else if (s <= route.arcLength)
                cap = std::min(cap, route.vTurn);
        }
        double vn = std::min(v + p.aMax * cfg_.h, cap);
        if (pred) {
            std::size_t pi = pred->pathIdx + static_cast<std::size_t>(k);
            if (pi < pred->path.size()) {
                double pS = pred->path[pi];
                double pV = pi > 0 ? (pred->path[pi] - pred->path[pi - 1]) / cfg_.h : pred->v;
                double gap = pS - s - (pred->spec.length + a.spec.length) / 2.0;
                vn = std::min({vn, safeFollowSpeed(gap, v, pV, p.aMin, cfg_.h, kMinBumperGap),
                               headwayFollowSpeed(gap, v, cfg_.h, kMinBumperGap, kCthHeadway)});
            }
        }
        vn = std::max(0.0, vn);
        s += 0.5 * (v + vn) * cfg_.h;
        v = vn;
        traj.push_back(s);
        if (s > 0.0 && layout_->vehicleFullyOutside(
                           OrientedRect{route.pose(s), a.spec.length, a.spec.width}))
            return traj;
    }
    throw std::logic_error("committed trajectory never cleared the intersection");
}

void SimEngine::sampleMetrics() {
    double t = now();
    int waiting = 0;
    std::vector<OrientedRect> rects;
    for (const auto &lane : lanes_) {
        for (const VehicleAgent &a : lane) {
            if (a.phase == VehiclePhase::kCrossing) {
                const Route &r = layout_->route(a.routeId);
                rects.push_back(OrientedRect{r.pose(a.s), a.spec.length, a.spec.width});
            } else {
                waiting++;
            }
        }
    }
    metrics_.sampleWaiting(t, waiting);
    metrics_.sampleFlow(t, generated_, exited_);
    for (std::size_t i = 0; i < rects.size(); i++)
        for (std::size_t j = i + 1; j < rects.size(); j++)
            metrics_.sampleDistance(rectDistance(rects[i], rects[j]));
    if (coordinator_) coordinator_->prune(t);
}

void SimEngine::laneMotion(int laneId) {
    const LayoutParams &p = layout_->params();
    auto &lane = lanes_[static_cast<size_t>(laneId)];
    for (std::size_t i = 0; i < lane.size(); i++) {
        VehicleAgent &a = lane[i];
        if (a.phase == VehiclePhase::kConfirmed || a.phase == VehiclePhase::kCrossing) {
            if (a.pathIdx + 1 >= a.path.size())
                throw std::logic_error("planned vehicle ran out of path before exiting");
            a.pathIdx++;
            double prev = a.s;
            a.s = a.path[a.pathIdx];
            a.v = (a.s - prev) / cfg_.h;
        } else {
            double vn = std::min(a.v + p.aMax * cfg_.h, p.vMax);
            if (i > 0) {
                const VehicleAgent &lead = lane[i - 1];  // already moved this step
                double gap = lead.s - a.s - (lead.spec.length + a.spec.length) / 2.0;
                vn = std::min({vn, safeFollowSpeed(gap, a.v, lead.v, p.aMin, cfg_.h, kMinBumperGap),
                               headwayFollowSpeed(gap, a.v, cfg_.h, kMinBumperGap, kCthHeadway)});
            }
            // Not yet cleared to enter: stop before the entrance line. Under
            // coordination hold back a launch runway; at a signal pull up to
            // the line itself.
            double holdAt = -a.spec.length / 2.0 - (coordinator_ ? kHoldSetback : 0.0);
            vn = std::min(vn, stopBySpeed(holdAt - a.s, a.v, p.aMin, cfg_.h));
            vn = std::max(0.0, vn);
            a.s += 0.5 * (a.v + vn) * cfg_.h;
            a.v = vn;
        }
    }
}

void checkNoOverlaps(const std::vector<OrientedRect> &rects) {
    for (std::size_t i = 0; i < rects.size(); i++)
        for (std::size_t j = i + 1; j < rects.size(); j++)
            if (rectsOverlap(rects[i], rects[j]))
                throw SafetyViolation("intersection region occupancy overlap");
}

void SimEngine::checkSafety() const {
    std::vector<OrientedRect> rects;
    for (const auto &lane : lanes_) {
        for (std::size_t i = 0; i < lane.size(); i++) {
            const VehicleAgent &a = lane[i];
            if (a.phase == VehiclePhase::kCrossing)
                rects.push_back(OrientedRect{layout_->route(a.routeId).pose(a.s), a.spec.length,
                                             a.spec.width});
            if (i > 0) {
                const VehicleAgent &lead = lane[i - 1];
                double gap = lead.s - a.s - (lead.spec.length + a.spec.length) / 2.0;
                if (gap < 0.0) throw SafetyViolation("lane spacing violated");
            }
        }
    }
    checkNoOverlaps(rects);
}

void SimEngine::finalizeExits() {
    for (int laneId = 0; laneId < 12; laneId++) {
        auto &lane = lanes_[static_cast<size_t>(laneId)];
        while (!lane.empty()) {
            VehicleAgent &front = lane.front();
            if (front.phase != VehiclePhase::kCrossing ||
                front.pathIdx + 1 < front.path.size())
                break;
            double exitTime =
                static_cast<double>(front.pathStartStep +
                                    static_cast<std::int64_t>(front.path.size()) - 1) *
                cfg_.h;
            bool major = laneId / 3 == 0 || laneId / 3 == 2;  // north/south roads
            metrics_.recordTrip(front.vin, front.spawnTime, exitTime, major);
            if (opts_.keepCrossingLog) {
                Dtot log;
                log.routeId = front.routeId;
                log.vehicle = front.spec;
                log.step = cfg_.h;
                const Route &r = layout_->route(front.routeId);
                log.occ.reserve(front.path.size());
                for (std::size_t k = 0; k < front.path.size(); k++) {
                    Occupancy o;
                    o.t = static_cast<double>(front.pathStartStep + static_cast<std::int64_t>(k)) *
                          cfg_.h;
                    o.s = front.path[k];
                    o.rect = OrientedRect{r.pose(o.s), front.spec.length, front.spec.width};
                    log.occ.push_back(o);
                }
                crossingLog_.push_back(std::move(log));
            }
            tracef("%.2f %llu exit\n", exitTime, (unsigned long long)front.vin);
            exited_++;
            live_--;
            lane.pop_front();
        }
    }
}

void SimEngine::step() {
    bool onSecond = stepIndex_ % stepsPerSecond_ == 0;
    if (onSecond) spawnDraws();
    for (int laneId = 0; laneId < 12; laneId++) laneTransitions(laneId);
    if (onSecond) sampleMetrics();
    for (int laneId = 0; laneId < 12; laneId++) laneMotion(laneId);
    checkSafety();
    stepIndex_++;
    finalizeExits();
}

bool SimEngine::finished() const {
    if (cfg_.vehicleTarget > 0)
        return generated_ >= static_cast<std::uint64_t>(cfg_.vehicleTarget) && live_ == 0;
    return now() >= cfg_.durationSeconds - 1e-9;
}

RunResult SimEngine::run() {
    while (!finished()) {
        if (now() > opts_.maxSimSeconds)
            throw std::runtime_error("simulation exceeded the hard time cap without finishing");
        step();
    }
    sampleMetrics();  // close every series at the moment the run ends
    if (!cfg_.tracePath.empty()) {
        std::ofstream out(cfg_.tracePath);
        if (!out) throw std::runtime_error("cannot write trace file: " + cfg_.tracePath);
        out << trace_;
    }
    RunResult r;
    r.metrics = metrics_.finalize(generated_);
    if (coordinator_) r.coordinatorStats = coordinator_->stats();
    r.simSeconds = now();
    r.steps = static_cast<std::uint64_t>(stepIndex_);
    r.generated = generated_;
    r.crossed = exited_;
    r.rerequests = rerequests_;
    r.holds = holds_;
    r.crossingLog = crossingLog_;
    return r;
}

std::vector<const VehicleAgent *> SimEngine::agentsOnLane(int routeId) const {
    std::vector<const VehicleAgent *> out;
    for (const VehicleAgent &a : lanes_[static_cast<size_t>(routeId)]) out.push_back(&a);
    return out;
}

}  // namespace dtotsim
