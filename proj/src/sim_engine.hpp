#ifndef DTOTSIM_SIM_ENGINE_H
#define DTOTSIM_SIM_ENGINE_H

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "approach.hpp"
#include "coordinator.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "traffic_light.hpp"

namespace dtotsim {

// Lifecycle of one vehicle. Spawning happens at the communication-region
// boundary, so arrival and communication entry coincide. A head vehicle that
// secured a plan is kConfirmed until its front bumper reaches the entrance
// line, kCrossing until fully outside, then it leaves the world.
enum class VehiclePhase { kApproaching, kHead, kConfirmed, kCrossing };
const char *phaseName(VehiclePhase p);

struct VehicleAgent {
    std::uint64_t vin = 0;
    int routeId = -1;
    VehicleSpec spec;
    VehiclePhase phase = VehiclePhase::kApproaching;
    double s = 0.0;  // center, arc length along the route axis
    double v = 0.0;
    double spawnTime = 0.0;    // == communication-region entry
    double confirmTime = -1.0;
    double enterTime = -1.0;   // front bumper on the entrance line

    // Materialized future positions, one per step, while kConfirmed or
    // kCrossing: path[pathIdx] is the position now, the last entry is the
    // first fully-outside sample.
    std::vector<double> path;
    std::int64_t pathStartStep = 0;
    std::size_t pathIdx = 0;

    bool requested = false;    // has sent at least one crossing request
    std::int64_t retryStep = 0;  // earliest step for the next request after a hold
};

struct EngineOptions {
    bool keepCrossingLog = false;    // record every realized trajectory
    double maxSimSeconds = 14400.0;  // hard cap; exceeding it throws
    // Coordinator technique mask override (bench/ablation); when unset the
    // mode decides: baseline none, enhanced all.
    std::optional<std::uint32_t> techniques;
};

struct RunResult {
    MetricsReport metrics;
    CoordinatorStats coordinatorStats;  // zeros under traffic-light control
    double simSeconds = 0.0;
    std::uint64_t steps = 0;
    std::uint64_t generated = 0;
    std::uint64_t crossed = 0;
    std::uint64_t rerequests = 0;        // requests beyond each vehicle's first
    std::uint64_t holds = 0;             // unadoptable plans: vehicle stopped and retried
    std::vector<Dtot> crossingLog;       // realized full trajectories, optional
};

// Throws SafetyViolation when any two footprints overlap. The engine feeds
// it every in-region vehicle after each step; exposed for direct testing.
void checkNoOverlaps(const std::vector<OrientedRect> &rects);

// Discrete-time world: four roads, twelve routes, one lane per route.
// Per step: spawn draws (integer seconds), lane transitions front to back
// (entries, head promotion, requests or signal commits), metrics sampling
// (integer seconds), motion, safety invariants, exits. Identical
// (config, seed) pairs produce identical traces bit for bit.
class SimEngine {
  public:
    SimEngine(const ScenarioConfig &cfg, std::shared_ptr<const Layout> layout = nullptr,
              const EngineOptions &opts = {});

    void step();
    RunResult run();

    // Test hook: place one vehicle at the communication boundary outside the
    // random spawn flow. Throws std::runtime_error when the lane tail leaves
    // no room. Counts toward the vehicle target.
    std::uint64_t inject(int routeId, double speed);

    double now() const { return static_cast<double>(stepIndex_) * cfg_.h; }
    bool finished() const;
    std::uint64_t generated() const { return generated_; }
    std::uint64_t exited() const { return exited_; }
    int liveAgents() const { return live_; }
    const Layout &layout() const { return *layout_; }
    const Coordinator *coordinator() const { return coordinator_.get(); }
    const SignalPlan *signalPlan() const { return plan_ ? &*plan_ : nullptr; }
    const std::string &traceLog() const { return trace_; }
    std::vector<const VehicleAgent *> agentsOnLane(int routeId) const;

  private:
    void spawnDraws();
    bool insertVehicle(int routeId, double speed);
    void laneTransitions(int laneId);
    void maybeBeginCrossing(VehicleAgent &a);
    void headAction(VehicleAgent &a, int laneId, std::size_t idx);
    void dicaHeadAction(VehicleAgent &a, int laneId, std::size_t idx);
    void lightHeadAction(VehicleAgent &a, int laneId, std::size_t idx);
    bool predecessorGapOk(const VehicleAgent &a, int laneId, std::size_t idx,
                          const ApproachProfile &prof, std::int64_t entryStep) const;
    void adoptPlan(VehicleAgent &a, const ApproachProfile &prof, const TimedStateSequence &tss,
                   std::int64_t entryStep);
    std::vector<double> integrateCommitted(const VehicleAgent &a, const VehicleAgent *pred) const;
    void sampleMetrics();
    void laneMotion(int laneId);
    void checkSafety() const;
    void finalizeExits();
    void tracef(const char *fmt, ...);

    double entrySpeedCap(const Route &r) const;
    std::int64_t ceilToStep(double t) const;

    ScenarioConfig cfg_;
    EngineOptions opts_;
    std::shared_ptr<const Layout> layout_;
    std::unique_ptr<Coordinator> coordinator_;
    std::optional<SignalPlan> plan_;

    std::array<std::deque<VehicleAgent>, 12> lanes_;
    std::array<std::array<Pcg32, 3>, 4> rng_;  // [road][spawn, route, speed]

    std::int64_t stepIndex_ = 0;
    std::int64_t stepsPerSecond_ = 20;
    std::uint64_t nextVin_ = 1;
    std::uint64_t generated_ = 0;
    std::uint64_t exited_ = 0;
    int live_ = 0;
    std::uint64_t rerequests_ = 0;
    std::uint64_t holds_ = 0;

    MetricsCollector metrics_;
    std::string trace_;
    std::vector<Dtot> crossingLog_;
};

}  // namespace dtotsim

#endif
