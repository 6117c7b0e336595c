#ifndef DTOTSIM_COORDINATOR_H
#define DTOTSIM_COORDINATOR_H

#include <cmath>
#include <cstdint>
#include <deque>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "motion.hpp"

namespace dtotsim {

// Optimization techniques that can be toggled independently. Baseline runs
// with none of them; the enhanced coordinator runs with all four.
enum Technique : std::uint32_t {
    kFilterConfirmedSet = 1u << 0,  // skip vehicles that cannot meet the requester
    kConflictZones = 1u << 1,       // restrict both loops to precomputed route windows
    kEstimatedIntervals = 1u << 2,  // cheap interval estimates instead of full scans
    kBisection = 1u << 3,           // binary search over the requester's occupancies
    kAllTechniques = 0xF,
};

struct CoordinatorOptions {
    std::uint32_t techniques = 0;
    double h = 0.05;
    // After every confirmation, brute-force check the new plan against every
    // stored plan; meant for tests, not for timed runs.
    bool validateConfirmed = false;
};

struct ConfirmedEntry {
    std::uint64_t vin = 0;
    int routeId = -1;
    Dtot dtot;
    double confirmedAt = 0.0;
};

struct RequestOutcome {
    TimedStateSequence tss;
    double delay = 0.0;        // total time shift applied to the proposal
    bool speedCapped = false;  // profile was regenerated under a lower cap
    int conflictsResolved = 0;
    std::vector<std::uint64_t> conflictVins;  // sorted, unique; every vehicle that forced a change
    OpCounters counters;
    double wallSeconds = 0.0;
};

struct CoordinatorStats {
    OpCounters lastRequest;
    OpCounters cumulative;
    std::uint64_t requests = 0;
    double wallSecondsLast = 0.0;
    double wallSecondsTotal = 0.0;
    std::vector<double> wallPerRequest;  // one entry per confirmed request
};

// Distance needed to brake from speed v to rest at deceleration a.
inline double brakingDistance(double v, double a) { return v * v / (2.0 * a); }

// Closed-form cost model for one coordination request. A vehicle that can
// reach cruise speed inside the region spends part of the region
// accelerating and the rest cruising; a short region is covered entirely
// while accelerating. meanSamples() is the resulting trajectory sample count
// N, and the two envelopes are the asymptotic operation counts per request:
// the exhaustive pairwise scan re-derives every interval (n^2 pairs of
// occupancy sets, cubic in N), the optimized scan walks each window once and
// bisects (N log2 N per stored plan).
struct ComplexityModel {
    double aMax = 2.0;           // m/s^2
    double vApproach = 70 / 3.6; // m/s
    double regionLength = 50.0;  // m, communication region
    double h = 0.05;             // s

    double meanSamples() const {
        double reachable = vApproach * vApproach / (2.0 * aMax);
        if (regionLength >= reachable)
            return (2.0 * aMax * regionLength + vApproach * vApproach) /
                   (2.0 * aMax * vApproach * h);
        return std::sqrt(2.0 * regionLength / aMax) / h;
    }
    double baselineOps(int n) const {
        double m = meanSamples();
        return static_cast<double>(n) * n * m * m * m;
    }
    double enhancedOps(int n) const {
        double m = meanSamples();
        return static_cast<double>(n) * n * m * std::log2(m);
    }
};

struct RequestRejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SafetyViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Intersection-side coordination agent. Vehicles announce themselves when
// they enter the communication region (registerArrival), may send a crossing
// request once they are first in their lane, and are dequeued when their
// front bumper crosses the entrance line (markEntered).
class Coordinator {
  public:
    Coordinator(std::shared_ptr<const Layout> layout, const CoordinatorOptions &options);

    void registerArrival(std::uint64_t vin, int routeId, double t);
    void markEntered(std::uint64_t vin);

    // Validates the proposal, applies front-vehicle constraints, then delays
    // the trajectory until it conflicts with no stored plan. Throws
    // RequestRejected for malformed proposals or requests from vehicles that
    // are not first in their lane.
    RequestOutcome processRequest(std::uint64_t vin, const TimedStateSequence &proposal, double now);

    // Drop stored plans that have fully left the intersection.
    void prune(double now);

    const std::vector<ConfirmedEntry> &confirmed() const { return confirmed_; }
    const CoordinatorStats &stats() const { return stats_; }
    const Layout &layout() const { return *layout_; }
    const CoordinatorOptions &options() const { return options_; }

  private:
    struct Conflict {
        std::size_t entryIndex = 0;
        int kBlocker = -1;
        int kRequester = -1;
        Interval otiBlocker;    // exact interval of the blocking occupancy
        Interval otiRequester;  // exact interval of the requester's occupancy
        double firstTimeAtCollision = 0.0;
    };

    std::shared_ptr<const Layout> layout_;
    CoordinatorOptions options_;
    std::vector<ConfirmedEntry> confirmed_;
    std::unordered_map<int, std::deque<std::uint64_t>> laneQueue_;
    CoordinatorStats stats_;

    // Per-request exact-interval cache, used only by the estimated-interval
    // confirmation step; the baseline path recomputes every scan.
    std::unordered_map<const Dtot *, std::vector<Interval>> otiCache_;
    std::unordered_map<const Dtot *, std::vector<char>> otiCached_;

    void validateProposal(std::uint64_t vin, const TimedStateSequence &proposal, double now) const;
    Dtot applyFrontVehicleConstraints(const TimedStateSequence &proposal, Dtot dtot, bool *capped,
                                      OpCounters &counters);
    bool conflictWith(std::size_t entryIndex, const Dtot &requester, Conflict *out, OpCounters &counters);
    std::vector<Conflict> collectCandidates(const Dtot &requester, OpCounters &counters);
    Interval exactIntervalCached(const Dtot &dtot, int k, OpCounters &counters);
    void validateAgainstAll(const Dtot &requester, std::uint64_t vin) const;

    bool has(Technique t) const { return (options_.techniques & t) != 0; }
};

}  // namespace dtotsim

#endif
