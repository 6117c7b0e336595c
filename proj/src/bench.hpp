#ifndef DTOTSIM_BENCH_H
#define DTOTSIM_BENCH_H

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "coordinator.hpp"
#include "scenario.hpp"
#include "sim_engine.hpp"

namespace dtotsim {

// Layout whose longest route is exactly `regionLength` meters, obtained by
// scaling the lane width. Both synthetic probes use it to sweep the
// trajectory sample count while keeping the geometry shape fixed.
std::shared_ptr<const Layout> makeScaledLayout(double regionLength);

// Outcome of one synthetic coordination probe: the counters of the single
// measured request, plus setup diagnostics that must stay clean for the
// counts to mean anything (every pre-confirmed plan accepted undelayed).
struct ProbeResult {
    double regionLength = 0.0;
    double meanSamples = 0.0;  // model sample count for this region length
    OpCounters counters;       // measured request only
    std::uint64_t ops = 0;     // counters.total()
    double wallSeconds = 0.0;
    double delay = 0.0;
    int conflictsResolved = 0;
    bool speedCapped = false;
    double maxSetupDelay = 0.0;  // largest delay over the pre-confirmed plans
    bool setupCapped = false;    // any pre-confirmed plan was speed-capped
    int setupConflicts = 0;      // conflicts resolved while storing the plans
};

// Worst-case scan cost probe. Two plans are confirmed first: one creeps
// through the conflict cell it shares with the requester and has dragged its
// footprint clear (with margin) before the requester's arrives, and one
// crawls down a compatible turning route so it can never touch anybody. The
// measured request also creeps through the shared cell, so a fixed fraction
// of its samples faces a footprint-dense window. Under the baseline mask it
// pays the full footprint-pair grid against both stored plans plus an exact
// interval scan per near hit; under the enhanced mask the set filter drops
// the crawler and the zone window plus estimate-guided search shrink the
// rest. Throws std::logic_error when a profile cannot be built for this
// region length.
ProbeResult crossingLoadProbe(double regionLength, std::uint32_t techniques);

// Stored-set filtering probe at a fixed region length. The stored set mixes
// nine expired plans on one crossing route, one live plan on the other
// crossing route (the only entry a span filter must keep), and eight
// never-conflicting plans on a compatible turning route. The measured
// request sprints through the crossing band, so footprint hits are few and
// the cost differences between technique masks come from how much of the
// stored set each one scans.
ProbeResult filterLoadProbe(std::uint32_t techniques);

// Least-squares slope of log(y) against log(x). Requires at least two
// points, all coordinates positive.
double fitLogLogSlope(const std::vector<std::pair<double, double>> &points);

// All technique masks the coordinator accepts (bisection requires conflict
// zones), ascending; 12 of the 16 combinations.
std::vector<std::uint32_t> validTechniqueMasks();

// Compact mask name: "none" for 0, otherwise the letters A-D of the enabled
// techniques in order (A filter, B zones, C estimates, D bisection).
std::string techniquesLabel(std::uint32_t techniques);

// Inverse of techniquesLabel, plus the aliases "baseline" (none) and
// "enhanced"/"all" (everything). Letters may repeat but not conflict with
// the zone requirement; throws std::invalid_argument otherwise.
std::uint32_t parseTechniques(const std::string &text);

// One randomized micro-scenario outcome: per-vehicle confirmed entry times
// and the conflict sets reported for each request, in request order.
struct MicroOutcome {
    std::vector<double> entryTimes;
    std::vector<std::vector<std::uint64_t>> conflictVins;
};

// Runs 2..5 vehicles on distinct random routes through one coordinator with
// the given technique mask. The scenario (routes, entry offsets, speeds) is
// a pure function of the seed, so outcomes across masks are comparable.
MicroOutcome runMicroScenario(std::shared_ptr<const Layout> layout, std::uint32_t techniques,
                              std::uint64_t seed);

// One row of a technique-ablation matrix: full simulation of the same
// scenario under one mask.
struct BenchResult {
    std::string label;
    std::uint32_t techniques = 0;
    std::uint64_t requests = 0;
    OpCounters counters;  // cumulative over the run
    std::uint64_t ops = 0;
    double wallSeconds = 0.0;  // coordinator time only
    double wallP50 = 0.0;
    double wallP95 = 0.0;
    double wallMax = 0.0;
    double speedupOps = 1.0;   // baseline ops / this row's ops
    double speedupWall = 1.0;  // baseline wall / this row's wall
    std::uint64_t generated = 0;
    std::uint64_t crossed = 0;
};

// Runs the scenario once per mask (a mask-0 baseline row is added when
// missing) and fills per-row speedups relative to that baseline. Every run
// shares the config and seed, so the ratios compare like with like.
std::vector<BenchResult> runBenchMatrix(const ScenarioConfig &cfg,
                                        std::vector<std::uint32_t> masks);

}  // namespace dtotsim

#endif
