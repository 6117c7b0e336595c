#ifndef DTOTSIM_TRAFFIC_LIGHT_H
#define DTOTSIM_TRAFFIC_LIGHT_H

#include <array>
#include <vector>

#include "layout.hpp"

namespace dtotsim {

enum class SignalColor { kRed, kGreen, kYellow };

struct SignalPhase {
    std::vector<int> movements;   // route ids served by this phase
    double effectiveGreen = 0.0;  // s, capacity-carrying green time
    double displayedGreen = 0.0;  // s, what the lamp shows
    double yellow = 3.0;          // s
};

// Fixed-cycle four-phase plan. Each phase owns a slot of
// displayedGreen + yellow seconds; with 4 s of lost time per phase
// (displayedGreen = effectiveGreen + 1, yellow = 3) the slots sum exactly to
// the cycle length, so the cycle needs no separate all-red period.
struct SignalPlan {
    double cycleLength = 0.0;       // s
    double lostTime = 16.0;         // s per cycle, 4 s per phase
    double criticalRatioSum = 0.0;  // sum of per-phase critical flow ratios
    std::array<SignalPhase, 4> phases;

    double phaseSlot(int i) const { return phases[i].displayedGreen + phases[i].yellow; }
};

// Phase composition: {N/S through + right}, {N/S left},
// {E/W through + right}, {E/W left}. Every pair of movements inside one
// phase is route-compatible (dedicated turn lanes; opposing lefts clear
// each other), which the tests verify against the layout table.
const std::array<std::vector<int>, 4> &phaseMovements();

// Cycle length from the exponential fit: 1.5 * lostTime * e^(1.8 Y).
double optimalCycleLength(double criticalRatioSum, double lostTime = 16.0);

// Webster-style plan: per-movement flow ratios y = demand / saturationFlow,
// per-phase critical ratio = max over the phase's movements, effective green
// split proportionally to the critical ratios over (C0 - lostTime).
// Throws std::domain_error when the critical ratios sum to 1 or more.
SignalPlan optimizePlan(const std::array<double, 12> &demandPerMovement, double saturationFlow);

// Color shown to a movement at absolute time t (periodic in the cycle).
SignalColor signalState(const SignalPlan &plan, double t, int routeId);

// Time left in the movement's current green+yellow slot; 0 when red.
double phaseRemaining(const SignalPlan &plan, double t, int routeId);

}  // namespace dtotsim

#endif
