#include "traffic_light.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dtotsim {

const std::array<std::vector<int>, 4> &phaseMovements() {
    static const std::array<std::vector<int>, 4> kPhases = {{
        {1, 7, 2, 8},    // N/S through + right
        {0, 6},          // N/S left
        {4, 10, 5, 11},  // E/W through + right
        {3, 9},          // E/W left
    }};
    return kPhases;
}

double optimalCycleLength(double criticalRatioSum, double lostTime) {
    return 1.5 * lostTime * std::exp(1.8 * criticalRatioSum);
}

SignalPlan optimizePlan(const std::array<double, 12> &demandPerMovement, double saturationFlow) {
    if (saturationFlow <= 0.0) throw std::invalid_argument("saturation flow must be positive");
    for (double d : demandPerMovement)
        if (d < 0.0) throw std::invalid_argument("demands must be nonnegative");

    SignalPlan plan;
    std::array<double, 4> critical{};
    for (int i = 0; i < 4; i++) {
        plan.phases[i].movements = phaseMovements()[i];
        double y = 0.0;
        for (int m : plan.phases[i].movements) y = std::max(y, demandPerMovement[m] / saturationFlow);
        critical[i] = y;
        plan.criticalRatioSum += y;
    }
    if (plan.criticalRatioSum >= 1.0)
        throw std::domain_error("oversaturated demand: critical flow ratios sum to 1 or more");

    plan.cycleLength = optimalCycleLength(plan.criticalRatioSum, plan.lostTime);
    double usable = plan.cycleLength - plan.lostTime;
    for (int i = 0; i < 4; i++) {
        // proportional split; an all-zero demand degenerates to equal shares
        double w = plan.criticalRatioSum > 1e-12 ? critical[i] / plan.criticalRatioSum : 0.25;
        plan.phases[i].effectiveGreen = w * usable;
        plan.phases[i].displayedGreen = plan.phases[i].effectiveGreen + 1.0;
        plan.phases[i].yellow = 3.0;
    }
    return plan;
}

namespace {

// Phase index and time into that phase's slot for absolute time t.
std::pair<int, double> locate(const SignalPlan &plan, double t) {
    double tau = std::fmod(t, plan.cycleLength);
    if (tau < 0.0) tau += plan.cycleLength;
    for (int i = 0; i < 4; i++) {
        double slot = plan.phaseSlot(i);
        if (tau < slot) return {i, tau};
        tau -= slot;
    }
    return {3, plan.phaseSlot(3)};  // numeric edge: end of cycle
}

bool serves(const SignalPhase &phase, int routeId) {
    return std::find(phase.movements.begin(), phase.movements.end(), routeId) !=
           phase.movements.end();
}

}  // namespace

SignalColor signalState(const SignalPlan &plan, double t, int routeId) {
    auto [i, local] = locate(plan, t);
    if (!serves(plan.phases[i], routeId)) return SignalColor::kRed;
    return local < plan.phases[i].displayedGreen ? SignalColor::kGreen : SignalColor::kYellow;
}

double phaseRemaining(const SignalPlan &plan, double t, int routeId) {
    auto [i, local] = locate(plan, t);
    if (!serves(plan.phases[i], routeId)) return 0.0;
    return plan.phaseSlot(i) - local;
}

}  // namespace dtotsim
