#include "approach.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dtotsim {

namespace {
constexpr double kTol = 1e-9;
}

ArrivalEstimate fastestArrival(double d, double v0, double entryCap, double vMax, double aMax,
                               double aMin) {
    d = std::max(0.0, d);
    if (v0 > entryCap) {
        double brake = (v0 * v0 - entryCap * entryCap) / (2.0 * aMin);
        if (brake > d + 1e-6)
            throw std::logic_error("cannot shed enough speed before the entry point");
    }

    // No braking needed: accelerate the whole way and arrive under the cap.
    if (v0 <= entryCap) {
        double vEnd = std::sqrt(v0 * v0 + 2.0 * aMax * d);
        if (vEnd <= entryCap + kTol) {
            double v = std::min(vEnd, entryCap);
            return {v0 < v ? (v - v0) / aMax : 0.0, v};
        }
    }

    // Accelerate to a peak, brake into the cap. Peak from distance balance:
    // (u^2 - v0^2)/2aMax + (u^2 - cap^2)/2aMin = d.
    double peak = std::sqrt((2.0 * aMax * aMin * d + aMin * v0 * v0 + aMax * entryCap * entryCap) /
                            (aMax + aMin));
    if (peak <= vMax) {
        double t = (peak > v0 ? (peak - v0) / aMax : 0.0) + (peak - entryCap) / aMin;
        return {t, entryCap};
    }
    double ramps = (vMax * vMax - v0 * v0) / (2.0 * aMax) +
                   (vMax * vMax - entryCap * entryCap) / (2.0 * aMin);
    double t = (vMax - v0) / aMax + (d - ramps) / vMax + (vMax - entryCap) / aMin;
    return {t, entryCap};
}

double ApproachProfile::position(double tau) const {
    tau = std::clamp(tau, 0.0, duration());
    if (tau <= tA) return v0 * tau + 0.5 * aA * tau * tau;
    double dA = v0 * tA + 0.5 * aA * tA * tA;
    if (tau <= tA + tC) return dA + u * (tau - tA);
    double sigma = tau - tA - tC;
    return dA + u * tC + u * sigma + 0.5 * aB * sigma * sigma;
}

double ApproachProfile::speed(double tau) const {
    tau = std::clamp(tau, 0.0, duration());
    if (tau <= tA) return v0 + aA * tau;
    if (tau <= tA + tC) return u;
    return u + aB * (tau - tA - tC);
}

namespace {

// Ramp time v0 -> u -> vStar (no cruise), piecewise linear in u.
double rampTime(double u, double v0, double vStar, double aMax, double aMin) {
    double tA = u >= v0 ? (u - v0) / aMax : (v0 - u) / aMin;
    double tB = vStar >= u ? (vStar - u) / aMax : (u - vStar) / aMin;
    return tA + tB;
}

double coveredAt(double u, double T, double v0, double vStar, double aMax, double aMin) {
    double tA = u >= v0 ? (u - v0) / aMax : (v0 - u) / aMin;
    double tB = vStar >= u ? (vStar - u) / aMax : (u - vStar) / aMin;
    double tC = std::max(0.0, T - tA - tB);
    return 0.5 * (v0 + u) * tA + u * tC + 0.5 * (u + vStar) * tB;
}

}  // namespace

std::optional<ApproachProfile> solveApproach(double d, double T, double v0, double vStar,
                                             double vMax, double aMax, double aMin) {
    if (d < -1e-9 || T < -1e-9) return std::nullopt;
    d = std::max(0.0, d);
    T = std::max(0.0, T);
    if (v0 < 0.0 || v0 > vMax + kTol || vStar < 0.0 || vStar > vMax + kTol) return std::nullopt;

    // The ramp-time constraint tA + tB <= T bounds u to an interval. The
    // ramp time is piecewise linear with its minimum at u = v0 or u = vStar.
    double uAtMin = rampTime(v0, v0, vStar, aMax, aMin) <= rampTime(vStar, v0, vStar, aMax, aMin)
                        ? v0
                        : vStar;
    if (rampTime(uAtMin, v0, vStar, aMax, aMin) > T + 1e-9) return std::nullopt;

    auto fits = [&](double u) { return rampTime(u, v0, vStar, aMax, aMin) <= T + 1e-12; };

    double uHi = vMax;
    if (!fits(uHi)) {
        double lo = uAtMin, hi = vMax;  // ramp time grows with u here
        for (int i = 0; i < 80; i++) {
            double mid = 0.5 * (lo + hi);
            (fits(mid) ? lo : hi) = mid;
        }
        uHi = lo;
    }
    double uLo = 0.0;
    if (!fits(uLo)) {
        double lo = 0.0, hi = uAtMin;  // ramp time shrinks toward uAtMin
        for (int i = 0; i < 80; i++) {
            double mid = 0.5 * (lo + hi);
            (fits(mid) ? hi : lo) = mid;
        }
        uLo = hi;
    }

    double dLo = coveredAt(uLo, T, v0, vStar, aMax, aMin);
    double dHi = coveredAt(uHi, T, v0, vStar, aMax, aMin);
    if (dLo > d + 1e-6 || dHi < d - 1e-6) return std::nullopt;

    double lo = uLo, hi = uHi;
    for (int i = 0; i < 100; i++) {
        double mid = 0.5 * (lo + hi);
        (coveredAt(mid, T, v0, vStar, aMax, aMin) < d ? lo : hi) = mid;
    }
    double u = 0.5 * (lo + hi);

    ApproachProfile p;
    p.v0 = v0;
    p.u = u;
    p.vStar = vStar;
    p.tA = u >= v0 ? (u - v0) / aMax : (v0 - u) / aMin;
    p.tB = vStar >= u ? (vStar - u) / aMax : (u - vStar) / aMin;
    p.tC = std::max(0.0, T - p.tA - p.tB);
    p.aA = p.tA > 0.0 ? (u - v0) / p.tA : 0.0;
    p.aB = p.tB > 0.0 ? (vStar - u) / p.tB : 0.0;
    return p;
}

double maxFeasibleEntrySpeed(double d, double T, double v0, double cap, double vMax, double aMax,
                             double aMin) {
    auto ok = [&](double vStar) { return solveApproach(d, T, v0, vStar, vMax, aMax, aMin).has_value(); };
    if (ok(cap)) return cap;
    // Feasible speeds form an interval that need not start at zero: a tight
    // window cannot be met while also shedding all speed. Find a feasible
    // witness, then push it up against the upper boundary.
    double lo = -1.0;
    for (int i = 0; i < 256 && lo < 0.0; i++) {
        double v = cap * static_cast<double>(i) / 256.0;
        if (ok(v)) lo = v;
    }
    if (lo < 0.0) return 0.0;
    double hi = cap;
    for (int i = 0; i < 60; i++) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

double safeFollowSpeed(double bumperGap, double v, double vLead, double aMin, double h,
                       double minGap) {
    // After this step's move of (v + v')h/2 the follower must be able to
    // stop, braking at aMin from the next step on, within the leader's
    // stopping distance plus the remaining gap less minGap:
    //   v'^2/(2b) + v'h + vh/2 <= gap - minGap + vLead^2/(2b)
    double b = aMin;
    double radicand = b * b * h * h + 2.0 * b * (bumperGap - minGap) + vLead * vLead - b * v * h;
    if (radicand <= 0.0) return 0.0;
    return std::max(0.0, -b * h + std::sqrt(radicand));
}

double headwayFollowSpeed(double bumperGap, double v, double h, double minGap, double headway) {
    // gap - (v + v')h/2 >= minGap + headway v'
    double vNext = (bumperGap - minGap - 0.5 * v * h) / (headway + 0.5 * h);
    return std::max(0.0, vNext);
}

double stopBySpeed(double dist, double v, double aMin, double h) {
    double b = aMin;
    double radicand = b * b * h * h + 2.0 * b * std::max(0.0, dist) - b * v * h;
    if (radicand <= 0.0) return 0.0;
    return std::max(0.0, -b * h + std::sqrt(radicand));
}

}  // namespace dtotsim
