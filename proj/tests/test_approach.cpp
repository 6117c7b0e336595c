#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "approach.hpp"
#include "doctest.h"
#include "rng.hpp"

using namespace dtotsim;

namespace {

constexpr double kVMax = 70.0 / 3.6;
constexpr double kAMax = 2.0;
constexpr double kAMin = 4.5;
constexpr double kH = 0.05;

// Greedy bang-bang integrator at a fine time step: accelerate unless the
// next step would leave too little room to brake back under the cap.
// Independent of the closed-form solution; agrees in the fine-step limit.
ArrivalEstimate greedyArrival(double d, double v0, double cap, double dt = 1e-4) {
    double s = 0.0, v = v0, t = 0.0;
    const int maxSteps = static_cast<int>(180.0 / dt);
    for (int k = 0; k < maxSteps; k++) {
        if (s >= d - 1e-12) return {t, v};
        double va = std::min(kVMax, v + kAMax * dt);
        double remAfter = d - (s + 0.5 * (v + va) * dt);
        double need = std::max(0.0, va * va - cap * cap) / (2.0 * kAMin);
        double vn = (va <= cap || need <= remAfter) ? va : std::max(cap, v - kAMin * dt);
        s += 0.5 * (v + vn) * dt;
        v = vn;
        t += dt;
    }
    FAIL("greedy integrator never arrived");
    return {};
}

// Ramp time and covered distance of the three-segment family, written out
// directly from its definition (the test's own copy, kept deliberately dumb).
double rampOracle(double u, double v0, double vStar) {
    double tA = u >= v0 ? (u - v0) / kAMax : (v0 - u) / kAMin;
    double tB = vStar >= u ? (vStar - u) / kAMax : (u - vStar) / kAMin;
    return tA + tB;
}

double coveredOracle(double u, double T, double v0, double vStar) {
    double tA = u >= v0 ? (u - v0) / kAMax : (v0 - u) / kAMin;
    double tB = vStar >= u ? (vStar - u) / kAMax : (u - vStar) / kAMin;
    double tC = std::max(0.0, T - tA - tB);
    return 0.5 * (v0 + u) * tA + u * tC + 0.5 * (u + vStar) * tB;
}

}  // namespace

TEST_CASE("fastestArrival frozen values") {
    auto a = fastestArrival(50.0, 10.0, kVMax, kVMax, kAMax, kAMin);
    CHECK(a.time == doctest::Approx(3.6602540378443873).epsilon(1e-12));
    CHECK(a.speed == doctest::Approx(17.320508075688775).epsilon(1e-12));

    auto b = fastestArrival(30.0, 8.0, 6.275027, kVMax, kAMax, kAMin);
    CHECK(b.time == doctest::Approx(3.13573381974242).epsilon(1e-12));
    CHECK(b.speed == doctest::Approx(6.275027).epsilon(1e-12));

    // Long run with a vMax plateau.
    auto c = fastestArrival(120.0, 3.0, kVMax, kVMax, kAMax, kAMin);
    CHECK(c.time == doctest::Approx(9.648253968253968).epsilon(1e-12));
    CHECK(c.speed == doctest::Approx(kVMax).epsilon(1e-12));

    auto z = fastestArrival(0.0, 5.0, 10.0, kVMax, kAMax, kAMin);
    CHECK(z.time == 0.0);
    CHECK(z.speed == 5.0);
}

TEST_CASE("fastestArrival matches a greedy bang-bang integrator") {
    Pcg32 rng(2024, 1);
    int checked = 0;
    while (checked < 120) {
        double v0 = rng.uniform(0.0, kVMax);
        double cap = kVMax;
        switch (static_cast<int>(rng.uniform(0.0, 4.0))) {
            case 0: cap = 4.677139; break;
            case 1: cap = 6.275027; break;
            case 2: cap = rng.uniform(2.0, kVMax); break;
            default: break;
        }
        double d = rng.uniform(0.5, 120.0);
        if (v0 > cap && (v0 * v0 - cap * cap) / (2.0 * kAMin) > d - 0.05) continue;
        auto exact = fastestArrival(d, v0, cap, kVMax, kAMax, kAMin);
        auto ref = greedyArrival(d, v0, cap);
        CHECK(std::abs(exact.time - ref.time) < 0.01);
        CHECK(std::abs(exact.speed - ref.speed) < 0.01);
        checked++;
    }
}

TEST_CASE("fastestArrival throws when braking room is insufficient") {
    double v0 = kVMax, cap = 4.677139;
    double brake = (v0 * v0 - cap * cap) / (2.0 * kAMin);
    CHECK_THROWS_AS(fastestArrival(brake - 1.0, v0, cap, kVMax, kAMax, kAMin), std::logic_error);
    // Exactly enough room is fine.
    auto ok = fastestArrival(brake + 0.01, v0, cap, kVMax, kAMax, kAMin);
    CHECK(ok.speed == doctest::Approx(cap));
}

TEST_CASE("solveApproach profiles meet every kinematic requirement") {
    Pcg32 rng(4711, 2);
    int solved = 0, refused = 0;
    for (int it = 0; it < 1500; it++) {
        double v0 = rng.uniform(0.0, kVMax);
        double vStar = rng.uniform(0.0, kVMax);
        double d = rng.uniform(0.0, 70.0);
        double T = rng.uniform(0.0, 25.0);
        auto p = solveApproach(d, T, v0, vStar, kVMax, kAMax, kAMin);
        if (p) {
            solved++;
            REQUIRE(std::abs(p->position(0.0)) < 1e-12);
            REQUIRE(std::abs(p->speed(0.0) - v0) < 1e-9);
            REQUIRE(std::abs(p->position(T) - d) < 1e-6);
            REQUIRE(std::abs(p->speed(T) - vStar) < 1e-9);
            const int n = 400;
            for (int k = 0; k < n; k++) {
                double t0 = T * k / n, t1 = T * (k + 1) / n;
                REQUIRE(p->position(t1) - p->position(t0) >= -1e-9);
                double w0 = p->speed(t0), w1 = p->speed(t1);
                REQUIRE(w0 >= -1e-9);
                REQUIRE(w0 <= kVMax + 1e-6);
                if (t1 > t0) {
                    double a = (w1 - w0) / (t1 - t0);
                    REQUIRE(a <= kAMax + 1e-4);
                    REQUIRE(a >= -kAMin - 1e-4);
                }
            }
        } else {
            refused++;
            // Soundness of refusal: if feasible cruise speeds strictly
            // straddle the target distance, a solution must exist, so a
            // refusal in that situation would be a bug.
            bool below = false, above = false;
            for (int i = 0; i <= 4000; i++) {
                double u = kVMax * i / 4000.0;
                if (rampOracle(u, v0, vStar) > T) continue;
                double cov = coveredOracle(u, T, v0, vStar);
                if (cov <= d - 1e-5) below = true;
                if (cov >= d + 1e-5) above = true;
            }
            REQUIRE_FALSE((below && above));
        }
    }
    // Both branches must be exercised heavily for the suite to mean much.
    CHECK(solved > 300);
    CHECK(refused > 300);
}

TEST_CASE("solveApproach degenerate endpoints") {
    auto still = solveApproach(0.0, 0.0, 0.0, 0.0, kVMax, kAMax, kAMin);
    REQUIRE(still.has_value());
    CHECK(still->duration() == doctest::Approx(0.0));

    // Same start and end speed, exact cruise distance.
    auto cruise = solveApproach(30.0, 3.0, 10.0, 10.0, kVMax, kAMax, kAMin);
    REQUIRE(cruise.has_value());
    CHECK(cruise->position(1.5) == doctest::Approx(15.0).epsilon(1e-9));

    // Time too short even for the direct ramp.
    CHECK_FALSE(solveApproach(10.0, 0.5, 0.0, 15.0, kVMax, kAMax, kAMin).has_value());
    // Stopping dead in a long window cannot cover a long distance.
    CHECK_FALSE(solveApproach(60.0, 2.0, 1.0, 0.0, kVMax, kAMax, kAMin).has_value());
}

TEST_CASE("maxFeasibleEntrySpeed sits exactly on the feasibility boundary") {
    Pcg32 rng(99, 3);
    int interior = 0, atCap = 0, atZero = 0;
    for (int it = 0; it < 600; it++) {
        double v0 = rng.uniform(0.0, kVMax);
        double cap = kVMax;
        switch (static_cast<int>(rng.uniform(0.0, 3.0))) {
            case 0: cap = 4.677139; break;
            case 1: cap = 6.275027; break;
            default: break;
        }
        double d = rng.uniform(1.0, 55.0);
        if (v0 > cap && (v0 * v0 - cap * cap) / (2.0 * kAMin) > d - 0.05) continue;
        double tFast = fastestArrival(d, v0, cap, kVMax, kAMax, kAMin).time;
        double T = tFast + rng.uniform(0.0, 12.0);
        double vf = maxFeasibleEntrySpeed(d, T, v0, cap, kVMax, kAMax, kAMin);
        CHECK(vf >= 0.0);
        CHECK(vf <= cap + 1e-12);
        if (vf >= cap - 1e-12) {
            atCap++;
            CHECK(solveApproach(d, T, v0, cap, kVMax, kAMax, kAMin).has_value());
        } else if (vf <= 1e-9) {
            atZero++;
            CHECK_FALSE(solveApproach(d, T, v0, 0.0, kVMax, kAMax, kAMin).has_value());
        } else {
            interior++;
            CHECK(solveApproach(d, T, v0, vf * (1.0 - 1e-9), kVMax, kAMax, kAMin).has_value());
            CHECK_FALSE(
                solveApproach(d, T, v0, std::min(cap, vf + 1e-6), kVMax, kAMax, kAMin).has_value());
        }
    }
    CHECK(interior > 100);
    CHECK(atCap > 100);
    CHECK(atZero > 30);
}

TEST_CASE("safeFollowSpeed keeps the minimum gap under worst-case braking") {
    Pcg32 rng(7, 4);
    const double minGap = 2.0;
    double tightest = 1e9;
    for (int it = 0; it < 400; it++) {
        double v = rng.uniform(0.0, kVMax);
        double vLead = rng.uniform(0.0, kVMax);
        double need = minGap + std::max(0.0, (v * v - vLead * vLead) / (2.0 * kAMin)) + v * kH + 0.05;
        double gap = need + rng.uniform(0.0, 40.0);
        double sF = 0.0, sL = gap;
        for (int k = 0; k < 1500; k++) {
            double vn = std::min(v + kAMax * kH, safeFollowSpeed(sL - sF, v, vLead, kAMin, kH, minGap));
            vn = std::max(0.0, vn);
            double vln = std::max(0.0, vLead - kAMin * kH);  // leader slams the brakes
            sF += 0.5 * (v + vn) * kH;
            sL += 0.5 * (vLead + vln) * kH;
            v = vn;
            vLead = vln;
            double g = sL - sF;
            tightest = std::min(tightest, g);
            REQUIRE(g >= minGap - 1e-9);
            if (v == 0.0 && vLead == 0.0) break;
        }
    }
    // The bound is tight: the closed loop actually reaches the minimum gap.
    CHECK(tightest < minGap + 0.01);
}

TEST_CASE("stopBySpeed never crosses the line and converges to it") {
    Pcg32 rng(13, 5);
    for (int it = 0; it < 300; it++) {
        double dist = rng.uniform(0.5, 60.0);
        double v = rng.uniform(0.0, std::min(kVMax, std::sqrt(2.0 * kAMin * dist)));
        double s = 0.0;
        for (int k = 0; k < 2400; k++) {
            double vn = std::min({v + kAMax * kH, kVMax, stopBySpeed(dist - s, v, kAMin, kH)});
            vn = std::max(0.0, vn);
            s += 0.5 * (v + vn) * kH;
            v = vn;
            REQUIRE(s <= dist + 1e-9);
        }
        CHECK(dist - s <= 0.5);
        CHECK(v <= 0.05);
    }
}

TEST_CASE("headwayFollowSpeed satisfies its defining inequality with equality") {
    Pcg32 rng(21, 6);
    for (int it = 0; it < 200; it++) {
        double gap = rng.uniform(0.0, 50.0);
        double v = rng.uniform(0.0, kVMax);
        double vn = headwayFollowSpeed(gap, v, kH, 2.0, 1.0);
        REQUIRE(vn >= 0.0);
        if (vn > 0.0) {
            double after = gap - 0.5 * (v + vn) * kH;
            CHECK(after - 2.0 - 1.0 * vn == doctest::Approx(0.0).epsilon(1e-9).scale(1.0));
        } else {
            // Clamped: even a standstill move would leave less than desired.
            CHECK(gap - 0.5 * v * kH - 2.0 <= 1e-9);
        }
    }
}
