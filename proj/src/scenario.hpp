#ifndef DTOTSIM_SCENARIO_H
#define DTOTSIM_SCENARIO_H

#include <cstdint>
#include <iosfwd>
#include <string>

namespace dtotsim {

enum class SimMode { kBaseline, kEnhanced, kTrafficLight };

const char *modeName(SimMode mode);
SimMode parseMode(const std::string &name);

// Everything a run needs beyond the layout. Defaults reproduce the balanced
// 10-minute scenario at volume 300.
struct ScenarioConfig {
    SimMode mode = SimMode::kEnhanced;
    double h = 0.05;                // s, sampling/integration step
    double durationSeconds = 600.0;
    int vehicleTarget = 0;          // when > 0: stop spawning after this many
                                    // vehicles and run until the world drains
    int volume = 300;               // veh / 10 min label; see spawnProbability
    std::uint64_t seed = 12;
    bool unbalanced = false;        // east/west demand at 30% of north/south
    double spawnScale = 1.0;        // multiplier on the table probability
    double pLeft = 0.2;
    double pStraight = 0.6;
    double pRight = 0.2;
    double speedFracLo = 0.4;       // initial speed range, fraction of vMax
    double speedFracHi = 1.0;
    std::string tracePath;          // empty: no event trace

    void validate() const;  // throws std::invalid_argument on bad values
};

// Per-second Bernoulli spawn probability for the five calibrated demand
// levels (veh / 10 min): 100, 200, 300, 400, 500. Throws on other labels.
double spawnProbability(int volume);

// key = value lines, one per key; '#' starts a comment; blank lines ignored.
// Keys match the field names in snake_case (mode, h, duration_seconds,
// vehicle_target, volume, seed, unbalanced, spawn_scale, p_left, p_straight,
// p_right, speed_frac_lo, speed_frac_hi, trace_path). Unknown keys throw.
ScenarioConfig parseConfig(std::istream &in);
ScenarioConfig loadConfigFile(const std::string &path);

}  // namespace dtotsim

#endif
