#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <stdexcept>

namespace dtotsim {

const char *modeName(SimMode mode) {
    switch (mode) {
        case SimMode::kBaseline: return "baseline";
        case SimMode::kEnhanced: return "enhanced";
        case SimMode::kTrafficLight: return "tlight";
    }
    return "?";
}

SimMode parseMode(const std::string &name) {
    if (name == "baseline") return SimMode::kBaseline;
    if (name == "enhanced") return SimMode::kEnhanced;
    if (name == "tlight" || name == "traffic_light") return SimMode::kTrafficLight;
    throw std::invalid_argument("unknown mode '" + name + "' (baseline|enhanced|tlight)");
}

double spawnProbability(int volume) {
    switch (volume) {
        case 100: return 0.03;
        case 200: return 0.06;
        case 300: return 0.08;
        case 400: return 0.11;
        case 500: return 0.14;
    }
    throw std::invalid_argument("volume must be one of 100, 200, 300, 400, 500");
}

void ScenarioConfig::validate() const {
    if (h <= 0.0) throw std::invalid_argument("h must be positive");
    if (durationSeconds <= 0.0 && vehicleTarget <= 0)
        throw std::invalid_argument("need a positive duration or a vehicle target");
    if (vehicleTarget < 0) throw std::invalid_argument("vehicle_target must be nonnegative");
    spawnProbability(volume);  // throws on unknown labels
    if (spawnScale <= 0.0) throw std::invalid_argument("spawn_scale must be positive");
    if (pLeft < 0.0 || pStraight < 0.0 || pRight < 0.0 ||
        std::abs(pLeft + pStraight + pRight - 1.0) > 1e-9)
        throw std::invalid_argument("route probabilities must be nonnegative and sum to 1");
    if (spawnProbability(volume) * spawnScale > 1.0)
        throw std::invalid_argument("scaled spawn probability exceeds 1");
    if (speedFracLo < 0.0 || speedFracHi > 1.0 || speedFracLo > speedFracHi)
        throw std::invalid_argument("speed fractions must satisfy 0 <= lo <= hi <= 1");
}

namespace {

std::string trim(const std::string &s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parseBool(const std::string &v, int lineNo) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("line " + std::to_string(lineNo) + ": expected a boolean, got '" + v + "'");
}

double parseDouble(const std::string &v, int lineNo) {
    try {
        size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception &) {
        throw std::invalid_argument("line " + std::to_string(lineNo) + ": expected a number, got '" + v + "'");
    }
}

long long parseInt(const std::string &v, int lineNo) {
    try {
        size_t used = 0;
        long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception &) {
        throw std::invalid_argument("line " + std::to_string(lineNo) + ": expected an integer, got '" + v + "'");
    }
}

}  // namespace

ScenarioConfig parseConfig(std::istream &in) {
    ScenarioConfig cfg;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        lineNo++;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(lineNo) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("line " + std::to_string(lineNo) + ": empty key or value");

        if (key == "mode")
            cfg.mode = parseMode(value);
        else if (key == "h")
            cfg.h = parseDouble(value, lineNo);
        else if (key == "duration_seconds")
            cfg.durationSeconds = parseDouble(value, lineNo);
        else if (key == "vehicle_target")
            cfg.vehicleTarget = static_cast<int>(parseInt(value, lineNo));
        else if (key == "volume")
            cfg.volume = static_cast<int>(parseInt(value, lineNo));
        else if (key == "seed")
            cfg.seed = static_cast<std::uint64_t>(parseInt(value, lineNo));
        else if (key == "unbalanced")
            cfg.unbalanced = parseBool(value, lineNo);
        else if (key == "spawn_scale")
            cfg.spawnScale = parseDouble(value, lineNo);
        else if (key == "p_left")
            cfg.pLeft = parseDouble(value, lineNo);
        else if (key == "p_straight")
            cfg.pStraight = parseDouble(value, lineNo);
        else if (key == "p_right")
            cfg.pRight = parseDouble(value, lineNo);
        else if (key == "speed_frac_lo")
            cfg.speedFracLo = parseDouble(value, lineNo);
        else if (key == "speed_frac_hi")
            cfg.speedFracHi = parseDouble(value, lineNo);
        else if (key == "trace_path")
            cfg.tracePath = value;
        else
            throw std::invalid_argument("line " + std::to_string(lineNo) + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig loadConfigFile(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    return parseConfig(in);
}

}  // namespace dtotsim
