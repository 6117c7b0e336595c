#include "layout.hpp"

#include <cmath>
#include <stdexcept>

namespace dtotsim {

const char *approachName(Approach a) {
    switch (a) {
        case Approach::North: return "north";
        case Approach::East: return "east";
        case Approach::South: return "south";
        case Approach::West: return "west";
    }
    return "?";
}

const char *movementName(Movement m) {
    switch (m) {
        case Movement::Left: return "left";
        case Movement::Straight: return "straight";
        case Movement::Right: return "right";
    }
    return "?";
}

std::string Route::name() const {
    return std::string(approachName(approach)) + "-" + movementName(movement);
}

Pose Route::canonicalPose(double s) const {
    const double H = regionHalf_;
    if (arcDir_ == 0 || s <= 0.0)
        return {entryOffset_, -H + s, M_PI / 2.0};

    const double r = turnRadius;
    if (s < arcLength) {
        double phi = arcPhi0_ + arcDir_ * (s / r);
        return {arcCenter_.x + r * std::cos(phi), arcCenter_.y + r * std::sin(phi),
                M_PI / 2.0 + arcDir_ * (s / r)};
    }
    // Straight continuation on the exit lane.
    double phiEnd = arcPhi0_ + arcDir_ * (arcLength / r);
    double headEnd = M_PI / 2.0 + arcDir_ * (arcLength / r);
    Vec2 end{arcCenter_.x + r * std::cos(phiEnd), arcCenter_.y + r * std::sin(phiEnd)};
    double rest = s - arcLength;
    return {end.x + rest * std::cos(headEnd), end.y + rest * std::sin(headEnd), headEnd};
}

Pose Route::pose(double s) const {
    Pose c = canonicalPose(s);
    double cr = std::cos(rotation_), sr = std::sin(rotation_);
    return {c.x * cr - c.y * sr, c.x * sr + c.y * cr, normalizeAngle(c.theta + rotation_)};
}

double Route::clearanceLookup(const std::vector<double> &table, double s) const {
    if (table.empty()) return 0.0;
    double f = (s - sMin) / clearStep_;
    if (f <= 0.0) return table.front();
    if (f >= static_cast<double>(table.size() - 1)) return table.back();
    size_t i = static_cast<size_t>(f);
    double frac = f - static_cast<double>(i);
    return table[i] * (1.0 - frac) + table[i + 1] * frac;
}

double Route::clearanceBehind(double s) const { return clearanceLookup(clearBehind_, s); }
double Route::clearanceAhead(double s) const { return clearanceLookup(clearAhead_, s); }

Layout::Layout(const LayoutParams &params) : params_(params) {
    if (params_.laneWidth <= params_.envelopeWidth)
        throw std::invalid_argument("lane width must exceed the vehicle envelope width");
    if (params_.vMax <= 0 || params_.aMax <= 0 || params_.aMin <= 0 || params_.aLat <= 0)
        throw std::invalid_argument("speed and acceleration limits must be positive");
    double stopping = stoppingDistance();
    if (params_.commRegionLength < stopping)
        throw std::invalid_argument(
            "communication region (" + std::to_string(params_.commRegionLength) +
            " m) is shorter than the stopping distance " + std::to_string(stopping) +
            " m; a vehicle entering at full speed could not stop at the line");
    regionHalf_ = 3.0 * params_.laneWidth;
    buildRoutes();
    buildClearances();
    buildZones();
}

double Layout::stoppingDistance() const {
    return params_.vMax * params_.vMax / (2.0 * params_.aMin);
}

OrientedRect Layout::regionRect() const {
    return {{0.0, 0.0, 0.0}, 2.0 * regionHalf_, 2.0 * regionHalf_};
}

bool Layout::vehicleFullyOutside(const OrientedRect &rect) const {
    return !rectsOverlap(rect, regionRect());
}

void Layout::buildRoutes() {
    const double w = params_.laneWidth;
    const double H = regionHalf_;
    // Lateral offsets from the road axis, on the driver's side of the road.
    const double entryOffsets[3] = {0.5 * w, 1.5 * w, 2.5 * w};  // left, straight, right lane
    const double exitInner = 0.5 * w, exitOuter = 1.5 * w;

    // Rotation that carries the canonical south approach onto each approach.
    const double rotations[4] = {M_PI, M_PI / 2.0, 0.0, -M_PI / 2.0};  // N, E, S, W

    routes_.resize(12);
    for (int ai = 0; ai < 4; ai++) {
        for (int mi = 0; mi < 3; mi++) {
            Route &r = routes_[ai * 3 + mi];
            r.id = ai * 3 + mi;
            r.approach = static_cast<Approach>(ai);
            r.movement = static_cast<Movement>(mi);
            r.entryLane = r.id;  // one movement per incoming lane
            r.rotation_ = rotations[ai];
            r.regionHalf_ = H;
            r.entryOffset_ = entryOffsets[mi];

            // Exit arm and lane. Arm indices follow Approach numbering; the
            // exit lane id is arm * 2 + (0 inner, 1 outer).
            auto armOf = [](Approach a, int turn) {
                // turn: -1 left, 0 straight, +1 right relative to travel.
                // Exit arm as seen from the approach: straight = opposite arm.
                int idx = static_cast<int>(a);
                if (turn == 0) return (idx + 2) % 4;
                // Approaches are numbered clockwise, so e.g. south -> west for
                // a left turn is one step clockwise from the approach arm.
                if (turn < 0) return (idx + 1) % 4;
                return (idx + 3) % 4;
            };

            switch (r.movement) {
                case Movement::Straight: {
                    r.arcDir_ = 0;
                    r.turnRadius = 0.0;
                    r.arcLength = 0.0;
                    r.vTurn = params_.vMax;
                    r.exitOffset_ = r.entryOffset_;
                    r.totalLength = 2.0 * H;
                    r.exitLane = armOf(r.approach, 0) * 2 + 1;  // outer lane
                    break;
                }
                case Movement::Left: {
                    r.arcDir_ = +1;
                    r.exitOffset_ = exitOuter;
                    r.turnRadius = H + r.exitOffset_;
                    r.arcLength = r.turnRadius * M_PI / 2.0;
                    r.arcCenter_ = {r.entryOffset_ - r.turnRadius, -H};
                    r.arcPhi0_ = 0.0;
                    r.vTurn = std::min(params_.vMax, std::sqrt(params_.aLat * r.turnRadius));
                    r.totalLength =
                        r.turnRadius * std::acos((r.exitOffset_ - r.entryOffset_) / r.turnRadius);
                    r.exitLane = armOf(r.approach, -1) * 2 + 1;
                    break;
                }
                case Movement::Right: {
                    r.arcDir_ = -1;
                    r.exitOffset_ = exitInner;
                    r.turnRadius = H - r.exitOffset_;
                    r.arcLength = r.turnRadius * M_PI / 2.0;
                    r.arcCenter_ = {r.entryOffset_ + r.turnRadius, -H};
                    r.arcPhi0_ = M_PI;
                    r.vTurn = std::min(params_.vMax, std::sqrt(params_.aLat * r.turnRadius));
                    r.totalLength =
                        r.turnRadius * (M_PI - std::acos((H - r.entryOffset_) / r.turnRadius - 1.0));
                    r.exitLane = armOf(r.approach, +1) * 2 + 0;
                    break;
                }
            }

            r.sMin = -(params_.envelopeLength + 1.0);
            r.sMax = r.totalLength + 12.0;

            r.centerline_.clear();
            for (double s = r.sMin; s <= r.sMax + 1e-9; s += 0.1)
                r.centerline_.push_back(r.pose(s).position());

            maxRouteLength_ = std::max(maxRouteLength_, r.totalLength);
        }
    }
}

void Layout::buildClearances() {
    const double envL = params_.envelopeLength, envW = params_.envelopeWidth;
    for (Route &r : routes_) {
        auto clearAt = [&](double s, double dir) {
            OrientedRect base{r.pose(s), envL, envW};
            double lo = 0.5 * envL;
            double hi = envL + 3.0;
            while (rectsOverlap(base, {r.pose(s + dir * hi), envL, envW}) && hi < envL + 12.0)
                hi += 2.0;
            for (int it = 0; it < 30; it++) {
                double mid = 0.5 * (lo + hi);
                if (rectsOverlap(base, {r.pose(s + dir * mid), envL, envW}))
                    lo = mid;
                else
                    hi = mid;
            }
            return hi;
        };
        r.clearBehind_.clear();
        r.clearAhead_.clear();
        for (double s = r.sMin; s <= r.sMax + 1e-9; s += r.clearStep_) {
            r.clearBehind_.push_back(clearAt(s, -1.0));
            r.clearAhead_.push_back(clearAt(s, +1.0));
        }
    }
}

void Layout::buildZones() {
    const int n = static_cast<int>(routes_.size());
    compatible_.assign(n * n, true);
    windows_.assign(n * n, Interval{0.0, 0.0});

    const double fine = params_.zoneSampleStep;
    const double coarse = 1.0;
    const double buf = params_.zoneBuffer;
    const double envL = params_.envelopeLength, envW = params_.envelopeWidth;
    // Beyond this center distance two envelope rectangles cannot touch.
    const double reject = std::sqrt(envL * envL + envW * envW) + 10.0 * kGeomEps;

    // A coarse pass brackets the contact region, then a fine pass restores
    // zoneSampleStep resolution. Contact islands extend at least a vehicle
    // length along each route, so the coarse pass cannot skip one entirely.
    struct Sweep {
        std::vector<double> s;
        std::vector<OrientedRect> rect;
    };
    std::vector<Sweep> sweeps(n);
    for (int i = 0; i < n; i++) {
        const Route &r = routes_[i];
        for (double s = r.sMin; s <= r.sMax + 1e-9; s += coarse) {
            sweeps[i].s.push_back(s);
            sweeps[i].rect.push_back({r.pose(s), envL, envW});
        }
    }

    for (int a = 0; a < n; a++) {
        for (int b = a; b < n; b++) {
            if (a == b) {
                // A route always conflicts with itself over its whole domain.
                compatible_[a * n + a] = false;
                windows_[a * n + a] = {routes_[a].sMin, routes_[a].sMax};
                continue;
            }
            const Route &ra = routes_[a], &rb = routes_[b];
            double loA = 1e18, hiA = -1e18, loB = 1e18, hiB = -1e18;
            bool touched = false;
            const Sweep &sa = sweeps[a], &sb = sweeps[b];
            for (size_t i = 0; i < sa.s.size(); i++) {
                const Vec2 pa = sa.rect[i].center.position();
                for (size_t j = 0; j < sb.s.size(); j++) {
                    if ((sb.rect[j].center.position() - pa).norm() > reject) continue;
                    if (!rectsOverlap(sa.rect[i], sb.rect[j])) continue;
                    touched = true;
                    loA = std::min(loA, sa.s[i]);
                    hiA = std::max(hiA, sa.s[i]);
                    loB = std::min(loB, sb.s[j]);
                    hiB = std::max(hiB, sb.s[j]);
                }
            }
            compatible_[a * n + b] = compatible_[b * n + a] = !touched;
            if (!touched) continue;

            double fLoA = 1e18, fHiA = -1e18, fLoB = 1e18, fHiB = -1e18;
            double a0 = std::max(ra.sMin, loA - coarse), a1 = std::min(ra.sMax, hiA + coarse);
            double b0 = std::max(rb.sMin, loB - coarse), b1 = std::min(rb.sMax, hiB + coarse);
            for (double si = a0; si <= a1 + 1e-9; si += fine) {
                OrientedRect rca{ra.pose(si), envL, envW};
                const Vec2 pa = rca.center.position();
                for (double sj = b0; sj <= b1 + 1e-9; sj += fine) {
                    OrientedRect rcb{rb.pose(sj), envL, envW};
                    if ((rcb.center.position() - pa).norm() > reject) continue;
                    if (!rectsOverlap(rca, rcb)) continue;
                    fLoA = std::min(fLoA, si);
                    fHiA = std::max(fHiA, si);
                    fLoB = std::min(fLoB, sj);
                    fHiB = std::max(fHiB, sj);
                }
            }
            if (fHiA < fLoA) {  // fine grid grazed past a marginal coarse hit
                fLoA = loA, fHiA = hiA, fLoB = loB, fHiB = hiB;
            }
            windows_[a * n + b] = {std::max(ra.sMin, fLoA - buf), std::min(ra.sMax, fHiA + buf)};
            windows_[b * n + a] = {std::max(rb.sMin, fLoB - buf), std::min(rb.sMax, fHiB + buf)};
        }
    }
}

bool Layout::routesCompatible(int a, int b) const {
    if (a < 0 || b < 0 || a >= static_cast<int>(routes_.size()) || b >= static_cast<int>(routes_.size()))
        throw std::invalid_argument("unknown route id");
    return compatible_[a * routes_.size() + b];
}

Interval Layout::conflictWindow(int a, int b) const {
    if (routesCompatible(a, b))
        throw std::invalid_argument("conflict window queried for compatible routes");
    return windows_[a * routes_.size() + b];
}

}  // namespace dtotsim
