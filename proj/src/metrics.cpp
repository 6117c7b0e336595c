#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace dtotsim {

void DistanceHistogram::add(double d) {
    total++;
    if (total == 1 || d < minSample) minSample = d;
    if (d <= 0.0) {
        nonPositive++;
        return;
    }
    size_t bin = static_cast<size_t>(d / binWidth);
    if (counts.size() <= bin) counts.resize(bin + 1, 0);
    counts[bin]++;
}

void MetricsCollector::recordCommEntry(std::uint64_t vin, double t) {
    commEntry_.emplace(vin, t);  // keep the first entry time
}

void MetricsCollector::recordConfirmation(std::uint64_t vin, double t) {
    auto it = commEntry_.find(vin);
    if (it == commEntry_.end())
        throw std::invalid_argument("confirmation recorded before communication entry");
    maxConfirmWait_ = std::max(maxConfirmWait_, t - it->second);
}

void MetricsCollector::recordTrip(std::uint64_t vin, double enterCommT, double exitT,
                                  bool majorRoad) {
    if (exitT <= enterCommT) throw std::invalid_argument("trip must end after it starts");
    if (!finalized_.emplace(vin, 1).second)
        throw std::invalid_argument("trip finalized twice for one vehicle");
    double trip = exitT - enterCommT;
    tripTimes_.push_back(trip);
    (majorRoad ? tripTimesMajor_ : tripTimesMinor_).push_back(trip);
}

void MetricsCollector::sampleWaiting(double t, int count) {
    waiting_.push_back({t, static_cast<double>(count)});
}

void MetricsCollector::sampleFlow(double t, std::uint64_t generated, std::uint64_t exited) {
    // generated/exited read literally, guarded to 1 before anything exits
    double ratio = exited == 0 ? 1.0 : static_cast<double>(generated) / static_cast<double>(exited);
    flow_.push_back({t, ratio});
}

double meanOf(const std::vector<double> &xs) {
    if (xs.empty()) return 0.0;
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double populationSd(const std::vector<double> &xs) {
    if (xs.empty()) return 0.0;
    double mu = meanOf(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - mu) * (x - mu);
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

MetricsReport MetricsCollector::finalize(std::uint64_t generated) const {
    if (generated < trips())
        throw std::invalid_argument("fewer vehicles generated than finished trips");

    MetricsReport r;
    r.generated = generated;
    r.crossed = trips();
    r.avgTripTime = meanOf(tripTimes_);
    r.tripTimeSd = populationSd(tripTimes_);
    r.throughput = generated == 0 ? 1.0
                                  : static_cast<double>(r.crossed) / static_cast<double>(generated);
    r.effectiveAvgTripTime = r.throughput > 0.0 ? r.avgTripTime / r.throughput : r.avgTripTime;

    r.tripsMajor = tripTimesMajor_.size();
    r.tripsMinor = tripTimesMinor_.size();
    r.avgTripMajor = meanOf(tripTimesMajor_);
    r.avgTripMinor = meanOf(tripTimesMinor_);

    r.maxConfirmWait = maxConfirmWait_;
    r.flowRateRatio = flow_;
    r.waitingCount = waiting_;
    r.distances = histogram_;
    return r;
}

void writeSeriesCsv(std::ostream &out, const std::string &valueName,
                    const std::vector<SeriesPoint> &series) {
    out << "t," << valueName << "\n";
    for (const SeriesPoint &p : series) out << p.t << "," << p.value << "\n";
}

void writeHistogramCsv(std::ostream &out, const DistanceHistogram &hist) {
    out << "bin_lo,bin_hi,count\n";
    if (hist.nonPositive > 0) out << "-inf,0," << hist.nonPositive << "\n";
    for (size_t i = 0; i < hist.counts.size(); i++) {
        if (hist.counts[i] == 0) continue;
        out << i * hist.binWidth << "," << (i + 1) * hist.binWidth << "," << hist.counts[i] << "\n";
    }
}

void writeReportText(std::ostream &out, const MetricsReport &r) {
    out << "generated:                 " << r.generated << "\n";
    out << "crossed:                   " << r.crossed << "\n";
    out << "throughput:                " << r.throughput << "\n";
    out << "avg trip time (s):         " << r.avgTripTime << "\n";
    out << "trip time sd (s, pop.):    " << r.tripTimeSd << "\n";
    out << "effective avg trip (s):    " << r.effectiveAvgTripTime << "\n";
    out << "major trips / avg (s):     " << r.tripsMajor << " / " << r.avgTripMajor << "\n";
    out << "minor trips / avg (s):     " << r.tripsMinor << " / " << r.avgTripMinor << "\n";
    out << "max confirm wait (s):      " << r.maxConfirmWait << "\n";
    if (r.distances.total > 0) {
        out << "distance samples:          " << r.distances.total << "\n";
        out << "min distance sample (m):   " << r.distances.minSample << "\n";
        out << "samples <= 0 m:            " << r.distances.nonPositive << "\n";
    }
}

}  // namespace dtotsim
