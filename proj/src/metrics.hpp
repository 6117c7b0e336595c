#ifndef DTOTSIM_METRICS_H
#define DTOTSIM_METRICS_H

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace dtotsim {

struct SeriesPoint {
    double t = 0.0;
    double value = 0.0;
};

// Fixed-width histogram over [0, inf); samples <= 0 land in a dedicated
// bucket so contact events are never hidden inside bin zero.
struct DistanceHistogram {
    double binWidth = 0.25;
    std::vector<std::uint64_t> counts;  // counts[i] covers [i*w, (i+1)*w)
    std::uint64_t nonPositive = 0;      // samples <= 0: touching or overlapping
    std::uint64_t total = 0;
    double minSample = 0.0;  // meaningful only when total > 0

    void add(double d);
};

struct MetricsReport {
    std::uint64_t generated = 0;
    std::uint64_t crossed = 0;
    double avgTripTime = 0.0;
    double tripTimeSd = 0.0;  // population standard deviation
    double throughput = 1.0;  // crossed / generated
    double effectiveAvgTripTime = 0.0;  // avgTripTime / throughput

    // Major = north/south roads, minor = east/west.
    std::uint64_t tripsMajor = 0, tripsMinor = 0;
    double avgTripMajor = 0.0, avgTripMinor = 0.0;

    double maxConfirmWait = 0.0;  // comm entry to (final) confirmation

    std::vector<SeriesPoint> flowRateRatio;  // generated/exited, 1 s cadence
    std::vector<SeriesPoint> waitingCount;
    DistanceHistogram distances;
};

// Raw measurement store for one run. The engine calls the record/sample
// methods; finalize computes every aggregate.
class MetricsCollector {
  public:
    // Trip time runs from communication-region entry to the first instant
    // the vehicle is fully outside the intersection region. Major-road trips
    // pass majorRoad = true; pass recordCommEntry first to arm the
    // confirmation-wait tracking.
    void recordCommEntry(std::uint64_t vin, double t);
    void recordConfirmation(std::uint64_t vin, double t);  // re-requests overwrite
    void recordTrip(std::uint64_t vin, double enterCommT, double exitT, bool majorRoad = true);

    void sampleWaiting(double t, int count);
    void sampleFlow(double t, std::uint64_t generated, std::uint64_t exited);
    void sampleDistance(double d) { histogram_.add(d); }

    std::uint64_t trips() const { return static_cast<std::uint64_t>(tripTimes_.size()); }

    // Throws std::invalid_argument when generated < crossed trips.
    MetricsReport finalize(std::uint64_t generated) const;

  private:
    std::vector<double> tripTimes_;
    std::vector<double> tripTimesMajor_, tripTimesMinor_;
    std::unordered_map<std::uint64_t, double> commEntry_;
    std::unordered_map<std::uint64_t, char> finalized_;
    double maxConfirmWait_ = 0.0;
    std::vector<SeriesPoint> flow_, waiting_;
    DistanceHistogram histogram_;
};

// Population mean/sd helpers shared with the report writers.
double meanOf(const std::vector<double> &xs);
double populationSd(const std::vector<double> &xs);

// CSV emission: header row then one row per entry.
void writeSeriesCsv(std::ostream &out, const std::string &valueName,
                    const std::vector<SeriesPoint> &series);
void writeHistogramCsv(std::ostream &out, const DistanceHistogram &hist);
void writeReportText(std::ostream &out, const MetricsReport &report);

}  // namespace dtotsim

#endif
