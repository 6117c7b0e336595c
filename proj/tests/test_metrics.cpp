#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "metrics.hpp"

using namespace dtotsim;

TEST_CASE("trip statistics use the population standard deviation") {
    MetricsCollector m;
    m.recordCommEntry(1, 0.0);
    m.recordCommEntry(2, 1.0);
    m.recordTrip(1, 0.0, 6.0, true);   // trip 6
    m.recordTrip(2, 1.0, 9.0, false);  // trip 8
    MetricsReport r = m.finalize(2);
    CHECK(r.crossed == 2);
    CHECK(r.avgTripTime == doctest::Approx(7.0));
    CHECK(r.tripTimeSd == doctest::Approx(1.0));
    CHECK(r.tripsMajor == 1);
    CHECK(r.tripsMinor == 1);
    CHECK(r.avgTripMajor == doctest::Approx(6.0));
    CHECK(r.avgTripMinor == doctest::Approx(8.0));
}

TEST_CASE("throughput and effective trip time") {
    MetricsCollector m;
    m.recordTrip(5, 0.0, 10.0, true);
    MetricsReport r = m.finalize(4);  // 4 generated, 1 crossed
    CHECK(r.generated == 4);
    CHECK(r.throughput == doctest::Approx(0.25));
    CHECK(r.avgTripTime == doctest::Approx(10.0));
    CHECK(r.effectiveAvgTripTime == doctest::Approx(40.0));
    // Identity: effective * throughput == average.
    CHECK(r.effectiveAvgTripTime * r.throughput == doctest::Approx(r.avgTripTime));
}

TEST_CASE("empty world finalizes cleanly") {
    MetricsCollector m;
    MetricsReport r = m.finalize(0);
    CHECK(r.generated == 0);
    CHECK(r.crossed == 0);
    CHECK(r.throughput == 1.0);
    CHECK(r.avgTripTime == 0.0);
}

TEST_CASE("bookkeeping rejections") {
    MetricsCollector m;
    m.recordTrip(1, 0.0, 5.0, true);
    CHECK_THROWS_AS(m.recordTrip(1, 1.0, 7.0, true), std::logic_error);   // duplicate vin
    CHECK_THROWS_AS(m.recordTrip(2, 5.0, 5.0, true), std::logic_error);   // exit <= entry
    CHECK_THROWS_AS(m.recordTrip(3, 9.0, 2.0, false), std::logic_error);  // exit <= entry
    CHECK_THROWS_AS(m.finalize(0), std::logic_error);  // fewer generated than finished
}

TEST_CASE("confirmation wait tracking") {
    MetricsCollector m;
    m.recordCommEntry(7, 10.0);
    m.recordCommEntry(8, 12.0);
    m.recordConfirmation(7, 25.0);
    m.recordConfirmation(8, 14.5);
    m.recordConfirmation(7, 26.0);  // re-request later in the approach
    MetricsReport r = m.finalize(2);
    CHECK(r.maxConfirmWait == doctest::Approx(16.0));
    MetricsCollector bad;
    CHECK_THROWS_AS(bad.recordConfirmation(1, 3.0), std::logic_error);
}

TEST_CASE("flow rate ratio guards an empty denominator") {
    MetricsCollector m;
    m.sampleFlow(1.0, 4, 0);
    m.sampleFlow(2.0, 6, 3);
    m.sampleFlow(3.0, 6, 6);
    MetricsReport r = m.finalize(6);
    REQUIRE(r.flowRateRatio.size() == 3);
    CHECK(r.flowRateRatio[0].value == 1.0);  // nothing out yet
    CHECK(r.flowRateRatio[1].value == doctest::Approx(2.0));
    CHECK(r.flowRateRatio[2].value == doctest::Approx(1.0));
}

TEST_CASE("distance histogram bins, non-positive bucket and minimum") {
    MetricsCollector m;
    m.sampleDistance(0.10);   // bin 0
    m.sampleDistance(0.26);   // bin 1
    m.sampleDistance(0.25);   // exactly on the edge goes up
    m.sampleDistance(3.9);    // bin 15
    m.sampleDistance(0.0);    // non-positive
    m.sampleDistance(-0.5);   // non-positive
    MetricsReport r = m.finalize(0);
    const DistanceHistogram &h = r.distances;
    CHECK(h.total == 6);
    CHECK(h.nonPositive == 2);
    CHECK(h.minSample == doctest::Approx(-0.5));
    REQUIRE(h.counts.size() == 16);
    CHECK(h.counts.at(0) == 1);
    CHECK(h.counts.at(1) == 2);
    CHECK(h.counts.at(15) == 1);
    CHECK(h.counts.at(7) == 0);
}

TEST_CASE("csv writers emit stable layouts") {
    std::vector<SeriesPoint> pts{{0.0, 3.0}, {1.0, 4.5}};
    std::ostringstream s;
    writeSeriesCsv(s, "waiting", pts);
    CHECK(s.str() == "t,waiting\n0,3\n1,4.5\n");

    MetricsCollector m;
    m.sampleDistance(0.1);
    m.sampleDistance(-0.2);
    MetricsReport r = m.finalize(0);
    std::ostringstream hcsv;
    writeHistogramCsv(hcsv, r.distances);
    CHECK(hcsv.str() ==
          "bin_lo,bin_hi,count\n"
          "-inf,0,1\n"
          "0,0.25,1\n");
}

TEST_CASE("report text names every headline number") {
    MetricsCollector m;
    m.recordCommEntry(1, 0.0);
    m.recordTrip(1, 0.0, 8.0, true);
    MetricsReport r = m.finalize(2);
    std::ostringstream out;
    writeReportText(out, r);
    std::string text = out.str();
    CHECK(text.find("generated") != std::string::npos);
    CHECK(text.find("crossed") != std::string::npos);
    CHECK(text.find("throughput") != std::string::npos);
    CHECK(text.find("avg trip time") != std::string::npos);
    CHECK(text.find("effective avg trip") != std::string::npos);
    CHECK(text.find("max confirm wait") != std::string::npos);
}

TEST_CASE("waiting series is captured verbatim") {
    MetricsCollector m;
    m.sampleWaiting(0.0, 0);
    m.sampleWaiting(1.0, 3);
    m.sampleWaiting(2.0, 2);
    MetricsReport r = m.finalize(0);
    REQUIRE(r.waitingCount.size() == 3);
    CHECK(r.waitingCount[1].t == 1.0);
    CHECK(r.waitingCount[1].value == 3.0);
}
