#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "aerostack/data_model.hpp"
#include "oracles.hpp"
#include "scratch.hpp"

using namespace aerostack;

namespace {

Instant at(const char* text) { return *parse_instant(text); }

SensorReading reading(const char* ts, double pm25, const std::string& sensor = "S1") {
    SensorReading r;
    r.timestamp = at(ts);
    r.sensor_id = sensor;
    r.building_id = "B1";
    r.lat = -35.3;
    r.lon = 149.1;
    r.pm25 = pm25;
    return r;
}

constexpr const char* kTwoRows =
    "timestamp,sensor_id,building_id,lat,lon,pm25,pm10,tvoc,temp_c,rh_pct\n"
    "2020-03-16T14:00:00Z,S1,B1,-35.3,149.1,3.5,6.25,120,21.5,45\n"
    "2020-03-16T14:20:00Z,S1,B1,-35.3,149.1,4,7,130,21.75,46.5\n";

}  // namespace

TEST(Timestamps, ParsesStrictUtcForm) {
    EXPECT_TRUE(parse_instant("2020-03-16T14:00:00Z"));
    EXPECT_FALSE(parse_instant("2020-03-16 14:00:00"));
    EXPECT_FALSE(parse_instant("2020-02-30T00:00:00Z"));
    EXPECT_FALSE(parse_instant("2020-03-16T24:00:00Z"));
    EXPECT_EQ(format_instant(at("2020-03-16T14:05:09Z")), "2020-03-16T14:05:09Z");
}

TEST(ParseIndoor, TwoWellFormedRows) {
    const auto rows = parse_indoor_csv(scratch::write("two_rows.csv", kTwoRows));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].timestamp, at("2020-03-16T14:00:00Z"));
    EXPECT_EQ(rows[0].sensor_id, "S1");
    EXPECT_EQ(rows[0].building_id, "B1");
    EXPECT_EQ(*rows[0].lat, -35.3);
    EXPECT_EQ(*rows[0].lon, 149.1);
    EXPECT_EQ(*rows[0].pm25, 3.5);
    EXPECT_EQ(*rows[0].pm10, 6.25);
    EXPECT_EQ(*rows[0].tvoc, 120);
    EXPECT_EQ(*rows[0].temp_c, 21.5);
    EXPECT_EQ(*rows[0].rh_pct, 45);
    EXPECT_EQ(rows[1].timestamp, at("2020-03-16T14:20:00Z"));
    EXPECT_EQ(*rows[1].rh_pct, 46.5);
}

TEST(ParseIndoor, HeaderOnlyGivesEmptyList) {
    const auto rows = parse_indoor_csv(scratch::write("header_only.csv", std::string(kIndoorHeader) + "\n"));
    EXPECT_TRUE(rows.empty());
}

TEST(ParseIndoor, NaCellIsMissing) {
    const auto path = scratch::write("na.csv", std::string(kIndoorHeader) +
                                                   "\n2020-03-16T14:00:00Z,S1,B1,-35.3,149.1,na,6,120,21,45\n");
    const auto rows = parse_indoor_csv(path);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_FALSE(rows[0].pm25);
    EXPECT_TRUE(rows[0].pm10 && rows[0].tvoc && rows[0].temp_c && rows[0].rh_pct && rows[0].lat && rows[0].lon);
}

TEST(ParseIndoor, UnparsableAndOutOfRangeCellsAreMissing) {
    const auto path = scratch::write("junk.csv", std::string(kIndoorHeader) +
                                                     "\n2020-03-16T14:00:00Z,S1,B1,-95,149.1,abc,-1,,21,101\n");
    const auto rows = parse_indoor_csv(path);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_FALSE(rows[0].lat);
    EXPECT_FALSE(rows[0].pm25);
    EXPECT_FALSE(rows[0].pm10);
    EXPECT_FALSE(rows[0].tvoc);
    EXPECT_FALSE(rows[0].rh_pct);
    EXPECT_EQ(*rows[0].temp_c, 21);
}

TEST(ParseIndoor, Errors) {
    try {
        parse_indoor_csv(scratch::dir() / "does_not_exist.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingFile);
    }
    try {
        parse_indoor_csv(scratch::write("short_header.csv", "timestamp,sensor_id,pm25\n"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SchemaMismatch);
        EXPECT_NE(std::string(e.what()).find("building_id"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("rh_pct"), std::string::npos);
    }
    try {
        parse_indoor_csv(scratch::write("bad_ts.csv", std::string(kIndoorHeader) +
                                                          "\n2020-03-16T14:00:00Z,S1,B1,1,1,1,1,1,1,1"
                                                          "\n16/03/2020 15:00,S1,B1,1,1,1,1,1,1,1\n"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BadTimestamp);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(ParseIndoor, ColumnsInAnyOrder) {
    const auto path = scratch::write(
        "reordered.csv",
        "pm25,timestamp,extra,sensor_id,building_id,lat,lon,pm10,tvoc,temp_c,rh_pct\n"
        "2.5,2020-03-16T14:00:00Z,zzz,S9,B2,1,2,3,4,5,6\n");
    const auto rows = parse_indoor_csv(path);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(*rows[0].pm25, 2.5);
    EXPECT_EQ(rows[0].sensor_id, "S9");
    EXPECT_EQ(*rows[0].rh_pct, 6);
}

TEST(ParseOutdoor, RequiresHourAlignment) {
    const auto ok = scratch::write("out_ok.csv", std::string(kOutdoorHeader) +
                                                     "\n2020-03-16T14:00:00Z,B1,8,20,10,3,101000,200,0\n");
    const auto rows = parse_outdoor_csv(ok);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(*rows[0].pm25_out, 8);
    EXPECT_EQ(*rows[0].sp_pa, 101000);
    const auto bad = scratch::write("out_bad.csv", std::string(kOutdoorHeader) +
                                                       "\n2020-03-16T14:30:00Z,B1,8,20,10,3,101000,200,0\n");
    try {
        parse_outdoor_csv(bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BadTimestamp);
    }
}

TEST(HourlyAggregate, MeanWithinHour) {
    const std::vector<SensorReading> r = {reading("2020-01-01T10:05:00Z", 5.0), reading("2020-01-01T10:45:00Z", 7.0)};
    const auto h = hourly_aggregate(r);
    ASSERT_EQ(h.size(), 1u);
    EXPECT_EQ(h[0].timestamp, at("2020-01-01T10:00:00Z"));
    EXPECT_EQ(*h[0][Field::pm25], 6.0);
}

TEST(HourlyAggregate, GapsPreserved) {
    const std::vector<SensorReading> r = {reading("2020-01-01T10:05:00Z", 5.0), reading("2020-01-01T12:10:00Z", 7.0)};
    const auto h = hourly_aggregate(r);
    ASSERT_EQ(h.size(), 2u);
    EXPECT_EQ(h[0].timestamp, at("2020-01-01T10:00:00Z"));
    EXPECT_EQ(h[1].timestamp, at("2020-01-01T12:00:00Z"));
}

TEST(HourlyAggregate, ThreeReadingMean) {
    const std::vector<SensorReading> r = {reading("2020-01-01T10:00:00Z", 1.0), reading("2020-01-01T10:20:00Z", 2.0),
                                          reading("2020-01-01T10:40:00Z", 4.0)};
    const auto h = hourly_aggregate(r);
    ASSERT_EQ(h.size(), 1u);
    EXPECT_NEAR(*h[0][Field::pm25], 7.0 / 3.0, 1e-15);
}

TEST(HourlyAggregate, MissingValuesSkippedPerField) {
    auto a = reading("2020-01-01T10:00:00Z", 1.0);
    auto b = reading("2020-01-01T10:30:00Z", 3.0);
    a.pm10 = 10.0;
    const std::vector<SensorReading> r = {a, b};
    const auto h = hourly_aggregate(r);
    EXPECT_EQ(*h[0][Field::pm10], 10.0);
    EXPECT_FALSE(h[0][Field::tvoc]);
}

TEST(HourlyAggregate, MixedSensorsRejected) {
    const std::vector<SensorReading> r = {reading("2020-01-01T10:00:00Z", 1.0, "S1"),
                                          reading("2020-01-01T11:00:00Z", 1.0, "S2")};
    try {
        hourly_aggregate(r);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MixedSensors);
    }
}

TEST(HourlyAggregate, PropertySortedAndAligned) {
    oracle::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<SensorReading> r;
        const int n = oracle::uniform_int(rng, 1, 200);
        const Instant t0 = at("2021-06-01T00:00:00Z");
        for (int i = 0; i < n; ++i) {
            SensorReading s = reading("2021-06-01T00:00:00Z", oracle::uniform(rng, 0, 50));
            s.timestamp = t0 + std::chrono::seconds{oracle::uniform_int(rng, 0, 72 * 3600)};
            r.push_back(s);
        }
        const auto h = hourly_aggregate(r);
        for (std::size_t i = 0; i < h.size(); ++i) {
            EXPECT_TRUE(is_hour_aligned(h[i].timestamp));
            if (i > 0) {
                EXPECT_LT(h[i - 1].timestamp, h[i].timestamp);
            }
        }
    }
}

TEST(JoinHourly, MatchedAndUnmatched) {
    std::vector<SensorReading> r;
    for (const char* ts : {"2020-01-01T00:00:00Z", "2020-01-01T01:00:00Z", "2020-01-01T02:00:00Z"}) {
        r.push_back(reading(ts, 2.0));
    }
    const auto indoor = hourly_aggregate(r);
    auto outdoor_at = [](const char* ts, double v) {
        OutdoorObservation o;
        o.timestamp = at(ts);
        o.building_id = "B1";
        o.pm25_out = v;
        o.t2m_c = 20;
        o.d2m_c = 10;
        o.wind10m_ms = 2;
        o.sp_pa = 101000;
        o.ssrd_wm2 = 100;
        o.tp_mm = 0;
        return o;
    };
    const std::vector<OutdoorObservation> full = {outdoor_at("2020-01-01T00:00:00Z", 1),
                                                  outdoor_at("2020-01-01T01:00:00Z", 2),
                                                  outdoor_at("2020-01-01T02:00:00Z", 3)};
    const auto joined = join_hourly(indoor, full);
    ASSERT_EQ(joined.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t f = kFirstOutdoorField; f < kFieldCount; ++f) EXPECT_TRUE(joined[i].values[f]);
        EXPECT_EQ(*joined[i][Field::pm25_out], static_cast<double>(i + 1));
    }

    const std::vector<OutdoorObservation> partial = {outdoor_at("2020-01-01T01:00:00Z", 2),
                                                     outdoor_at("2020-01-01T05:00:00Z", 9)};
    const auto j2 = join_hourly(indoor, partial);
    ASSERT_EQ(j2.size(), 3u);
    EXPECT_FALSE(j2[0][Field::pm25_out]);
    EXPECT_FALSE(j2[0][Field::sp_pa]);
    EXPECT_EQ(*j2[1][Field::pm25_out], 2);
    EXPECT_FALSE(j2[2][Field::pm25_out]);

    auto other = outdoor_at("2020-01-01T00:00:00Z", 7);
    other.building_id = "B2";
    const std::vector<OutdoorObservation> wrong_building = {other};
    EXPECT_FALSE(join_hourly(indoor, wrong_building)[0][Field::pm25_out]);
}

TEST(JoinHourly, PropertyLeftJoinCardinality) {
    oracle::Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<SensorReading> r;
        const Instant t0 = at("2021-01-01T00:00:00Z");
        const int n = oracle::uniform_int(rng, 1, 60);
        for (int i = 0; i < n; ++i) {
            auto s = reading("2021-01-01T00:00:00Z", 1.0);
            s.timestamp = t0 + std::chrono::hours{oracle::uniform_int(rng, 0, 100)};
            r.push_back(s);
        }
        std::vector<OutdoorObservation> out;
        for (int i = 0; i < oracle::uniform_int(rng, 0, 80); ++i) {
            OutdoorObservation o;
            o.timestamp = t0 + std::chrono::hours{oracle::uniform_int(rng, 0, 100)};
            o.building_id = "B1";
            o.pm25_out = 1;
            out.push_back(o);
        }
        const auto indoor = hourly_aggregate(r);
        EXPECT_EQ(join_hourly(indoor, out).size(), indoor.size());
    }
}

TEST(SummaryStats, ConstantSeries) {
    const std::vector<double> v(5, 2.0);
    const auto s = summary_stats(std::span<const double>(v));
    EXPECT_EQ(s.n, 5u);
    EXPECT_EQ(s.min, 2.0);
    EXPECT_EQ(s.max, 2.0);
    EXPECT_EQ(s.median, 2.0);
    EXPECT_EQ(s.mean, 2.0);
    EXPECT_EQ(s.iqr, 0.0);
    EXPECT_EQ(s.sd, 0.0);
}

TEST(SummaryStats, OneToFour) {
    const std::vector<double> v = {4, 1, 3, 2};
    const auto s = summary_stats(std::span<const double>(v));
    EXPECT_DOUBLE_EQ(s.median, 2.5);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.q1, 1.75);
    EXPECT_DOUBLE_EQ(s.q3, 3.25);
    EXPECT_DOUBLE_EQ(s.iqr, 1.5);
    // sample SD: sqrt(((1.5^2 + 0.5^2) * 2) / 3)
    EXPECT_NEAR(s.sd, std::sqrt(5.0 / 3.0), 1e-15);
    EXPECT_NEAR(s.sd, 1.2910, 1e-4);
}

TEST(SummaryStats, EmptyAfterMissingRemoval) {
    const std::vector<Measure> v = {std::nullopt, std::nullopt};
    try {
        summary_stats(std::span<const Measure>(v));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
    }
}

TEST(SummaryStats, PropertyOrdering) {
    oracle::Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto v = oracle::random_vector(rng, static_cast<std::size_t>(oracle::uniform_int(rng, 1, 40)), 0, 100);
        const auto s = summary_stats(std::span<const double>(v));
        EXPECT_LE(s.min, s.q1);
        EXPECT_LE(s.q1, s.median);
        EXPECT_LE(s.median, s.q3);
        EXPECT_LE(s.q3, s.max);
        EXPECT_EQ(s.iqr, s.q3 - s.q1);
        EXPECT_GE(s.sd, 0);
        EXPECT_GE(s.n, 1u);
    }
}

TEST(CsvRoundTrip, PropertyNumericValuesSurvive) {
    oracle::Rng rng(21);
    std::vector<SensorReading> rows;
    const Instant t0 = at("2022-02-01T00:00:00Z");
    for (int i = 0; i < 300; ++i) {
        SensorReading r;
        r.timestamp = t0 + std::chrono::minutes{17 * i};
        r.sensor_id = "S" + std::to_string(i % 3);
        r.building_id = "B";
        r.lat = oracle::uniform(rng, -90, 90);
        r.lon = oracle::uniform(rng, -180, 180);
        r.pm25 = oracle::uniform(rng, 0, 1e3);
        if (i % 7 == 0) r.pm10 = std::nullopt;
        else r.pm10 = oracle::uniform(rng, 0, 1e-3);
        r.tvoc = oracle::uniform(rng, 0, 1e6);
        r.temp_c = oracle::uniform(rng, -40, 50);
        r.rh_pct = oracle::uniform(rng, 0, 100);
        rows.push_back(r);
    }
    std::ostringstream os;
    write_indoor_csv(os, rows);
    const auto back = parse_indoor_csv(scratch::write("roundtrip.csv", os.str()));
    ASSERT_EQ(back.size(), rows.size());
    auto close = [](const Measure& a, const Measure& b) {
        if (!a || !b) return !a && !b;
        return std::abs(*a - *b) <= 1e-9 * std::max(1.0, std::abs(*a));
    };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(back[i].timestamp, rows[i].timestamp);
        EXPECT_EQ(back[i].sensor_id, rows[i].sensor_id);
        EXPECT_TRUE(close(back[i].pm25, rows[i].pm25));
        EXPECT_TRUE(close(back[i].pm10, rows[i].pm10));
        EXPECT_TRUE(close(back[i].tvoc, rows[i].tvoc));
        EXPECT_TRUE(close(back[i].temp_c, rows[i].temp_c));
        EXPECT_TRUE(close(back[i].rh_pct, rows[i].rh_pct));
        EXPECT_TRUE(close(back[i].lat, rows[i].lat));
    }
}
