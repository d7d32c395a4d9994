#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "parktrack/activity_model.hpp"
#include "parktrack/errors.hpp"
#include "parktrack/rng.hpp"

using namespace parktrack;

namespace {

// The published per-subject table: weight, pace, MET, and the printed
// two-decimal strings for kcal/min and total kcal over a 30-minute session.
struct GoldenRow {
    const char* subject_id;
    double weight_kg;
    double pace_kmh;
    double met;
    const char* kcal_per_min;
    const char* total_kcal;
};

constexpr GoldenRow kGoldenRows[] = {
    {"S1", 73.3, 6.3, 5.0, "6.41", "192.41"},
    {"S2", 74.2, 6.1, 5.0, "6.49", "194.77"},
    {"S3", 66.7, 7.0, 6.3, "7.35", "220.61"},
    {"S4", 88.0, 5.0, 2.0, "3.08", "92.40"},
    {"S5", 78.6, 6.1, 5.0, "6.87", "206.32"},
    {"S6", 78.2, 6.28, 5.0, "6.84", "205.27"},
    {"S7", 85.7, 5.1, 2.0, "2.99", "89.98"},
    {"S8", 78.4, 4.8, 2.0, "2.74", "82.32"},
    {"S9", 49.5, 8.8, 11.5, "9.96", "298.85"},
    {"S10", 81.8, 5.8, 5.0, "7.15", "214.72"},
    {"S11", 77.4, 7.1, 6.3, "8.53", "256.00"},
    {"S12", 66.9, 5.9, 5.0, "5.85", "175.61"},
    {"S13", 73.9, 5.1, 2.0, "2.58", "77.59"},
    {"S14", 74.8, 5.3, 2.0, "2.61", "78.54"},
    {"S15", 97.3, 7.1, 6.3, "10.72", "321.81"},
    {"S16", 81.0, 6.2, 5.0, "7.08", "212.62"},
    {"S17", 98.0, 5.3, 2.0, "3.43", "102.90"},
    {"S18", 75.7, 4.9, 2.0, "2.64", "79.48"},
    {"S19", 70.5, 6.0, 5.0, "6.16", "185.06"},
    {"S20", 78.1, 3.8, 2.0, "2.73", "82.00"},
    {"S21", 86.2, 4.2, 2.0, "3.01", "90.51"},
    {"S22", 77.8, 5.4, 2.0, "2.72", "81.69"},
};

}  // namespace

TEST_CASE("distance_covered is the exact product") {
    CHECK(distance_covered(110.0, 20) == 2200.0);
    CHECK(distance_covered(110.0, 0) == 0.0);
    CHECK(distance_covered(110.0, 28) == 3080.0);
    CHECK_THROWS_AS(distance_covered(0.0, 1), InvalidParameter);
    CHECK_THROWS_AS(distance_covered(-5.0, 1), InvalidParameter);
    CHECK_THROWS_AS(distance_covered(110.0, -1), InvalidParameter);
}

TEST_CASE("average_pace converts meters per second window to km/h") {
    CHECK(average_pace(3150.0, 1800.0) == doctest::Approx(6.3).epsilon(1e-12));
    CHECK(average_pace(0.0, 1800.0) == 0.0);
    CHECK(average_pace(2200.0, 1320.0) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK_THROWS_AS(average_pace(100.0, 0.0), InvalidParameter);
    CHECK_THROWS_AS(average_pace(100.0, -1.0), InvalidParameter);
    CHECK_THROWS_AS(average_pace(-1.0, 10.0), InvalidParameter);
}

TEST_CASE("classify_met follows the walking band table") {
    CHECK(classify_met(6.3) == 5.0);
    CHECK(classify_met(8.8) == 11.5);
    CHECK(classify_met(7.0) == 6.3);
    CHECK(classify_met(0.0) == 2.0);

    SUBCASE("boundaries are lower-inclusive, upper-exclusive") {
        CHECK(classify_met(5.6) == 5.0);
        CHECK(classify_met(std::nextafter(5.6, 0.0)) == 2.0);
        CHECK(classify_met(6.4) == 6.3);
        CHECK(classify_met(7.2) == 11.5);
        CHECK(classify_met(1000.0) == 11.5);
    }

    SUBCASE("invalid paces") {
        CHECK_THROWS_AS(classify_met(-0.1), InvalidParameter);
        CHECK_THROWS_AS(classify_met(std::nan("")), InvalidParameter);
        CHECK_THROWS_AS(
            classify_met(std::numeric_limits<double>::infinity()),
            InvalidParameter);
    }
}

TEST_CASE("calories_per_minute applies the 3.5/200 model at full precision") {
    CHECK(calories_per_minute(5.0, 73.3) ==
          doctest::Approx(6.41375).epsilon(1e-12));
    CHECK(calories_per_minute(2.0, 88.0) ==
          doctest::Approx(3.08).epsilon(1e-12));
    CHECK(calories_per_minute(11.5, 49.5) ==
          doctest::Approx(9.961875).epsilon(1e-12));
    CHECK(calories_per_minute(2.0, 100.0) ==
          doctest::Approx(3.5).epsilon(1e-12));
    CHECK_THROWS_AS(calories_per_minute(0.0, 70.0), InvalidParameter);
    CHECK_THROWS_AS(calories_per_minute(5.0, 0.0), InvalidParameter);
    CHECK_THROWS_AS(calories_per_minute(-2.0, 70.0), InvalidParameter);
}

TEST_CASE("total_calories uses fractional minutes") {
    CHECK(total_calories(6.41375, 1800.0) ==
          doctest::Approx(192.4125).epsilon(1e-12));
    CHECK(total_calories(123.0, 0.0) == 0.0);
    CHECK(total_calories(9.961875, 1800.0) ==
          doctest::Approx(298.85625).epsilon(1e-12));
    CHECK(total_calories(2.0, 90.0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(total_calories(-1.0, 10.0), InvalidParameter);
    CHECK_THROWS_AS(total_calories(1.0, -10.0), InvalidParameter);
}

TEST_CASE("compute_stats chains the model") {
    SUBCASE("28 laps of a 110 m loop in 30 minutes") {
        const SessionStats stats = compute_stats(70.5, 110.0, 28, 1800.0);
        CHECK(stats.distance_m == 3080.0);
        CHECK(stats.avg_pace_kmh == doctest::Approx(6.16).epsilon(1e-12));
        CHECK(stats.met == 5.0);
        CHECK(stats.kcal_per_min == doctest::Approx(6.16875).epsilon(1e-12));
        CHECK(stats.total_kcal == doctest::Approx(185.0625).epsilon(1e-12));
    }

    SUBCASE("29 laps at 73.3 kg lands in the same band as the S1 row") {
        const SessionStats stats = compute_stats(73.3, 110.0, 29, 1800.0);
        CHECK(stats.distance_m == 3190.0);
        CHECK(stats.avg_pace_kmh == doctest::Approx(6.38).epsilon(1e-12));
        CHECK(stats.met == 5.0);
        CHECK(stats.kcal_per_min == doctest::Approx(6.41375).epsilon(1e-12));
        CHECK(stats.total_kcal == doctest::Approx(192.4125).epsilon(1e-12));
    }

    SUBCASE("a stationary subject falls in the strolling band") {
        const SessionStats stats = compute_stats(80.0, 110.0, 0, 1800.0);
        CHECK(stats.distance_m == 0.0);
        CHECK(stats.avg_pace_kmh == 0.0);
        CHECK(stats.met == 2.0);
        CHECK(stats.total_kcal ==
              doctest::Approx(2.0 * 80.0 * 3.5 / 200.0 * 30.0).epsilon(1e-12));
    }

    SUBCASE("invariants hold on the result") {
        const SessionStats stats = compute_stats(73.3, 110.0, 29, 1800.0);
        CHECK(stats.avg_pace_kmh * (stats.elapsed_s / 3600.0) ==
              doctest::Approx(stats.distance_m / 1000.0).epsilon(1e-9));
        CHECK(stats.total_kcal ==
              doctest::Approx(stats.kcal_per_min * stats.elapsed_s / 60.0)
                  .epsilon(1e-9));
    }

    CHECK_THROWS_AS(compute_stats(70.0, 110.0, 5, 0.0), InvalidParameter);
    CHECK_THROWS_AS(compute_stats(0.0, 110.0, 5, 60.0), InvalidParameter);
}

TEST_CASE("golden table: every published row reproduces within +/-0.02") {
    for (const GoldenRow& row : kGoldenRows) {
        CAPTURE(row.subject_id);
        const double met = classify_met(row.pace_kmh);
        CHECK(met == row.met);
        const double kcal_min = calories_per_minute(met, row.weight_kg);
        const double total = total_calories(kcal_min, 1800.0);
        CHECK(std::abs(truncate_2dp(kcal_min) - std::stod(row.kcal_per_min)) <=
              0.02);
        CHECK(std::abs(truncate_2dp(total) - std::stod(row.total_kcal)) <=
              0.02);
        // The printed strings match bit for bit after truncation.
        CHECK(format_2dp(kcal_min) == row.kcal_per_min);
        CHECK(format_2dp(total) == row.total_kcal);
    }
}

TEST_CASE("display truncation cuts toward zero, never rounds up") {
    CHECK(format_2dp(6.8775) == "6.87");
    CHECK(format_2dp(7.1575) == "7.15");
    CHECK(format_2dp(206.325) == "206.32");
    CHECK(format_2dp(3.43) == "3.43");  // exact decimal survives
    CHECK(format_2dp(82.005) == "82.00");
    CHECK(truncate_2dp(-10.599) == doctest::Approx(-10.59));
    CHECK(format_met(5.0) == "5");
    CHECK(format_met(6.3) == "6.3");
    CHECK(format_met(11.5) == "11.5");
}

TEST_CASE("MetTable validates its band structure") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(MetTable(std::vector<MetBand>{}), InvalidParameter);
    // gap between bands
    CHECK_THROWS_AS(MetTable({{"a", 0.0, 5.0, 2.0}, {"b", 6.0, inf, 5.0}}),
                    InvalidParameter);
    // does not start at zero
    CHECK_THROWS_AS(MetTable({{"a", 1.0, inf, 2.0}}), InvalidParameter);
    // bounded top band
    CHECK_THROWS_AS(MetTable({{"a", 0.0, 5.0, 2.0}}), InvalidParameter);
    // decreasing MET
    CHECK_THROWS_AS(MetTable({{"a", 0.0, 5.0, 5.0}, {"b", 5.0, inf, 2.0}}),
                    InvalidParameter);
    // a valid custom table classifies
    const MetTable table({{"slow", 0.0, 4.0, 1.5}, {"fast", 4.0, inf, 8.0}});
    CHECK(table.classify(3.9) == 1.5);
    CHECK(table.classify(4.0) == 8.0);
}

TEST_CASE("band totality: piecewise-constant and non-decreasing in pace") {
    std::mt19937_64 rng(20240801);
    double prev_pace = 0.0;
    double prev_met = classify_met(0.0);
    for (int i = 0; i < 2000; ++i) {
        const double pace = prev_pace + uniform_range(rng, 0.0, 0.02);
        const double met = classify_met(pace);
        CHECK(met >= prev_met);
        CHECK((met == 2.0 || met == 5.0 || met == 6.3 || met == 11.5));
        prev_pace = pace;
        prev_met = met;
    }
}

TEST_CASE("calories_per_minute is linear in weight and MET") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double met = uniform_range(rng, 0.5, 12.0);
        const double weight = uniform_range(rng, 40.0, 120.0);
        const double scale = uniform_range(rng, 0.1, 10.0);
        CHECK(calories_per_minute(met, scale * weight) ==
              doctest::Approx(scale * calories_per_minute(met, weight))
                  .epsilon(1e-12));
        CHECK(calories_per_minute(scale * met, weight) ==
              doctest::Approx(scale * calories_per_minute(met, weight))
                  .epsilon(1e-12));
    }
}

TEST_CASE("total_calories is additive over time") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const double rate = uniform_range(rng, 0.0, 15.0);
        const double t1 = uniform_range(rng, 0.0, 4000.0);
        const double t2 = uniform_range(rng, 0.0, 4000.0);
        CHECK(total_calories(rate, t1 + t2) ==
              doctest::Approx(total_calories(rate, t1) +
                              total_calories(rate, t2))
                  .epsilon(1e-12));
    }
}

TEST_CASE("distance and pace round-trip") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 1000; ++i) {
        const double perimeter = uniform_range(rng, 10.0, 500.0);
        const long laps = static_cast<long>(uniform_index(rng, 100));
        const double elapsed = uniform_range(rng, 1.0, 7200.0);
        const double pace =
            average_pace(distance_covered(perimeter, laps), elapsed);
        CHECK(pace * elapsed / 3600.0 * 1000.0 ==
              doctest::Approx(perimeter * static_cast<double>(laps))
                  .epsilon(1e-9));
    }
}
