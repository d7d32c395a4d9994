#include "parktrack/activity_model.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "parktrack/errors.hpp"

namespace parktrack {

namespace {

bool is_finite(double v) { return std::isfinite(v); }

void require(bool ok, const char* message) {
    if (!ok) {
        throw InvalidParameter(message);
    }
}

}  // namespace

MetTable::MetTable(std::vector<MetBand> bands) : bands_(std::move(bands)) {
    require(!bands_.empty(), "MET table must contain at least one band");
    require(bands_.front().pace_lo_kmh == 0.0,
            "MET bands must start at pace 0");
    require(std::isinf(bands_.back().pace_hi_kmh),
            "top MET band must be open-ended");
    double prev_hi = 0.0;
    double prev_met = 0.0;
    for (const MetBand& band : bands_) {
        require(band.pace_lo_kmh == prev_hi,
                "MET bands must partition [0, inf) without gaps or overlaps");
        require(band.pace_lo_kmh < band.pace_hi_kmh,
                "MET band lower bound must be below its upper bound");
        require(band.met > 0.0 && is_finite(band.met),
                "MET values must be positive and finite");
        require(band.met >= prev_met,
                "MET values must be non-decreasing with pace");
        prev_hi = band.pace_hi_kmh;
        prev_met = band.met;
    }
}

const MetTable& MetTable::walking() {
    static const MetTable table(std::vector<MetBand>{
        {"Strolling (Slow Walk)", 0.0, 5.6, 2.0},
        {"Brisk Walking", 5.6, 6.4, 5.0},
        {"Concentrated Brisk Walking", 6.4, 7.2, 6.3},
        {"Running", 7.2, std::numeric_limits<double>::infinity(), 11.5},
    });
    return table;
}

const MetBand& MetTable::band_for(double pace_kmh) const {
    require(is_finite(pace_kmh) && pace_kmh >= 0.0,
            "pace must be finite and >= 0");
    for (const MetBand& band : bands_) {
        if (pace_kmh >= band.pace_lo_kmh && pace_kmh < band.pace_hi_kmh) {
            return band;
        }
    }
    // Unreachable: the constructor guarantees a partition of [0, inf).
    return bands_.back();
}

double MetTable::classify(double pace_kmh) const {
    return band_for(pace_kmh).met;
}

double CalorieModel::kcal_per_minute(double met, double weight_kg) const {
    require(is_finite(met) && met > 0.0, "MET must be positive and finite");
    require(is_finite(weight_kg) && weight_kg > 0.0,
            "body weight must be positive and finite");
    return met * weight_kg * resting_vo2_factor / divisor;
}

double distance_covered(double perimeter_m, long laps) {
    require(is_finite(perimeter_m) && perimeter_m > 0.0,
            "perimeter must be positive and finite");
    require(laps >= 0, "lap count must be >= 0");
    return perimeter_m * static_cast<double>(laps);
}

double average_pace(double distance_m, double elapsed_s) {
    require(is_finite(distance_m) && distance_m >= 0.0,
            "distance must be >= 0 and finite");
    require(is_finite(elapsed_s) && elapsed_s > 0.0,
            "elapsed time must be positive and finite");
    return (distance_m / 1000.0) / (elapsed_s / 3600.0);
}

double classify_met(double pace_kmh) {
    return MetTable::walking().classify(pace_kmh);
}

double calories_per_minute(double met, double weight_kg) {
    return CalorieModel{}.kcal_per_minute(met, weight_kg);
}

double total_calories(double kcal_per_min, double elapsed_s) {
    require(is_finite(kcal_per_min) && kcal_per_min >= 0.0,
            "kcal per minute must be >= 0 and finite");
    require(is_finite(elapsed_s) && elapsed_s >= 0.0,
            "elapsed time must be >= 0 and finite");
    return kcal_per_min * (elapsed_s / 60.0);
}

SessionStats compute_stats(double weight_kg, double perimeter_m, long laps,
                           double elapsed_s) {
    SessionStats stats;
    stats.distance_m = distance_covered(perimeter_m, laps);
    stats.elapsed_s = elapsed_s;
    stats.avg_pace_kmh = average_pace(stats.distance_m, elapsed_s);
    stats.met = classify_met(stats.avg_pace_kmh);
    stats.kcal_per_min = calories_per_minute(stats.met, weight_kg);
    stats.total_kcal = total_calories(stats.kcal_per_min, elapsed_s);
    return stats;
}

double truncate_2dp(double value) {
    require(is_finite(value), "cannot truncate a non-finite value");
    // The nudge absorbs binary representation error in values that are exact
    // two-or-more-decimal quantities (e.g. 3.43 stored as 3.4299999...).
    // It is far below the smallest decimal step these stats can take.
    const double magnitude = std::floor(std::abs(value) * 100.0 + 1e-6) / 100.0;
    return value < 0.0 ? -magnitude : magnitude;
}

std::string format_2dp(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", truncate_2dp(value));
    return buf;
}

std::string format_met(double met) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", met);
    return buf;
}

}  // namespace parktrack
