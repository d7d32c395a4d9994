#pragma once

#include <string>
#include <vector>

namespace parktrack {

/// One pace interval mapped to a MET value. Intervals are half-open
/// [pace_lo_kmh, pace_hi_kmh); the top band of a table is open-ended
/// (pace_hi_kmh = +infinity).
struct MetBand {
    std::string label;
    double pace_lo_kmh = 0.0;
    double pace_hi_kmh = 0.0;
    double met = 0.0;
};

/// Pace-to-MET lookup over a validated band table. The bands must partition
/// [0, inf) with no gaps or overlaps, carry positive MET values, and be
/// non-decreasing in MET as pace grows.
class MetTable {
public:
    explicit MetTable(std::vector<MetBand> bands);

    /// The built-in walking-activity table:
    ///   [0.0, 5.6) -> 2.0   strolling
    ///   [5.6, 6.4) -> 5.0   brisk walking
    ///   [6.4, 7.2) -> 6.3   concentrated brisk walking
    ///   [7.2, inf) -> 11.5  running
    static const MetTable& walking();

    /// MET of the unique band containing pace_kmh. Pace must be finite
    /// and >= 0.
    double classify(double pace_kmh) const;

    const MetBand& band_for(double pace_kmh) const;
    const std::vector<MetBand>& bands() const { return bands_; }

private:
    std::vector<MetBand> bands_;
};

/// kcal/min = MET x body weight x resting_vo2_factor / divisor. The two
/// constants are fixed at construction.
struct CalorieModel {
    double resting_vo2_factor = 3.5;  // ml O2 per kg per minute at 1 MET
    double divisor = 200.0;

    double kcal_per_minute(double met, double weight_kg) const;
};

/// Derived per-session quantities. All fields carry full floating-point
/// precision; display truncation happens only at formatting time.
struct SessionStats {
    double distance_m = 0.0;
    double elapsed_s = 0.0;
    double avg_pace_kmh = 0.0;
    double met = 0.0;
    double kcal_per_min = 0.0;
    double total_kcal = 0.0;
};

/// Distance covered in meters: perimeter x completed laps.
double distance_covered(double perimeter_m, long laps);

/// Average pace in km/h: (distance_m / 1000) / (elapsed_s / 3600).
/// elapsed_s must be > 0.
double average_pace(double distance_m, double elapsed_s);

/// MET of pace_kmh under the built-in walking table.
double classify_met(double pace_kmh);

/// kcal burned per minute under the default calorie model.
double calories_per_minute(double met, double weight_kg);

/// Total kcal: kcal_per_min x elapsed_s / 60. Minutes may be fractional.
double total_calories(double kcal_per_min, double elapsed_s);

/// The full chain: distance -> pace -> MET -> kcal/min -> total.
/// weight_kg, perimeter_m and elapsed_s must be > 0; laps >= 0.
SessionStats compute_stats(double weight_kg, double perimeter_m, long laps,
                           double elapsed_s);

/// Truncation toward zero at two decimals, safe against binary rounding of
/// decimal inputs (3.43 stays 3.43, never 3.42). Used wherever stats are
/// displayed; the engine itself never rounds.
double truncate_2dp(double value);

/// truncate_2dp rendered with exactly two decimals, e.g. "6.41", "82.00".
std::string format_2dp(double value);

/// MET rendered without trailing zeros, e.g. "5", "6.3", "11.5".
std::string format_met(double met);

}  // namespace parktrack
