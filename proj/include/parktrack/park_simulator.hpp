#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "parktrack/face_gallery.hpp"
#include "parktrack/session_tracker.hpp"

namespace parktrack {

/// A stretch of constant speed. The last segment of a profile may be
/// open-ended (duration_s = +infinity).
struct SpeedSegment {
    double duration_s = 0.0;
    double speed_kmh = 0.0;
};

/// Ground-truth kinematics of one walker on the loop. start_offset_m is the
/// initial position along the loop, measured from the camera line.
struct WalkerProfile {
    std::string subject_id;
    double weight_kg = 0.0;
    std::vector<SpeedSegment> segments;
    double start_offset_m = 0.0;

    static WalkerProfile constant(std::string subject_id, double weight_kg,
                                  double speed_kmh);
};

/// Imperfection model for the camera pipeline. Identical seeds yield
/// identical output streams.
struct DetectionModel {
    double detect_prob = 1.0;       // chance a crossing yields a sighting
    double jitter_s = 0.0;          // uniform timestamp noise half-width
    double false_match_prob = 0.0;  // chance of attribution to another walker
    std::uint64_t seed = 0;
};

struct Scenario {
    double perimeter_m = kDefaultPerimeterM;
    double horizon_s = 1800.0;
    DetectionModel detection;
    std::vector<WalkerProfile> walkers;
};

/// Scenario document:
///   {"perimeter_m": .., "horizon_s": ..,
///    "detection": {"detect_prob", "jitter_s", "false_match_prob", "seed"},
///    "walkers": [{"subject_id", "weight_kg", "start_offset_m",
///                 "speed_kmh" | "segments": [{"duration_s", "speed_kmh"}]}]}
/// Parse errors name the offending field path.
Scenario scenario_from_json(const std::string& text);
Scenario scenario_from_json_file(const std::string& path);
std::string scenario_to_json(const Scenario& scenario);

/// What a perfect tracker would report for one walker, computed in closed
/// form from the profile alone (never from the event stream): laps from the
/// analytic camera-line crossings, elapsed time from first to last crossing,
/// then distance, pace, MET and calories through the standard chain.
struct GroundTruthRow {
    std::string subject_id;
    long true_laps = 0;
    double true_distance_m = 0.0;
    double true_pace_kmh = 0.0;
    double true_kcal = 0.0;
};

/// Camera-line crossing times for one walker within [0, horizon_s], computed
/// analytically from the piecewise-constant speed profile. A walker starting
/// exactly on the line (start_offset_m == 0) crosses at t = 0.
std::vector<double> crossing_times(const WalkerProfile& walker,
                                   double perimeter_m, double horizon_s);

struct SimulationResult {
    std::vector<SightingEvent> events;  // merged, timestamp-ordered
    std::vector<GroundTruthRow> truth;  // scenario walker order
};

/// Optional embedding emission: events carry a noisy embedding of the
/// attributed subject so replay can exercise identification.
struct EmbeddingEmission {
    const Gallery* gallery = nullptr;
    double noise_angle_deg = 8.0;
};

/// Runs the scenario: analytic crossings, then detection noise per the
/// DetectionModel (drop, false attribution, timestamp jitter clamped to
/// preserve stream order). Ground truth is computed independently of the
/// emitted stream. Single-threaded and deterministic.
SimulationResult simulate(const Scenario& scenario,
                          const EmbeddingEmission* emission = nullptr);

/// GroundTruth CSV: `subject_id,true_laps,true_distance_m,true_pace_kmh,true_kcal`.
void write_ground_truth_csv(std::ostream& out,
                            const std::vector<GroundTruthRow>& rows);
std::vector<GroundTruthRow> read_ground_truth_csv(std::istream& in);

void write_sighting_stream(std::ostream& out,
                           const std::vector<SightingEvent>& events);

struct ReplayCounters {
    std::size_t lines = 0;
    std::size_t parse_errors = 0;
    std::size_t unmatched = 0;
    std::size_t accepted = 0;
    std::size_t debounced = 0;
    std::size_t out_of_order = 0;
};

struct ReplayResult {
    std::vector<ClosedSession> sessions;
    ReplayCounters counters;
};

/// Feeds events through identification (embedding events) or a gallery
/// lookup (id-only events), then into a SessionRegistry. Malformed lines and
/// unmatched sightings are skipped and counted. Sessions close at their last
/// accepted sighting.
ReplayResult replay_events(const std::vector<SightingEvent>& events,
                           const Gallery& gallery, const TrackerConfig& config,
                           double match_threshold = kDefaultMatchThreshold);
ReplayResult replay_stream(std::istream& jsonl, const Gallery& gallery,
                           const TrackerConfig& config,
                           double match_threshold = kDefaultMatchThreshold);

}  // namespace parktrack
