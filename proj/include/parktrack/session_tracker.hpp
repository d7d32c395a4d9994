#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parktrack/activity_model.hpp"

namespace parktrack {

inline constexpr double kDefaultPerimeterM = 110.0;
inline constexpr double kMaxLapSpeedKmh = 15.0;
inline constexpr double kDefaultSessionTimeoutS = 300.0;

/// Debounce window sized so that no plausible walker can complete a lap
/// faster: perimeter / 15 km/h (110 m -> 26.4 s).
double debounce_for_perimeter(double perimeter_m);

inline constexpr double kDefaultDebounceS = 26.4;

/// One timestamped identity observation. `embedding` is optional wire
/// payload: streams produced with --emit-embeddings carry it so replay can
/// run identification instead of trusting subject_id.
struct SightingEvent {
    double timestamp_s = 0.0;
    std::string subject_id;
    double score = 1.0;
    std::optional<std::vector<double>> embedding;
};

/// Wire format, one event per line:
///   {"score": <float>, "subject_id": "<token>", "t": <seconds float>}
/// plus an optional "embedding": [..] array.
std::string sighting_to_jsonl(const SightingEvent& event);
SightingEvent sighting_from_jsonl(const std::string& line);

enum class IngestResult {
    kSessionStarted,     // first accepted sighting; starts the clock, 0 laps
    kAcceptedNewLap,     // past the debounce window; laps += 1
    kDebounced,          // within the debounce window; state unchanged
    kRejectedOutOfOrder  // timestamp older than the last seen; dropped
};

const char* to_string(IngestResult result);

/// Per-subject walking-session state machine. Events must arrive in
/// timestamp order; the first accepted sighting starts the clock at zero
/// laps and every later accepted sighting past the debounce window counts
/// one completed lap.
///
/// Concurrency: single-writer. Events for one subject must be applied
/// sequentially; sessions of different subjects are independent.
class WalkSession {
public:
    WalkSession(std::string subject_id, double weight_kg, double perimeter_m,
                double debounce_s);

    /// Applies one sighting. Throws RoutingError if the event belongs to a
    /// different subject and StateError if the session is closed.
    IngestResult ingest(const SightingEvent& event);

    /// Stats over [t0, now_s]. Throws EmptySession before the first accepted
    /// sighting; now_s must be >= t0. At now_s == t0 every field is zero
    /// except the MET, which is the band of pace 0.
    SessionStats stats_at(double now_s) const;

    /// Closes the session and returns stats_at(now_s). Further events and a
    /// second close raise StateError.
    SessionStats close_at(double now_s);

    bool started() const { return accepted_count_ > 0; }
    bool closed() const { return closed_; }
    long laps() const { return laps_; }
    long accepted_count() const { return accepted_count_; }
    double t0_s() const;
    double last_accepted_s() const;
    const std::string& subject_id() const { return subject_id_; }
    double weight_kg() const { return weight_kg_; }
    double perimeter_m() const { return perimeter_m_; }
    double debounce_s() const { return debounce_s_; }

private:
    std::string subject_id_;
    double weight_kg_;
    double perimeter_m_;
    double debounce_s_;
    bool closed_ = false;
    long laps_ = 0;
    long accepted_count_ = 0;
    double t0_s_ = 0.0;
    double last_accepted_s_ = 0.0;
    double last_seen_s_ = 0.0;
};

/// Snapshot of a closed session, the unit of persistence.
struct ClosedSession {
    std::string subject_id;
    double weight_kg = 0.0;
    double perimeter_m = 0.0;
    double t0_s = 0.0;
    double last_accepted_s = 0.0;
    long laps = 0;
    SessionStats final_stats;
};

std::string closed_session_to_json(const ClosedSession& session);
ClosedSession closed_session_from_json(const std::string& text);

struct TrackerConfig {
    double perimeter_m = kDefaultPerimeterM;
    double debounce_s = kDefaultDebounceS;
    double session_timeout_s = kDefaultSessionTimeoutS;
};

/// Routes a merged, timestamp-ordered event stream into per-subject
/// sessions. A subject idle for longer than session_timeout_s is closed at
/// their last accepted sighting; a later sighting starts a fresh session.
class SessionRegistry {
public:
    explicit SessionRegistry(TrackerConfig config);

    /// Routes one event; the caller resolves the subject's body weight
    /// (normally from a Gallery). Timestamps should be globally
    /// non-decreasing; an event older than the subject's own session
    /// rejects as out of order.
    IngestResult route(const SightingEvent& event, double weight_kg);

    /// Closes every remaining session at its last accepted timestamp and
    /// returns all sessions closed so far, in close order.
    std::vector<ClosedSession> finish();

    std::size_t active_count() const { return active_.size(); }
    const std::vector<ClosedSession>& closed() const { return closed_; }

private:
    void close_idle(double now_s);

    TrackerConfig config_;
    std::map<std::string, WalkSession> active_;  // keyed by subject_id
    std::vector<ClosedSession> closed_;
};

}  // namespace parktrack
