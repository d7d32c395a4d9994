#include "parktrack/session_tracker.hpp"

#include <cmath>
#include <utility>

#include <json.hpp>

#include "parktrack/errors.hpp"

namespace parktrack {

using nlohmann::json;

double debounce_for_perimeter(double perimeter_m) {
    if (!std::isfinite(perimeter_m) || perimeter_m <= 0.0) {
        throw InvalidParameter("perimeter must be positive and finite");
    }
    return perimeter_m / (kMaxLapSpeedKmh / 3.6);
}

std::string sighting_to_jsonl(const SightingEvent& event) {
    json doc = {
        {"t", event.timestamp_s},
        {"subject_id", event.subject_id},
        {"score", event.score},
    };
    if (event.embedding) {
        doc["embedding"] = *event.embedding;
    }
    return doc.dump();
}

SightingEvent sighting_from_jsonl(const std::string& line) {
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(std::string("sighting line is not valid JSON: ") +
                         e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("sighting line must be a JSON object");
    }
    SightingEvent event;
    try {
        event.timestamp_s = doc.at("t").get<double>();
        event.subject_id = doc.at("subject_id").get<std::string>();
        event.score = doc.at("score").get<double>();
        if (doc.contains("embedding")) {
            event.embedding = doc["embedding"].get<std::vector<double>>();
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed sighting event: ") + e.what());
    }
    if (!std::isfinite(event.timestamp_s) || event.timestamp_s < 0.0) {
        throw ParseError("sighting timestamp must be finite and >= 0");
    }
    return event;
}

const char* to_string(IngestResult result) {
    switch (result) {
        case IngestResult::kSessionStarted:
            return "session_started";
        case IngestResult::kAcceptedNewLap:
            return "accepted_new_lap";
        case IngestResult::kDebounced:
            return "debounced";
        case IngestResult::kRejectedOutOfOrder:
            return "rejected_out_of_order";
    }
    return "unknown";
}

WalkSession::WalkSession(std::string subject_id, double weight_kg,
                         double perimeter_m, double debounce_s)
    : subject_id_(std::move(subject_id)),
      weight_kg_(weight_kg),
      perimeter_m_(perimeter_m),
      debounce_s_(debounce_s) {
    if (subject_id_.empty()) {
        throw InvalidParameter("subject_id must not be empty");
    }
    if (!std::isfinite(weight_kg_) || weight_kg_ <= 0.0) {
        throw InvalidParameter("weight must be positive and finite");
    }
    if (!std::isfinite(perimeter_m_) || perimeter_m_ <= 0.0) {
        throw InvalidParameter("perimeter must be positive and finite");
    }
    if (!std::isfinite(debounce_s_) || debounce_s_ < 0.0) {
        throw InvalidParameter("debounce window must be >= 0 and finite");
    }
}

IngestResult WalkSession::ingest(const SightingEvent& event) {
    if (closed_) {
        throw StateError("session for " + subject_id_ + " is closed");
    }
    if (event.subject_id != subject_id_) {
        throw RoutingError("event for " + event.subject_id +
                           " routed to session of " + subject_id_);
    }
    if (!std::isfinite(event.timestamp_s) || event.timestamp_s < 0.0) {
        throw InvalidParameter("event timestamp must be finite and >= 0");
    }
    if (started() && event.timestamp_s < last_seen_s_) {
        return IngestResult::kRejectedOutOfOrder;
    }
    last_seen_s_ = event.timestamp_s;
    if (!started()) {
        t0_s_ = event.timestamp_s;
        last_accepted_s_ = event.timestamp_s;
        accepted_count_ = 1;
        return IngestResult::kSessionStarted;
    }
    if (event.timestamp_s - last_accepted_s_ >= debounce_s_) {
        last_accepted_s_ = event.timestamp_s;
        ++accepted_count_;
        ++laps_;
        return IngestResult::kAcceptedNewLap;
    }
    return IngestResult::kDebounced;
}

SessionStats WalkSession::stats_at(double now_s) const {
    if (!started()) {
        throw EmptySession("session for " + subject_id_ +
                           " has no accepted sightings");
    }
    if (!std::isfinite(now_s) || now_s < t0_s_) {
        throw InvalidParameter("stats time must be finite and >= session start");
    }
    const double elapsed_s = now_s - t0_s_;
    if (elapsed_s == 0.0) {
        SessionStats stats;
        stats.met = classify_met(0.0);
        return stats;
    }
    return compute_stats(weight_kg_, perimeter_m_, laps_, elapsed_s);
}

SessionStats WalkSession::close_at(double now_s) {
    if (closed_) {
        throw StateError("session for " + subject_id_ + " is already closed");
    }
    const SessionStats stats = stats_at(now_s);
    closed_ = true;
    return stats;
}

double WalkSession::t0_s() const {
    if (!started()) {
        throw EmptySession("session has not started");
    }
    return t0_s_;
}

double WalkSession::last_accepted_s() const {
    if (!started()) {
        throw EmptySession("session has not started");
    }
    return last_accepted_s_;
}

std::string closed_session_to_json(const ClosedSession& session) {
    const json doc = {
        {"subject_id", session.subject_id},
        {"weight_kg", session.weight_kg},
        {"perimeter_m", session.perimeter_m},
        {"t0_s", session.t0_s},
        {"last_accepted_s", session.last_accepted_s},
        {"laps", session.laps},
        {"state", "closed"},
        {"final_stats",
         {
             {"distance_m", session.final_stats.distance_m},
             {"elapsed_s", session.final_stats.elapsed_s},
             {"avg_pace_kmh", session.final_stats.avg_pace_kmh},
             {"met", session.final_stats.met},
             {"kcal_per_min", session.final_stats.kcal_per_min},
             {"total_kcal", session.final_stats.total_kcal},
         }},
    };
    return doc.dump(2);
}

ClosedSession closed_session_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("session document is not valid JSON: ") +
                         e.what());
    }
    ClosedSession session;
    try {
        session.subject_id = doc.at("subject_id").get<std::string>();
        session.weight_kg = doc.at("weight_kg").get<double>();
        session.perimeter_m = doc.at("perimeter_m").get<double>();
        session.t0_s = doc.at("t0_s").get<double>();
        session.last_accepted_s = doc.at("last_accepted_s").get<double>();
        session.laps = doc.at("laps").get<long>();
        const json& stats = doc.at("final_stats");
        session.final_stats.distance_m = stats.at("distance_m").get<double>();
        session.final_stats.elapsed_s = stats.at("elapsed_s").get<double>();
        session.final_stats.avg_pace_kmh =
            stats.at("avg_pace_kmh").get<double>();
        session.final_stats.met = stats.at("met").get<double>();
        session.final_stats.kcal_per_min =
            stats.at("kcal_per_min").get<double>();
        session.final_stats.total_kcal = stats.at("total_kcal").get<double>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed session document: ") +
                         e.what());
    }
    return session;
}

SessionRegistry::SessionRegistry(TrackerConfig config) : config_(config) {
    if (!std::isfinite(config_.perimeter_m) || config_.perimeter_m <= 0.0) {
        throw InvalidParameter("perimeter must be positive and finite");
    }
    if (!std::isfinite(config_.debounce_s) || config_.debounce_s < 0.0) {
        throw InvalidParameter("debounce window must be >= 0 and finite");
    }
    if (!std::isfinite(config_.session_timeout_s) ||
        config_.session_timeout_s <= 0.0) {
        throw InvalidParameter("session timeout must be positive and finite");
    }
}

void SessionRegistry::close_idle(double now_s) {
    for (auto it = active_.begin(); it != active_.end();) {
        WalkSession& session = it->second;
        if (now_s - session.last_accepted_s() > config_.session_timeout_s) {
            ClosedSession record{
                session.subject_id(),  session.weight_kg(),
                session.perimeter_m(), session.t0_s(),
                session.last_accepted_s(), session.laps(),
                session.close_at(session.last_accepted_s()),
            };
            closed_.push_back(std::move(record));
            it = active_.erase(it);
        } else {
            ++it;
        }
    }
}

IngestResult SessionRegistry::route(const SightingEvent& event,
                                    double weight_kg) {
    close_idle(event.timestamp_s);
    auto it = active_.find(event.subject_id);
    if (it == active_.end()) {
        it = active_
                 .emplace(event.subject_id,
                          WalkSession(event.subject_id, weight_kg,
                                      config_.perimeter_m, config_.debounce_s))
                 .first;
    }
    return it->second.ingest(event);
}

std::vector<ClosedSession> SessionRegistry::finish() {
    // std::map iteration gives a deterministic subject order.
    for (auto& [subject_id, session] : active_) {
        ClosedSession record{
            session.subject_id(),      session.weight_kg(),
            session.perimeter_m(),     session.t0_s(),
            session.last_accepted_s(), session.laps(),
            session.close_at(session.last_accepted_s()),
        };
        closed_.push_back(std::move(record));
    }
    active_.clear();
    return closed_;
}

}  // namespace parktrack
