#include "parktrack/park_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "csv_util.hpp"
#include "parktrack/activity_model.hpp"
#include "parktrack/errors.hpp"
#include "parktrack/rng.hpp"

namespace parktrack {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegToRad = 3.141592653589793238463 / 180.0;

double kmh_to_mps(double kmh) { return kmh / 3.6; }

void validate_profile(const WalkerProfile& walker, double perimeter_m,
                      double horizon_s) {
    if (walker.subject_id.empty()) {
        throw InvalidParameter("walker subject_id must not be empty");
    }
    if (walker.segments.empty()) {
        throw InvalidParameter("walker " + walker.subject_id +
                               ": speed profile must not be empty");
    }
    if (!std::isfinite(walker.start_offset_m) || walker.start_offset_m < 0.0 ||
        walker.start_offset_m >= perimeter_m) {
        throw InvalidParameter("walker " + walker.subject_id +
                               ": start offset must lie in [0, perimeter)");
    }
    double covered_s = 0.0;
    for (const SpeedSegment& segment : walker.segments) {
        if (std::isnan(segment.duration_s) || segment.duration_s <= 0.0) {
            throw InvalidParameter("walker " + walker.subject_id +
                                   ": segment durations must be > 0");
        }
        if (!std::isfinite(segment.speed_kmh) || segment.speed_kmh < 0.0) {
            throw InvalidParameter("walker " + walker.subject_id +
                                   ": speeds must be >= 0 and finite");
        }
        covered_s += segment.duration_s;
    }
    if (covered_s < horizon_s) {
        throw InvalidParameter("walker " + walker.subject_id +
                               ": speed profile covers " +
                               std::to_string(covered_s) +
                               " s but the horizon is " +
                               std::to_string(horizon_s) + " s");
    }
}

}  // namespace

WalkerProfile WalkerProfile::constant(std::string subject_id, double weight_kg,
                                      double speed_kmh) {
    WalkerProfile walker;
    walker.subject_id = std::move(subject_id);
    walker.weight_kg = weight_kg;
    walker.segments.push_back({kInf, speed_kmh});
    return walker;
}

std::vector<double> crossing_times(const WalkerProfile& walker,
                                   double perimeter_m, double horizon_s) {
    if (!std::isfinite(perimeter_m) || perimeter_m <= 0.0) {
        throw InvalidParameter("perimeter must be positive and finite");
    }
    if (!std::isfinite(horizon_s) || horizon_s <= 0.0) {
        throw InvalidParameter("horizon must be positive and finite");
    }
    validate_profile(walker, perimeter_m, horizon_s);

    std::vector<double> crossings;
    double next_target_m;  // cumulative walked distance of the next crossing
    if (walker.start_offset_m == 0.0) {
        crossings.push_back(0.0);
        next_target_m = perimeter_m;
    } else {
        next_target_m = perimeter_m - walker.start_offset_m;
    }

    double t = 0.0;
    double walked_m = 0.0;
    for (const SpeedSegment& segment : walker.segments) {
        if (t >= horizon_s) {
            break;
        }
        const double seg_end =
            std::isinf(segment.duration_s)
                ? horizon_s
                : std::min(t + segment.duration_s, horizon_s);
        const double v = kmh_to_mps(segment.speed_kmh);
        const double seg_distance = (seg_end - t) * v;
        if (v > 0.0) {
            while (next_target_m <= walked_m + seg_distance) {
                const double tau = t + (next_target_m - walked_m) / v;
                crossings.push_back(std::min(tau, horizon_s));
                next_target_m += perimeter_m;
            }
        }
        walked_m += seg_distance;
        t = seg_end;
    }
    return crossings;
}

namespace {

GroundTruthRow ground_truth_for(const WalkerProfile& walker,
                                const std::vector<double>& crossings,
                                double perimeter_m) {
    GroundTruthRow row;
    row.subject_id = walker.subject_id;
    if (crossings.size() < 2) {
        return row;  // zero laps, zero everything
    }
    row.true_laps = static_cast<long>(crossings.size()) - 1;
    const double elapsed_s = crossings.back() - crossings.front();
    row.true_distance_m = distance_covered(perimeter_m, row.true_laps);
    row.true_pace_kmh = average_pace(row.true_distance_m, elapsed_s);
    const double met = classify_met(row.true_pace_kmh);
    row.true_kcal = total_calories(calories_per_minute(met, walker.weight_kg),
                                   elapsed_s);
    return row;
}

void validate_detection(const DetectionModel& detection) {
    if (!(detection.detect_prob >= 0.0 && detection.detect_prob <= 1.0)) {
        throw InvalidParameter("detect_prob must lie in [0, 1]");
    }
    if (!(detection.false_match_prob >= 0.0 &&
          detection.false_match_prob <= 1.0)) {
        throw InvalidParameter("false_match_prob must lie in [0, 1]");
    }
    if (!std::isfinite(detection.jitter_s) || detection.jitter_s < 0.0) {
        throw InvalidParameter("jitter_s must be >= 0 and finite");
    }
}

}  // namespace

SimulationResult simulate(const Scenario& scenario,
                          const EmbeddingEmission* emission) {
    if (!std::isfinite(scenario.perimeter_m) || scenario.perimeter_m <= 0.0) {
        throw InvalidParameter("scenario perimeter must be positive");
    }
    if (!std::isfinite(scenario.horizon_s) || scenario.horizon_s <= 0.0) {
        throw InvalidParameter("scenario horizon must be positive");
    }
    validate_detection(scenario.detection);
    for (std::size_t i = 0; i < scenario.walkers.size(); ++i) {
        for (std::size_t j = i + 1; j < scenario.walkers.size(); ++j) {
            if (scenario.walkers[i].subject_id ==
                scenario.walkers[j].subject_id) {
                throw InvalidParameter("duplicate walker subject_id: " +
                                       scenario.walkers[i].subject_id);
            }
        }
    }
    double noise_angle_rad = 0.0;
    if (emission != nullptr) {
        if (emission->gallery == nullptr) {
            throw InvalidParameter("embedding emission requires a gallery");
        }
        if (!std::isfinite(emission->noise_angle_deg) ||
            emission->noise_angle_deg < 0.0) {
            throw InvalidParameter("noise angle must be >= 0 and finite");
        }
        noise_angle_rad = emission->noise_angle_deg * kDegToRad;
        for (const WalkerProfile& walker : scenario.walkers) {
            if (!emission->gallery->contains(walker.subject_id)) {
                throw InvalidParameter("walker " + walker.subject_id +
                                       " is not enrolled in the gallery");
            }
        }
    }

    SimulationResult result;

    struct Crossing {
        double time_s;
        std::size_t walker_index;
    };
    std::vector<Crossing> merged;
    for (std::size_t i = 0; i < scenario.walkers.size(); ++i) {
        const auto crossings = crossing_times(
            scenario.walkers[i], scenario.perimeter_m, scenario.horizon_s);
        result.truth.push_back(ground_truth_for(scenario.walkers[i], crossings,
                                                scenario.perimeter_m));
        for (double t : crossings) {
            merged.push_back({t, i});
        }
    }
    std::sort(merged.begin(), merged.end(), [](const Crossing& a,
                                               const Crossing& b) {
        return a.time_s != b.time_s ? a.time_s < b.time_s
                                    : a.walker_index < b.walker_index;
    });

    // One RNG stream drives every noise decision, in merged crossing order:
    // detect draw, false-match draw, (index draw), jitter draw, then the
    // embedding perturbation when enabled.
    std::mt19937_64 rng(scenario.detection.seed);
    const std::size_t n = scenario.walkers.size();
    double prev_emitted_s = 0.0;
    for (const Crossing& crossing : merged) {
        const double u_detect = uniform01(rng);
        if (u_detect >= scenario.detection.detect_prob) {
            continue;
        }
        std::size_t attributed = crossing.walker_index;
        const double u_false = uniform01(rng);
        if (u_false < scenario.detection.false_match_prob && n > 1) {
            const std::size_t k = uniform_index(rng, n - 1);
            attributed = k >= crossing.walker_index ? k + 1 : k;
        }
        const double jitter = uniform_range(rng, -scenario.detection.jitter_s,
                                            scenario.detection.jitter_s);
        // Clamped so the emitted stream stays ordered and inside the horizon.
        const double emitted_s =
            std::min(std::max(crossing.time_s + jitter, prev_emitted_s),
                     scenario.horizon_s);
        prev_emitted_s = emitted_s;

        SightingEvent event;
        event.timestamp_s = emitted_s;
        event.subject_id = scenario.walkers[attributed].subject_id;
        event.score = 1.0;
        if (emission != nullptr) {
            const Subject* subject =
                emission->gallery->find(event.subject_id);
            Embedding noisy =
                perturb_embedding(subject->embedding, noise_angle_rad, rng);
            event.score = cosine_similarity(noisy, subject->embedding);
            event.embedding = noisy.values();
        }
        result.events.push_back(std::move(event));
    }
    return result;
}

namespace {

double require_number(const json& node, const std::string& path) {
    if (!node.is_number()) {
        throw ParseError(path + ": expected a number");
    }
    return node.get<double>();
}

double require_positive(const json& node, const std::string& path) {
    const double value = require_number(node, path);
    if (!std::isfinite(value) || value <= 0.0) {
        throw ParseError(path + ": must be positive and finite");
    }
    return value;
}

WalkerProfile walker_from_json(const json& node, const std::string& path) {
    if (!node.is_object()) {
        throw ParseError(path + ": expected an object");
    }
    WalkerProfile walker;
    if (!node.contains("subject_id") || !node["subject_id"].is_string()) {
        throw ParseError(path + ".subject_id: expected a string");
    }
    walker.subject_id = node["subject_id"].get<std::string>();
    if (!node.contains("weight_kg")) {
        throw ParseError(path + ".weight_kg: missing");
    }
    walker.weight_kg = require_positive(node["weight_kg"], path + ".weight_kg");
    if (node.contains("start_offset_m")) {
        walker.start_offset_m =
            require_number(node["start_offset_m"], path + ".start_offset_m");
    }
    const bool has_speed = node.contains("speed_kmh");
    const bool has_segments = node.contains("segments");
    if (has_speed == has_segments) {
        throw ParseError(path +
                         ": provide exactly one of speed_kmh or segments");
    }
    if (has_speed) {
        const double speed =
            require_number(node["speed_kmh"], path + ".speed_kmh");
        walker.segments.push_back({kInf, speed});
    } else {
        if (!node["segments"].is_array() || node["segments"].empty()) {
            throw ParseError(path + ".segments: expected a non-empty array");
        }
        for (std::size_t i = 0; i < node["segments"].size(); ++i) {
            const json& seg = node["segments"][i];
            const std::string seg_path =
                path + ".segments[" + std::to_string(i) + "]";
            if (!seg.is_object()) {
                throw ParseError(seg_path + ": expected an object");
            }
            if (!seg.contains("duration_s") || !seg.contains("speed_kmh")) {
                throw ParseError(seg_path +
                                 ": needs duration_s and speed_kmh");
            }
            walker.segments.push_back(
                {require_positive(seg["duration_s"], seg_path + ".duration_s"),
                 require_number(seg["speed_kmh"], seg_path + ".speed_kmh")});
        }
    }
    return walker;
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario: not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("scenario: expected a JSON object");
    }
    Scenario scenario;
    if (!doc.contains("perimeter_m")) {
        throw ParseError("scenario.perimeter_m: missing");
    }
    scenario.perimeter_m =
        require_positive(doc["perimeter_m"], "scenario.perimeter_m");
    if (!doc.contains("horizon_s")) {
        throw ParseError("scenario.horizon_s: missing");
    }
    scenario.horizon_s =
        require_positive(doc["horizon_s"], "scenario.horizon_s");
    if (doc.contains("detection")) {
        const json& det = doc["detection"];
        if (!det.is_object()) {
            throw ParseError("scenario.detection: expected an object");
        }
        if (det.contains("detect_prob")) {
            scenario.detection.detect_prob = require_number(
                det["detect_prob"], "scenario.detection.detect_prob");
        }
        if (det.contains("jitter_s")) {
            scenario.detection.jitter_s = require_number(
                det["jitter_s"], "scenario.detection.jitter_s");
        }
        if (det.contains("false_match_prob")) {
            scenario.detection.false_match_prob =
                require_number(det["false_match_prob"],
                               "scenario.detection.false_match_prob");
        }
        if (det.contains("seed")) {
            if (!det["seed"].is_number_integer()) {
                throw ParseError(
                    "scenario.detection.seed: expected an integer");
            }
            scenario.detection.seed = det["seed"].get<std::uint64_t>();
        }
    }
    if (!doc.contains("walkers") || !doc["walkers"].is_array()) {
        throw ParseError("scenario.walkers: expected an array");
    }
    for (std::size_t i = 0; i < doc["walkers"].size(); ++i) {
        scenario.walkers.push_back(walker_from_json(
            doc["walkers"][i], "scenario.walkers[" + std::to_string(i) + "]"));
    }
    return scenario;
}

Scenario scenario_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open scenario file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return scenario_from_json(buffer.str());
}

std::string scenario_to_json(const Scenario& scenario) {
    json doc;
    doc["perimeter_m"] = scenario.perimeter_m;
    doc["horizon_s"] = scenario.horizon_s;
    doc["detection"] = {
        {"detect_prob", scenario.detection.detect_prob},
        {"jitter_s", scenario.detection.jitter_s},
        {"false_match_prob", scenario.detection.false_match_prob},
        {"seed", scenario.detection.seed},
    };
    json walkers = json::array();
    for (const WalkerProfile& walker : scenario.walkers) {
        json node = {
            {"subject_id", walker.subject_id},
            {"weight_kg", walker.weight_kg},
            {"start_offset_m", walker.start_offset_m},
        };
        if (walker.segments.size() == 1 &&
            std::isinf(walker.segments.front().duration_s)) {
            node["speed_kmh"] = walker.segments.front().speed_kmh;
        } else {
            json segments = json::array();
            for (const SpeedSegment& segment : walker.segments) {
                if (std::isinf(segment.duration_s)) {
                    throw InvalidParameter(
                        "open-ended segments only serialize as the "
                        "speed_kmh shorthand");
                }
                segments.push_back({{"duration_s", segment.duration_s},
                                    {"speed_kmh", segment.speed_kmh}});
            }
            node["segments"] = std::move(segments);
        }
        walkers.push_back(std::move(node));
    }
    doc["walkers"] = std::move(walkers);
    return doc.dump(2);
}

void write_ground_truth_csv(std::ostream& out,
                            const std::vector<GroundTruthRow>& rows) {
    out << "subject_id,true_laps,true_distance_m,true_pace_kmh,true_kcal\n";
    for (const GroundTruthRow& row : rows) {
        out << row.subject_id << ',' << row.true_laps << ','
            << json(row.true_distance_m).dump() << ','
            << json(row.true_pace_kmh).dump() << ','
            << json(row.true_kcal).dump() << '\n';
    }
}

std::vector<GroundTruthRow> read_ground_truth_csv(std::istream& in) {
    const auto rows = csv::read_rows(in);
    if (rows.empty() ||
        rows.front() != std::vector<std::string>{"subject_id", "true_laps",
                                                 "true_distance_m",
                                                 "true_pace_kmh",
                                                 "true_kcal"}) {
        throw ParseError("ground truth CSV has an unexpected header");
    }
    std::vector<GroundTruthRow> result;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 5) {
            throw ParseError("ground truth row " + std::to_string(i + 1) +
                             ": expected 5 fields");
        }
        try {
            result.push_back({row[0], std::stol(row[1]), std::stod(row[2]),
                              std::stod(row[3]), std::stod(row[4])});
        } catch (const std::exception&) {
            throw ParseError("ground truth row " + std::to_string(i + 1) +
                             ": numeric field failed to parse");
        }
    }
    return result;
}

void write_sighting_stream(std::ostream& out,
                           const std::vector<SightingEvent>& events) {
    for (const SightingEvent& event : events) {
        out << sighting_to_jsonl(event) << '\n';
    }
}

namespace {

void route_resolved(SessionRegistry& registry, const Gallery& gallery,
                    const SightingEvent& event, double match_threshold,
                    ReplayCounters& counters) {
    std::string routed_id;
    double score = event.score;
    if (event.embedding) {
        Embedding query(*event.embedding);
        const MatchResult match = gallery.identify(query, match_threshold);
        if (!match.matched) {
            ++counters.unmatched;
            return;
        }
        routed_id = *match.subject_id;
        score = match.score;
    } else {
        if (!gallery.contains(event.subject_id)) {
            ++counters.unmatched;
            return;
        }
        routed_id = event.subject_id;
    }
    const Subject* subject = gallery.find(routed_id);
    SightingEvent routed;
    routed.timestamp_s = event.timestamp_s;
    routed.subject_id = routed_id;
    routed.score = score;
    switch (registry.route(routed, subject->weight_kg)) {
        case IngestResult::kSessionStarted:
        case IngestResult::kAcceptedNewLap:
            ++counters.accepted;
            break;
        case IngestResult::kDebounced:
            ++counters.debounced;
            break;
        case IngestResult::kRejectedOutOfOrder:
            ++counters.out_of_order;
            break;
    }
}

}  // namespace

ReplayResult replay_events(const std::vector<SightingEvent>& events,
                           const Gallery& gallery, const TrackerConfig& config,
                           double match_threshold) {
    ReplayResult result;
    SessionRegistry registry(config);
    for (const SightingEvent& event : events) {
        ++result.counters.lines;
        try {
            route_resolved(registry, gallery, event, match_threshold,
                           result.counters);
        } catch (const Error&) {
            ++result.counters.parse_errors;
        }
    }
    result.sessions = registry.finish();
    return result;
}

ReplayResult replay_stream(std::istream& jsonl, const Gallery& gallery,
                           const TrackerConfig& config,
                           double match_threshold) {
    ReplayResult result;
    SessionRegistry registry(config);
    std::string line;
    while (std::getline(jsonl, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        ++result.counters.lines;
        try {
            const SightingEvent event = sighting_from_jsonl(line);
            route_resolved(registry, gallery, event, match_threshold,
                           result.counters);
        } catch (const Error&) {
            ++result.counters.parse_errors;
        }
    }
    result.sessions = registry.finish();
    return result;
}

}  // namespace parktrack
