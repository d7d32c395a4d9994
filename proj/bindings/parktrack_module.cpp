#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "parktrack/activity_model.hpp"
#include "parktrack/config.hpp"
#include "parktrack/errors.hpp"
#include "parktrack/evaluation.hpp"
#include "parktrack/face_gallery.hpp"
#include "parktrack/park_simulator.hpp"
#include "parktrack/session_tracker.hpp"

namespace py = pybind11;
using namespace parktrack;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Activity-tracking engine for camera-monitored walking loops";

    // Most-derived translators run first, so register the base before the
    // specific error types.
    py::register_exception<Error>(m, "EngineError", PyExc_RuntimeError);
    py::register_exception<InvalidParameter>(m, "InvalidParameterError",
                                             PyExc_ValueError);
    py::register_exception<DimensionMismatch>(m, "DimensionMismatchError",
                                              PyExc_ValueError);
    py::register_exception<InvalidEmbedding>(m, "InvalidEmbeddingError",
                                             PyExc_ValueError);
    py::register_exception<DuplicateSubject>(m, "DuplicateSubjectError",
                                             PyExc_ValueError);
    py::register_exception<RoutingError>(m, "RoutingErrorError",
                                         PyExc_RuntimeError);
    py::register_exception<StateError>(m, "StateErrorError",
                                       PyExc_RuntimeError);
    py::register_exception<EmptySession>(m, "EmptySessionError",
                                         PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseErrorError", PyExc_ValueError);

    // activity model
    py::class_<MetBand>(m, "MetBand")
        .def_readonly("label", &MetBand::label)
        .def_readonly("pace_lo_kmh", &MetBand::pace_lo_kmh)
        .def_readonly("pace_hi_kmh", &MetBand::pace_hi_kmh)
        .def_readonly("met", &MetBand::met);

    py::class_<SessionStats>(m, "SessionStats")
        .def_readonly("distance_m", &SessionStats::distance_m)
        .def_readonly("elapsed_s", &SessionStats::elapsed_s)
        .def_readonly("avg_pace_kmh", &SessionStats::avg_pace_kmh)
        .def_readonly("met", &SessionStats::met)
        .def_readonly("kcal_per_min", &SessionStats::kcal_per_min)
        .def_readonly("total_kcal", &SessionStats::total_kcal)
        .def("__repr__", [](const SessionStats& s) {
            std::ostringstream out;
            out << "SessionStats(distance_m=" << s.distance_m
                << ", elapsed_s=" << s.elapsed_s
                << ", avg_pace_kmh=" << s.avg_pace_kmh << ", met=" << s.met
                << ", kcal_per_min=" << s.kcal_per_min
                << ", total_kcal=" << s.total_kcal << ")";
            return out.str();
        });

    m.def("distance_covered", &distance_covered, py::arg("perimeter_m"),
          py::arg("laps"), "Distance in meters: perimeter x completed laps.");
    m.def("average_pace", &average_pace, py::arg("distance_m"),
          py::arg("elapsed_s"), "Average pace in km/h.");
    m.def("classify_met", &classify_met, py::arg("pace_kmh"),
          "MET value of the walking band containing the pace.");
    m.def("calories_per_minute", &calories_per_minute, py::arg("met"),
          py::arg("weight_kg"));
    m.def("total_calories", &total_calories, py::arg("kcal_per_min"),
          py::arg("elapsed_s"));
    m.def("compute_stats", &compute_stats, py::arg("weight_kg"),
          py::arg("perimeter_m"), py::arg("laps"), py::arg("elapsed_s"),
          "Full chain: distance -> pace -> MET -> kcal/min -> total.");
    m.def("truncate_2dp", &truncate_2dp, py::arg("value"));
    m.def("format_2dp", &format_2dp, py::arg("value"));
    m.def("format_met", &format_met, py::arg("met"));
    m.def("walking_met_bands",
          [] { return MetTable::walking().bands(); });

    // face gallery
    py::class_<Embedding>(m, "Embedding")
        .def(py::init<std::vector<double>>(), py::arg("values"))
        .def_property_readonly("dimension", &Embedding::dimension)
        .def_property_readonly("norm", &Embedding::norm)
        .def_property_readonly("values", &Embedding::values);

    m.def("cosine_similarity", &cosine_similarity, py::arg("a"), py::arg("b"));

    py::class_<Subject>(m, "Subject")
        .def(py::init([](std::string subject_id, std::string name,
                         double weight_kg, Embedding embedding) {
                 return Subject{std::move(subject_id), std::move(name),
                                weight_kg, std::move(embedding)};
             }),
             py::arg("subject_id"), py::arg("name"), py::arg("weight_kg"),
             py::arg("embedding"))
        .def_readonly("subject_id", &Subject::subject_id)
        .def_readonly("name", &Subject::name)
        .def_readonly("weight_kg", &Subject::weight_kg)
        .def_readonly("embedding", &Subject::embedding);

    py::class_<MatchResult>(m, "MatchResult")
        .def_readonly("matched", &MatchResult::matched)
        .def_readonly("subject_id", &MatchResult::subject_id)
        .def_readonly("score", &MatchResult::score)
        .def("__repr__", [](const MatchResult& r) {
            std::ostringstream out;
            out << "MatchResult(matched=" << (r.matched ? "True" : "False")
                << ", subject_id="
                << (r.subject_id ? "'" + *r.subject_id + "'" : "None")
                << ", score=" << r.score << ")";
            return out.str();
        });

    py::class_<Gallery>(m, "Gallery")
        .def(py::init<std::size_t>(),
             py::arg("dimension") = kDefaultEmbeddingDim)
        .def_property_readonly("dimension", &Gallery::dimension)
        .def("__len__", &Gallery::size)
        .def("enroll", &Gallery::enroll, py::arg("subject"))
        .def("identify", &Gallery::identify, py::arg("query"),
             py::arg("threshold") = kDefaultMatchThreshold)
        .def("contains", &Gallery::contains, py::arg("subject_id"))
        .def("subjects", &Gallery::subjects)
        .def("save_file", &Gallery::save_file, py::arg("path"))
        .def_static("load_file", &Gallery::load_file, py::arg("path"));

    py::class_<SyntheticEmbeddingSource>(m, "SyntheticEmbeddingSource")
        .def(py::init<std::size_t, std::uint64_t, double>(),
             py::arg("dimension"), py::arg("seed"),
             py::arg("max_pairwise_cos") = 0.5)
        .def_property_readonly("dimension",
                               &SyntheticEmbeddingSource::dimension)
        .def("next", &SyntheticEmbeddingSource::next)
        .def("perturb", &SyntheticEmbeddingSource::perturb, py::arg("base"),
             py::arg("angle_rad"));

    // session tracking
    py::enum_<IngestResult>(m, "IngestResult")
        .value("SESSION_STARTED", IngestResult::kSessionStarted)
        .value("ACCEPTED_NEW_LAP", IngestResult::kAcceptedNewLap)
        .value("DEBOUNCED", IngestResult::kDebounced)
        .value("REJECTED_OUT_OF_ORDER", IngestResult::kRejectedOutOfOrder);

    py::class_<SightingEvent>(m, "SightingEvent")
        .def(py::init([](double timestamp_s, std::string subject_id,
                         double score,
                         std::optional<std::vector<double>> embedding) {
                 SightingEvent event;
                 event.timestamp_s = timestamp_s;
                 event.subject_id = std::move(subject_id);
                 event.score = score;
                 event.embedding = std::move(embedding);
                 return event;
             }),
             py::arg("timestamp_s"), py::arg("subject_id"),
             py::arg("score") = 1.0, py::arg("embedding") = py::none())
        .def_readonly("timestamp_s", &SightingEvent::timestamp_s)
        .def_readonly("subject_id", &SightingEvent::subject_id)
        .def_readonly("score", &SightingEvent::score)
        .def_readonly("embedding", &SightingEvent::embedding);

    m.def("sighting_to_jsonl", &sighting_to_jsonl, py::arg("event"));
    m.def("sighting_from_jsonl", &sighting_from_jsonl, py::arg("line"));
    m.def("debounce_for_perimeter", &debounce_for_perimeter,
          py::arg("perimeter_m"));

    py::class_<WalkSession>(m, "WalkSession")
        .def(py::init<std::string, double, double, double>(),
             py::arg("subject_id"), py::arg("weight_kg"),
             py::arg("perimeter_m") = kDefaultPerimeterM,
             py::arg("debounce_s") = kDefaultDebounceS)
        .def("ingest", &WalkSession::ingest, py::arg("event"))
        .def("stats_at", &WalkSession::stats_at, py::arg("now_s"))
        .def("close_at", &WalkSession::close_at, py::arg("now_s"))
        .def_property_readonly("started", &WalkSession::started)
        .def_property_readonly("closed", &WalkSession::closed)
        .def_property_readonly("laps", &WalkSession::laps)
        .def_property_readonly("accepted_count", &WalkSession::accepted_count)
        .def_property_readonly("t0_s", &WalkSession::t0_s)
        .def_property_readonly("last_accepted_s", &WalkSession::last_accepted_s)
        .def_property_readonly("subject_id", &WalkSession::subject_id);

    py::class_<ClosedSession>(m, "ClosedSession")
        .def_readonly("subject_id", &ClosedSession::subject_id)
        .def_readonly("weight_kg", &ClosedSession::weight_kg)
        .def_readonly("perimeter_m", &ClosedSession::perimeter_m)
        .def_readonly("t0_s", &ClosedSession::t0_s)
        .def_readonly("last_accepted_s", &ClosedSession::last_accepted_s)
        .def_readonly("laps", &ClosedSession::laps)
        .def_readonly("final_stats", &ClosedSession::final_stats);

    py::class_<TrackerConfig>(m, "TrackerConfig")
        .def(py::init([](double perimeter_m, double debounce_s,
                         double session_timeout_s) {
                 return TrackerConfig{perimeter_m, debounce_s,
                                      session_timeout_s};
             }),
             py::arg("perimeter_m") = kDefaultPerimeterM,
             py::arg("debounce_s") = kDefaultDebounceS,
             py::arg("session_timeout_s") = kDefaultSessionTimeoutS)
        .def_readwrite("perimeter_m", &TrackerConfig::perimeter_m)
        .def_readwrite("debounce_s", &TrackerConfig::debounce_s)
        .def_readwrite("session_timeout_s", &TrackerConfig::session_timeout_s);

    py::class_<SessionRegistry>(m, "SessionRegistry")
        .def(py::init<TrackerConfig>(), py::arg("config") = TrackerConfig{})
        .def("route", &SessionRegistry::route, py::arg("event"),
             py::arg("weight_kg"))
        .def("finish", &SessionRegistry::finish)
        .def_property_readonly("active_count", &SessionRegistry::active_count);

    // simulator
    py::class_<SpeedSegment>(m, "SpeedSegment")
        .def(py::init([](double duration_s, double speed_kmh) {
                 return SpeedSegment{duration_s, speed_kmh};
             }),
             py::arg("duration_s"), py::arg("speed_kmh"))
        .def_readwrite("duration_s", &SpeedSegment::duration_s)
        .def_readwrite("speed_kmh", &SpeedSegment::speed_kmh);

    py::class_<WalkerProfile>(m, "WalkerProfile")
        .def(py::init([](std::string subject_id, double weight_kg,
                         std::vector<SpeedSegment> segments,
                         double start_offset_m) {
                 WalkerProfile walker;
                 walker.subject_id = std::move(subject_id);
                 walker.weight_kg = weight_kg;
                 walker.segments = std::move(segments);
                 walker.start_offset_m = start_offset_m;
                 return walker;
             }),
             py::arg("subject_id"), py::arg("weight_kg"), py::arg("segments"),
             py::arg("start_offset_m") = 0.0)
        .def_static("constant", &WalkerProfile::constant,
                    py::arg("subject_id"), py::arg("weight_kg"),
                    py::arg("speed_kmh"))
        .def_readwrite("subject_id", &WalkerProfile::subject_id)
        .def_readwrite("weight_kg", &WalkerProfile::weight_kg)
        .def_readwrite("segments", &WalkerProfile::segments)
        .def_readwrite("start_offset_m", &WalkerProfile::start_offset_m);

    py::class_<DetectionModel>(m, "DetectionModel")
        .def(py::init([](double detect_prob, double jitter_s,
                         double false_match_prob, std::uint64_t seed) {
                 return DetectionModel{detect_prob, jitter_s, false_match_prob,
                                       seed};
             }),
             py::arg("detect_prob") = 1.0, py::arg("jitter_s") = 0.0,
             py::arg("false_match_prob") = 0.0, py::arg("seed") = 0)
        .def_readwrite("detect_prob", &DetectionModel::detect_prob)
        .def_readwrite("jitter_s", &DetectionModel::jitter_s)
        .def_readwrite("false_match_prob", &DetectionModel::false_match_prob)
        .def_readwrite("seed", &DetectionModel::seed);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init([](double perimeter_m, double horizon_s,
                         DetectionModel detection,
                         std::vector<WalkerProfile> walkers) {
                 return Scenario{perimeter_m, horizon_s, detection,
                                 std::move(walkers)};
             }),
             py::arg("perimeter_m") = kDefaultPerimeterM,
             py::arg("horizon_s") = 1800.0,
             py::arg("detection") = DetectionModel{},
             py::arg("walkers") = std::vector<WalkerProfile>{})
        .def_readwrite("perimeter_m", &Scenario::perimeter_m)
        .def_readwrite("horizon_s", &Scenario::horizon_s)
        .def_readwrite("detection", &Scenario::detection)
        .def_readwrite("walkers", &Scenario::walkers);

    m.def("scenario_from_json", &scenario_from_json, py::arg("text"));
    m.def("scenario_to_json", &scenario_to_json, py::arg("scenario"));

    py::class_<GroundTruthRow>(m, "GroundTruthRow")
        .def_readonly("subject_id", &GroundTruthRow::subject_id)
        .def_readonly("true_laps", &GroundTruthRow::true_laps)
        .def_readonly("true_distance_m", &GroundTruthRow::true_distance_m)
        .def_readonly("true_pace_kmh", &GroundTruthRow::true_pace_kmh)
        .def_readonly("true_kcal", &GroundTruthRow::true_kcal);

    py::class_<SimulationResult>(m, "SimulationResult")
        .def_readonly("events", &SimulationResult::events)
        .def_readonly("truth", &SimulationResult::truth);

    m.def("crossing_times", &crossing_times, py::arg("walker"),
          py::arg("perimeter_m"), py::arg("horizon_s"));
    m.def(
        "simulate",
        [](const Scenario& scenario, const Gallery* gallery,
           double noise_angle_deg) {
            if (gallery == nullptr) {
                return simulate(scenario);
            }
            EmbeddingEmission emission{gallery, noise_angle_deg};
            return simulate(scenario, &emission);
        },
        py::arg("scenario"), py::arg("gallery") = nullptr,
        py::arg("noise_angle_deg") = 8.0,
        "Run the scenario; pass a gallery to attach noisy embeddings.");

    py::class_<ReplayCounters>(m, "ReplayCounters")
        .def_readonly("lines", &ReplayCounters::lines)
        .def_readonly("parse_errors", &ReplayCounters::parse_errors)
        .def_readonly("unmatched", &ReplayCounters::unmatched)
        .def_readonly("accepted", &ReplayCounters::accepted)
        .def_readonly("debounced", &ReplayCounters::debounced)
        .def_readonly("out_of_order", &ReplayCounters::out_of_order);

    py::class_<ReplayResult>(m, "ReplayResult")
        .def_readonly("sessions", &ReplayResult::sessions)
        .def_readonly("counters", &ReplayResult::counters);

    m.def("replay_events", &replay_events, py::arg("events"),
          py::arg("gallery"), py::arg("config") = TrackerConfig{},
          py::arg("match_threshold") = kDefaultMatchThreshold);
    m.def(
        "replay_file",
        [](const std::string& path, const Gallery& gallery,
           const TrackerConfig& config, double match_threshold) {
            std::ifstream in(path);
            if (!in) {
                throw ParseError("cannot open stream file: " + path);
            }
            return replay_stream(in, gallery, config, match_threshold);
        },
        py::arg("path"), py::arg("gallery"),
        py::arg("config") = TrackerConfig{},
        py::arg("match_threshold") = kDefaultMatchThreshold);

    // evaluation
    py::class_<ComparisonRecord>(m, "ComparisonRecord")
        .def(py::init([](std::string subject_id, double dlicp_kcal,
                         double reference_kcal) {
                 return ComparisonRecord{std::move(subject_id), dlicp_kcal,
                                         reference_kcal};
             }),
             py::arg("subject_id"), py::arg("dlicp_kcal"),
             py::arg("reference_kcal"))
        .def_readonly("subject_id", &ComparisonRecord::subject_id)
        .def_readonly("dlicp_kcal", &ComparisonRecord::dlicp_kcal)
        .def_readonly("reference_kcal", &ComparisonRecord::reference_kcal);

    py::class_<SubjectDeviation>(m, "SubjectDeviation")
        .def_readonly("subject_id", &SubjectDeviation::subject_id)
        .def_readonly("deviation_kcal", &SubjectDeviation::deviation_kcal);

    py::class_<PaceRosterRow>(m, "PaceRosterRow")
        .def(py::init([](std::string subject_id, double weight_kg,
                         double avg_pace_kmh) {
                 return PaceRosterRow{std::move(subject_id), weight_kg,
                                      avg_pace_kmh};
             }),
             py::arg("subject_id"), py::arg("weight_kg"),
             py::arg("avg_pace_kmh"))
        .def_readonly("subject_id", &PaceRosterRow::subject_id)
        .def_readonly("weight_kg", &PaceRosterRow::weight_kg)
        .def_readonly("avg_pace_kmh", &PaceRosterRow::avg_pace_kmh);

    py::class_<ReproducedRow>(m, "ReproducedRow")
        .def_readonly("subject_id", &ReproducedRow::subject_id)
        .def_readonly("weight_kg", &ReproducedRow::weight_kg)
        .def_readonly("avg_pace_kmh", &ReproducedRow::avg_pace_kmh)
        .def_readonly("met", &ReproducedRow::met)
        .def_readonly("kcal_per_min", &ReproducedRow::kcal_per_min)
        .def_readonly("total_kcal", &ReproducedRow::total_kcal);

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("n", &EvalReport::n)
        .def_readonly("mae_kcal", &EvalReport::mae_kcal)
        .def_readonly("mpe_percent", &EvalReport::mpe_percent)
        .def_readonly("mape_percent", &EvalReport::mape_percent)
        .def_readonly("per_subject", &EvalReport::per_subject)
        .def_readonly("paper_mae_kcal", &EvalReport::paper_mae_kcal)
        .def_readonly("paper_mpe_percent", &EvalReport::paper_mpe_percent)
        .def_readonly("mae_matches_published",
                      &EvalReport::mae_matches_published)
        .def_readonly("mpe_matches_published",
                      &EvalReport::mpe_matches_published);

    m.def("mean_absolute_error", &mean_absolute_error, py::arg("records"));
    m.def("mean_percentage_error", &mean_percentage_error, py::arg("records"));
    m.def("mean_absolute_percentage_error", &mean_absolute_percentage_error,
          py::arg("records"));
    m.def("deviation_table", &deviation_table, py::arg("records"));
    m.def("reproduce_calorie_table", &reproduce_calorie_table,
          py::arg("roster"), py::arg("duration_s") = 1800.0);
    m.def("evaluate", &evaluate, py::arg("records"));
    m.def("eval_report_to_json", &eval_report_to_json, py::arg("report"),
          py::arg("records"));
    m.def("load_pace_roster_csv_file", &load_pace_roster_csv_file,
          py::arg("path"));
    m.def("load_comparison_csv_file", &load_comparison_csv_file,
          py::arg("path"));

    m.attr("DEFAULT_EMBEDDING_DIM") = kDefaultEmbeddingDim;
    m.attr("DEFAULT_MATCH_THRESHOLD") = kDefaultMatchThreshold;
    m.attr("DEFAULT_PERIMETER_M") = kDefaultPerimeterM;
    m.attr("DEFAULT_DEBOUNCE_S") = kDefaultDebounceS;
    m.attr("DEFAULT_SESSION_TIMEOUT_S") = kDefaultSessionTimeoutS;
    m.attr("PUBLISHED_MAE_KCAL") = kPublishedMaeKcal;
    m.attr("PUBLISHED_MPE_PERCENT") = kPublishedMpePercent;

#ifdef PARKTRACK_VERSION
    m.attr("__version__") = PARKTRACK_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
