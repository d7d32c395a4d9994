// parktrack: activity-tracking engine for camera-monitored walking loops.
//
// Subcommands: enroll, simulate, track, eval, report.
// Exit codes: 0 success, 1 empty or degenerate result, 2 input error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "parktrack/config.hpp"
#include "parktrack/errors.hpp"
#include "parktrack/evaluation.hpp"
#include "parktrack/face_gallery.hpp"
#include "parktrack/park_simulator.hpp"
#include "parktrack/session_tracker.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitEmpty = 1;
constexpr int kExitInputError = 2;

std::string pad(const std::string& text, std::size_t width) {
    return text.size() >= width ? text
                                : text + std::string(width - text.size(), ' ');
}

std::string num(double value, const char* fmt = "%g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, value);
    return buf;
}

struct EnrollArgs {
    std::string roster_path;
    std::string out_path;
    std::string config_path;
    std::optional<std::size_t> dimension;
    std::uint64_t seed = 42;
    double max_pairwise_cos = 0.5;
    std::string embeddings_path;  // optional user-supplied embedding JSON
};

int run_enroll(const EnrollArgs& args) {
    parktrack::Config config;
    if (!args.config_path.empty()) {
        config = parktrack::Config::load_file(args.config_path);
    }
    const std::size_t dimension = args.dimension.value_or(config.embedding_dim);
    const auto roster = parktrack::load_roster_csv_file(args.roster_path);

    std::optional<json> supplied;
    if (!args.embeddings_path.empty()) {
        std::ifstream in(args.embeddings_path);
        if (!in) {
            throw parktrack::ParseError("cannot open embeddings file: " +
                                        args.embeddings_path);
        }
        supplied = json::parse(in, nullptr, false);
        if (supplied->is_discarded() || !supplied->is_object()) {
            throw parktrack::ParseError(
                "embeddings file must be a JSON object keyed by subject_id");
        }
    }

    parktrack::Gallery gallery(dimension);
    parktrack::SyntheticEmbeddingSource source(dimension, args.seed,
                                               args.max_pairwise_cos);
    for (const parktrack::RosterEntry& entry : roster) {
        parktrack::Embedding embedding = [&] {
            if (supplied) {
                if (!supplied->contains(entry.subject_id)) {
                    throw parktrack::ParseError(
                        "embeddings file has no entry for subject '" +
                        entry.subject_id + "'");
                }
                return parktrack::Embedding(
                    (*supplied)[entry.subject_id].get<std::vector<double>>());
            }
            return source.next();
        }();
        gallery.enroll({entry.subject_id, entry.name, entry.weight_kg,
                        std::move(embedding)});
    }
    gallery.save_file(args.out_path);
    std::cout << "enrolled " << gallery.size() << " subject(s) -> "
              << args.out_path << '\n';
    if (gallery.empty()) {
        std::cerr << "warning: roster contained no subjects; wrote an empty "
                     "gallery\n";
        return kExitEmpty;
    }
    return kExitOk;
}

struct SimulateArgs {
    std::string scenario_path;
    std::string out_stream_path;
    std::string out_truth_path;
    std::optional<std::uint64_t> seed_override;
    std::string gallery_path;
    bool emit_embeddings = false;
    double noise_angle_deg = 8.0;
};

int run_simulate(const SimulateArgs& args) {
    parktrack::Scenario scenario =
        parktrack::scenario_from_json_file(args.scenario_path);
    if (args.seed_override) {
        scenario.detection.seed = *args.seed_override;
    }

    std::optional<parktrack::Gallery> gallery;
    parktrack::EmbeddingEmission emission;
    const parktrack::EmbeddingEmission* emission_ptr = nullptr;
    if (args.emit_embeddings) {
        if (args.gallery_path.empty()) {
            throw parktrack::InvalidParameter(
                "--emit-embeddings requires --gallery");
        }
        gallery = parktrack::Gallery::load_file(args.gallery_path);
        emission.gallery = &*gallery;
        emission.noise_angle_deg = args.noise_angle_deg;
        emission_ptr = &emission;
    }

    const parktrack::SimulationResult result =
        parktrack::simulate(scenario, emission_ptr);

    std::ofstream stream_out(args.out_stream_path);
    if (!stream_out) {
        throw parktrack::ParseError("cannot open output stream file: " +
                                    args.out_stream_path);
    }
    parktrack::write_sighting_stream(stream_out, result.events);

    std::ofstream truth_out(args.out_truth_path);
    if (!truth_out) {
        throw parktrack::ParseError("cannot open output truth file: " +
                                    args.out_truth_path);
    }
    parktrack::write_ground_truth_csv(truth_out, result.truth);

    std::cout << "simulated " << scenario.walkers.size() << " walker(s), "
              << result.events.size() << " sighting(s) -> "
              << args.out_stream_path << ", truth -> " << args.out_truth_path
              << '\n';
    return kExitOk;
}

struct TrackArgs {
    std::string stream_path;
    std::string gallery_path;
    std::string config_path;
    std::optional<std::string> data_dir;
    std::optional<double> perimeter_m;
    std::optional<double> debounce_s;
    std::optional<double> match_threshold;
    std::optional<double> session_timeout_s;
};

parktrack::Config resolve_config(const TrackArgs& args) {
    parktrack::Config config;
    bool file_has_debounce = false;
    if (!args.config_path.empty()) {
        config = parktrack::Config::load_file(args.config_path);
        std::ifstream in(args.config_path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        const json doc = json::parse(buffer.str());
        file_has_debounce = doc.contains("debounce_s");
    }
    if (const char* env_dir = std::getenv("PARKTRACK_DATA_DIR")) {
        if (*env_dir != '\0') {
            config.data_dir = env_dir;
        }
    }
    if (args.data_dir) {
        config.data_dir = *args.data_dir;
    }
    if (args.perimeter_m) {
        config.perimeter_m = *args.perimeter_m;
        if (!args.debounce_s && !file_has_debounce) {
            config.debounce_s =
                parktrack::debounce_for_perimeter(config.perimeter_m);
        }
    }
    if (args.debounce_s) {
        config.debounce_s = *args.debounce_s;
    }
    if (args.match_threshold) {
        config.match_threshold = *args.match_threshold;
    }
    if (args.session_timeout_s) {
        config.session_timeout_s = *args.session_timeout_s;
    }
    config.validate();
    return config;
}

void print_session_table(const std::vector<parktrack::ClosedSession>& sessions) {
    std::cout << pad("Subject", 9) << pad("Laps", 6) << pad("Distance(m)", 13)
              << pad("Pace(km/h)", 12) << pad("MET", 6) << pad("kcal/min", 10)
              << "Total kcal\n";
    for (const parktrack::ClosedSession& session : sessions) {
        const parktrack::SessionStats& s = session.final_stats;
        std::cout << pad(session.subject_id, 9)
                  << pad(std::to_string(session.laps), 6)
                  << pad(num(s.distance_m), 13)
                  << pad(num(s.avg_pace_kmh, "%.4g"), 12)
                  << pad(parktrack::format_met(s.met), 6)
                  << pad(parktrack::format_2dp(s.kcal_per_min), 10)
                  << parktrack::format_2dp(s.total_kcal) << '\n';
    }
}

int run_track(const TrackArgs& args) {
    const parktrack::Config config = resolve_config(args);
    const parktrack::Gallery gallery =
        parktrack::Gallery::load_file(args.gallery_path);

    std::ifstream stream(args.stream_path);
    if (!stream) {
        throw parktrack::ParseError("cannot open stream file: " +
                                    args.stream_path);
    }
    const parktrack::ReplayResult result = parktrack::replay_stream(
        stream, gallery, config.tracker(), config.match_threshold);

    if (result.counters.parse_errors > 0) {
        std::cerr << "skipped " << result.counters.parse_errors
                  << " malformed line(s)\n";
    }
    if (result.counters.unmatched > 0) {
        std::cerr << result.counters.unmatched
                  << " sighting(s) matched no enrolled subject\n";
    }
    if (result.counters.out_of_order > 0) {
        std::cerr << "rejected " << result.counters.out_of_order
                  << " out-of-order event(s)\n";
    }

    if (result.sessions.empty()) {
        std::cerr << "no sessions closed\n";
        return kExitEmpty;
    }

    fs::create_directories(config.data_dir);
    std::size_t index = 0;
    for (const parktrack::ClosedSession& session : result.sessions) {
        const fs::path path =
            fs::path(config.data_dir) /
            ("session_" + session.subject_id + "_" + std::to_string(++index) +
             ".json");
        std::ofstream out(path);
        if (!out) {
            throw parktrack::ParseError("cannot write session file: " +
                                        path.string());
        }
        out << parktrack::closed_session_to_json(session) << '\n';
    }

    print_session_table(result.sessions);
    std::cerr << "wrote " << result.sessions.size() << " session file(s) to "
              << config.data_dir << '\n';
    return kExitOk;
}

struct EvalArgs {
    std::string paces_path;
    std::string comparison_path;
    double duration_s = 1800.0;
    std::string out_json_path;
};

int run_eval(const EvalArgs& args) {
    const auto roster = parktrack::load_pace_roster_csv_file(args.paces_path);
    const auto records =
        parktrack::load_comparison_csv_file(args.comparison_path);

    const auto reproduced =
        parktrack::reproduce_calorie_table(roster, args.duration_s);
    const parktrack::EvalReport report = parktrack::evaluate(records);

    std::cout << "Reproduced calorie table ("
              << num(args.duration_s / 60.0, "%g") << " min):\n"
              << parktrack::render_calorie_table(reproduced) << '\n';
    std::cout << "Device comparison:\n"
              << parktrack::render_deviation_table(records) << '\n';
    std::cout << parktrack::render_metric_summary(report);

    if (!args.out_json_path.empty()) {
        std::ofstream out(args.out_json_path);
        if (!out) {
            throw parktrack::ParseError("cannot write report file: " +
                                        args.out_json_path);
        }
        out << parktrack::eval_report_to_json(report, records) << '\n';
        std::cerr << "wrote report -> " << args.out_json_path << '\n';
    }
    return kExitOk;
}

int run_report(const std::string& session_path) {
    std::ifstream in(session_path);
    if (!in) {
        throw parktrack::ParseError("cannot open session file: " +
                                    session_path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const parktrack::ClosedSession session =
        parktrack::closed_session_from_json(buffer.str());
    std::cout << "subject " << session.subject_id << ", weight "
              << num(session.weight_kg) << " kg, perimeter "
              << num(session.perimeter_m) << " m\n"
              << "window [" << num(session.t0_s) << ", "
              << num(session.last_accepted_s) << "] s\n";
    print_session_table({session});
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"activity tracking for camera-monitored walking loops"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "parktrack 0.1.0");

    EnrollArgs enroll_args;
    std::size_t enroll_dim = 0;
    CLI::App* enroll = app.add_subcommand(
        "enroll", "build a gallery from a roster CSV");
    enroll->add_option("--roster", enroll_args.roster_path,
                       "roster CSV (subject_id,name,weight_kg)")
        ->required();
    enroll->add_option("--out", enroll_args.out_path, "output gallery JSON")
        ->required();
    enroll->add_option("--config", enroll_args.config_path, "config JSON");
    CLI::Option* dim_opt =
        enroll->add_option("--dim", enroll_dim, "embedding dimension");
    enroll->add_option("--seed", enroll_args.seed,
                       "seed for synthetic embeddings");
    enroll->add_option("--max-cos", enroll_args.max_pairwise_cos,
                       "max |cos| between synthetic embeddings");
    enroll->add_option("--embeddings", enroll_args.embeddings_path,
                       "JSON object of per-subject embeddings (overrides "
                       "synthetic generation)");

    SimulateArgs sim_args;
    std::uint64_t sim_seed = 0;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "generate a sighting stream and ground truth");
    simulate->add_option("--scenario", sim_args.scenario_path,
                         "scenario JSON")
        ->required();
    simulate->add_option("--out-stream", sim_args.out_stream_path,
                         "output sighting stream (JSONL)")
        ->required();
    simulate->add_option("--out-truth", sim_args.out_truth_path,
                         "output ground-truth CSV")
        ->required();
    CLI::Option* seed_opt = simulate->add_option(
        "--seed", sim_seed, "override the scenario's detection seed");
    simulate->add_option("--gallery", sim_args.gallery_path,
                         "gallery JSON (for --emit-embeddings)");
    simulate->add_flag("--emit-embeddings", sim_args.emit_embeddings,
                       "attach noisy embeddings to each sighting");
    simulate->add_option("--noise-angle-deg", sim_args.noise_angle_deg,
                         "angular embedding noise per sighting");

    TrackArgs track_args;
    double track_perimeter = 0.0, track_debounce = 0.0, track_threshold = 0.0,
           track_timeout = 0.0;
    std::string track_data_dir;
    CLI::App* track = app.add_subcommand(
        "track", "replay a sighting stream into per-subject sessions");
    track->add_option("--stream", track_args.stream_path, "sighting JSONL")
        ->required();
    track->add_option("--gallery", track_args.gallery_path, "gallery JSON")
        ->required();
    track->add_option("--config", track_args.config_path, "config JSON");
    CLI::Option* dir_opt =
        track->add_option("--data-dir", track_data_dir,
                          "directory for persisted session files");
    CLI::Option* per_opt = track->add_option(
        "--perimeter", track_perimeter, "loop perimeter in meters");
    CLI::Option* deb_opt = track->add_option(
        "--debounce", track_debounce, "debounce window in seconds");
    CLI::Option* thr_opt = track->add_option(
        "--threshold", track_threshold, "identification threshold");
    CLI::Option* tio_opt = track->add_option(
        "--timeout", track_timeout, "inactivity auto-close in seconds");

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand(
        "eval", "reproduce the calorie table and accuracy metrics");
    eval->add_option("--paces", eval_args.paces_path,
                     "per-subject pace CSV (subject_id,weight_kg,avg_pace_kmh)")
        ->required();
    eval->add_option("--comparison", eval_args.comparison_path,
                     "engine-vs-reference CSV "
                     "(subject_id,dlicp_kcal,reference_kcal)")
        ->required();
    eval->add_option("--duration-s", eval_args.duration_s,
                     "session duration in seconds");
    eval->add_option("--out-json", eval_args.out_json_path,
                     "write the machine-readable report here");

    std::string report_session_path;
    CLI::App* report = app.add_subcommand(
        "report", "re-print a persisted session file");
    report->add_option("--session", report_session_path, "session JSON")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (enroll->parsed()) {
            if (dim_opt->count() > 0) {
                enroll_args.dimension = enroll_dim;
            }
            return run_enroll(enroll_args);
        }
        if (simulate->parsed()) {
            if (seed_opt->count() > 0) {
                sim_args.seed_override = sim_seed;
            }
            return run_simulate(sim_args);
        }
        if (track->parsed()) {
            if (dir_opt->count() > 0) track_args.data_dir = track_data_dir;
            if (per_opt->count() > 0) track_args.perimeter_m = track_perimeter;
            if (deb_opt->count() > 0) track_args.debounce_s = track_debounce;
            if (thr_opt->count() > 0)
                track_args.match_threshold = track_threshold;
            if (tio_opt->count() > 0)
                track_args.session_timeout_s = track_timeout;
            return run_track(track_args);
        }
        if (eval->parsed()) {
            return run_eval(eval_args);
        }
        if (report->parsed()) {
            return run_report(report_session_path);
        }
    } catch (const parktrack::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return kExitOk;
}
