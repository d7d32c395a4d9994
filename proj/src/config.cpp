#include "parktrack/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "parktrack/errors.hpp"

namespace parktrack {

using nlohmann::json;

void Config::validate() const {
    if (!std::isfinite(perimeter_m) || perimeter_m <= 0.0) {
        throw InvalidParameter("config.perimeter_m must be positive");
    }
    if (!std::isfinite(debounce_s) || debounce_s <= 0.0) {
        throw InvalidParameter("config.debounce_s must be positive");
    }
    if (!std::isfinite(match_threshold) || match_threshold <= 0.0 ||
        match_threshold > 1.0) {
        throw InvalidParameter("config.match_threshold must lie in (0, 1]");
    }
    if (embedding_dim == 0) {
        throw InvalidParameter("config.embedding_dim must be positive");
    }
    if (!std::isfinite(session_timeout_s) || session_timeout_s <= 0.0) {
        throw InvalidParameter("config.session_timeout_s must be positive");
    }
    if (data_dir.empty()) {
        throw InvalidParameter("config.data_dir must not be empty");
    }
}

std::string Config::to_json() const {
    const json doc = {
        {"perimeter_m", perimeter_m},
        {"debounce_s", debounce_s},
        {"match_threshold", match_threshold},
        {"embedding_dim", embedding_dim},
        {"session_timeout_s", session_timeout_s},
        {"data_dir", data_dir},
    };
    return doc.dump(2);
}

Config Config::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("config must be a JSON object");
    }
    Config config;
    try {
        if (doc.contains("perimeter_m")) {
            config.perimeter_m = doc["perimeter_m"].get<double>();
        }
        if (doc.contains("debounce_s")) {
            config.debounce_s = doc["debounce_s"].get<double>();
        } else if (doc.contains("perimeter_m")) {
            // No explicit window: derive it from the configured loop length.
            config.debounce_s = debounce_for_perimeter(config.perimeter_m);
        }
        if (doc.contains("match_threshold")) {
            config.match_threshold = doc["match_threshold"].get<double>();
        }
        if (doc.contains("embedding_dim")) {
            config.embedding_dim = doc["embedding_dim"].get<std::size_t>();
        }
        if (doc.contains("session_timeout_s")) {
            config.session_timeout_s = doc["session_timeout_s"].get<double>();
        }
        if (doc.contains("data_dir")) {
            config.data_dir = doc["data_dir"].get<std::string>();
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed config field: ") + e.what());
    }
    config.validate();
    return config;
}

Config Config::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

void Config::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot open config file for writing: " + path);
    }
    out << to_json() << '\n';
}

}  // namespace parktrack
