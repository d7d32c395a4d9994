#pragma once

#include <cstddef>
#include <string>

#include "parktrack/face_gallery.hpp"
#include "parktrack/session_tracker.hpp"

namespace parktrack {

/// Engine configuration, persisted as a flat JSON document. Precedence is
/// command-line flags over config file over these defaults; the
/// PARKTRACK_DATA_DIR environment variable overrides data_dir from the file.
struct Config {
    double perimeter_m = kDefaultPerimeterM;
    double debounce_s = kDefaultDebounceS;
    double match_threshold = kDefaultMatchThreshold;
    std::size_t embedding_dim = kDefaultEmbeddingDim;
    double session_timeout_s = kDefaultSessionTimeoutS;
    std::string data_dir = "parktrack_data";

    void validate() const;

    TrackerConfig tracker() const {
        return {perimeter_m, debounce_s, session_timeout_s};
    }

    std::string to_json() const;
    static Config from_json(const std::string& text);
    static Config load_file(const std::string& path);
    void save_file(const std::string& path) const;
};

}  // namespace parktrack
