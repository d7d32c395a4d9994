#include "parktrack/face_gallery.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "csv_util.hpp"
#include "parktrack/errors.hpp"
#include "parktrack/rng.hpp"

namespace parktrack {

using nlohmann::json;

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw InvalidEmbedding("embedding must not be empty");
    }
    double sum_sq = 0.0;
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw InvalidEmbedding("embedding values must be finite");
        }
        sum_sq += v * v;
    }
    norm_ = std::sqrt(sum_sq);
    if (norm_ == 0.0) {
        throw InvalidEmbedding("embedding must have at least one nonzero value");
    }
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
    if (a.dimension() != b.dimension()) {
        throw DimensionMismatch("embeddings differ in dimension: " +
                                std::to_string(a.dimension()) + " vs " +
                                std::to_string(b.dimension()));
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.dimension(); ++i) {
        dot += a.values()[i] * b.values()[i];
    }
    const double cos = dot / (a.norm() * b.norm());
    return std::clamp(cos, -1.0, 1.0);
}

Gallery::Gallery(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) {
        throw InvalidParameter("gallery dimension must be > 0");
    }
}

void Gallery::enroll(Subject subject) {
    if (subject.subject_id.empty()) {
        throw InvalidParameter("subject_id must not be empty");
    }
    if (!std::isfinite(subject.weight_kg) || subject.weight_kg <= 0.0) {
        throw InvalidParameter("subject weight must be positive and finite");
    }
    if (subject.embedding.dimension() != dimension_) {
        throw DimensionMismatch("subject embedding has dimension " +
                                std::to_string(subject.embedding.dimension()) +
                                ", gallery expects " +
                                std::to_string(dimension_));
    }
    if (contains(subject.subject_id)) {
        throw DuplicateSubject("subject_id already enrolled: " +
                               subject.subject_id);
    }
    subjects_.push_back(std::move(subject));
}

MatchResult Gallery::identify(const Embedding& query, double threshold) const {
    if (!std::isfinite(threshold) || threshold <= 0.0 || threshold > 1.0) {
        throw InvalidParameter("match threshold must lie in (0, 1]");
    }
    MatchResult result;
    for (const Subject& subject : subjects_) {
        const double score = cosine_similarity(query, subject.embedding);
        // Strict > keeps the earliest-enrolled subject on exact ties.
        if (score > result.score) {
            result.score = score;
            result.subject_id = subject.subject_id;
        }
    }
    if (result.subject_id && result.score >= threshold) {
        result.matched = true;
    } else {
        result.matched = false;
        result.subject_id.reset();
    }
    return result;
}

bool Gallery::contains(const std::string& subject_id) const {
    return find(subject_id) != nullptr;
}

const Subject* Gallery::find(const std::string& subject_id) const {
    for (const Subject& subject : subjects_) {
        if (subject.subject_id == subject_id) {
            return &subject;
        }
    }
    return nullptr;
}

void Gallery::save(std::ostream& out) const {
    json doc;
    doc["version"] = 1;
    doc["dimension"] = dimension_;
    json subjects = json::array();
    for (const Subject& subject : subjects_) {
        subjects.push_back({
            {"subject_id", subject.subject_id},
            {"name", subject.name},
            {"weight_kg", subject.weight_kg},
            {"embedding", subject.embedding.values()},
        });
    }
    doc["subjects"] = std::move(subjects);
    out << doc.dump(2) << '\n';
}

void Gallery::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot open gallery file for writing: " + path);
    }
    save(out);
}

Gallery Gallery::load(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(std::string("gallery document is not valid JSON: ") +
                         e.what());
    }
    if (!doc.is_object() || !doc.contains("version") ||
        !doc["version"].is_number_integer()) {
        throw ParseError("gallery document lacks an integer version field");
    }
    if (doc["version"].get<int>() != 1) {
        throw ParseError("unsupported gallery version " +
                         doc["version"].dump());
    }
    if (!doc.contains("dimension") || !doc["dimension"].is_number_unsigned()) {
        throw ParseError("gallery document lacks a dimension field");
    }
    Gallery gallery(doc["dimension"].get<std::size_t>());
    if (!doc.contains("subjects") || !doc["subjects"].is_array()) {
        throw ParseError("gallery document lacks a subjects array");
    }
    for (const json& entry : doc["subjects"]) {
        try {
            gallery.enroll(Subject{
                entry.at("subject_id").get<std::string>(),
                entry.at("name").get<std::string>(),
                entry.at("weight_kg").get<double>(),
                Embedding(entry.at("embedding").get<std::vector<double>>()),
            });
        } catch (const json::exception& e) {
            throw ParseError(std::string("malformed gallery subject: ") +
                             e.what());
        }
    }
    return gallery;
}

Gallery Gallery::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open gallery file: " + path);
    }
    return load(in);
}

namespace {

Embedding random_unit_vector(std::size_t dimension, std::mt19937_64& rng) {
    std::vector<double> values(dimension);
    while (true) {
        for (double& v : values) {
            v = standard_normal(rng);
        }
        double sum_sq = 0.0;
        for (double v : values) {
            sum_sq += v * v;
        }
        const double norm = std::sqrt(sum_sq);
        if (norm > 1e-12) {
            for (double& v : values) {
                v /= norm;
            }
            return Embedding(values);
        }
    }
}

}  // namespace

Embedding perturb_embedding(const Embedding& base, double angle_rad,
                            std::mt19937_64& rng) {
    constexpr double pi = 3.141592653589793238463;
    if (!std::isfinite(angle_rad) || angle_rad < 0.0 || angle_rad > pi) {
        throw InvalidParameter("perturbation angle must lie in [0, pi]");
    }
    const std::size_t dim = base.dimension();
    std::vector<double> unit(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        unit[i] = base.values()[i] / base.norm();
    }
    if (angle_rad == 0.0) {
        return Embedding(unit);
    }
    if (dim < 2) {
        throw InvalidParameter(
            "angular perturbation needs embedding dimension >= 2");
    }
    // Gram-Schmidt a random direction against the base, then rotate in the
    // plane they span: the resulting cosine to the base is exactly
    // cos(angle_rad) up to floating-point error.
    std::vector<double> ortho(dim);
    double ortho_norm = 0.0;
    while (ortho_norm <= 1e-9) {
        for (double& v : ortho) {
            v = standard_normal(rng);
        }
        double dot = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            dot += ortho[i] * unit[i];
        }
        double sum_sq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            ortho[i] -= dot * unit[i];
            sum_sq += ortho[i] * ortho[i];
        }
        ortho_norm = std::sqrt(sum_sq);
    }
    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    std::vector<double> rotated(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        rotated[i] = c * unit[i] + s * ortho[i] / ortho_norm;
    }
    return Embedding(std::move(rotated));
}

SyntheticEmbeddingSource::SyntheticEmbeddingSource(std::size_t dimension,
                                                   std::uint64_t seed,
                                                   double max_pairwise_cos)
    : dimension_(dimension),
      max_pairwise_cos_(max_pairwise_cos),
      rng_(seed) {
    if (dimension_ == 0) {
        throw InvalidParameter("embedding dimension must be > 0");
    }
    if (!std::isfinite(max_pairwise_cos_) || max_pairwise_cos_ <= 0.0 ||
        max_pairwise_cos_ >= 1.0) {
        throw InvalidParameter("max pairwise cosine must lie in (0, 1)");
    }
}

Embedding SyntheticEmbeddingSource::next() {
    constexpr int kMaxAttempts = 1000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Embedding candidate = random_unit_vector(dimension_, rng_);
        const bool separated = std::all_of(
            issued_.begin(), issued_.end(), [&](const Embedding& other) {
                return std::abs(cosine_similarity(candidate, other)) <=
                       max_pairwise_cos_;
            });
        if (separated) {
            issued_.push_back(candidate);
            return candidate;
        }
    }
    throw InvalidParameter(
        "cannot generate another embedding at the requested separation; "
        "raise max_pairwise_cos or the dimension");
}

Embedding SyntheticEmbeddingSource::perturb(const Embedding& base,
                                            double angle_rad) {
    return perturb_embedding(base, angle_rad, rng_);
}

std::vector<RosterEntry> load_roster_csv(std::istream& in) {
    const auto rows = csv::read_rows(in);
    if (rows.empty()) {
        throw ParseError("roster CSV is empty (expected a header line)");
    }
    const std::vector<std::string> expected = {"subject_id", "name",
                                               "weight_kg"};
    if (rows.front() != expected) {
        throw ParseError(
            "roster CSV must start with header 'subject_id,name,weight_kg'");
    }
    std::vector<RosterEntry> entries;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string where = "roster row " + std::to_string(i + 1);
        if (row.size() != 3) {
            throw ParseError(where + ": expected 3 fields, got " +
                             std::to_string(row.size()));
        }
        RosterEntry entry;
        entry.subject_id = row[0];
        entry.name = row[1];
        if (entry.subject_id.empty()) {
            throw ParseError(where + ": subject_id must not be empty");
        }
        try {
            std::size_t consumed = 0;
            entry.weight_kg = std::stod(row[2], &consumed);
            if (consumed != row[2].size()) {
                throw std::invalid_argument(row[2]);
            }
        } catch (const std::exception&) {
            throw ParseError(where + ": weight_kg is not a number: '" +
                             row[2] + "'");
        }
        if (!std::isfinite(entry.weight_kg) || entry.weight_kg <= 0.0) {
            throw ParseError(where + ": weight_kg must be positive");
        }
        for (const RosterEntry& seen : entries) {
            if (seen.subject_id == entry.subject_id) {
                throw ParseError(where + ": duplicate subject_id '" +
                                 entry.subject_id + "'");
            }
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::vector<RosterEntry> load_roster_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open roster CSV: " + path);
    }
    return load_roster_csv(in);
}

}  // namespace parktrack
