#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace parktrack {

inline constexpr std::size_t kDefaultEmbeddingDim = 512;
inline constexpr double kDefaultMatchThreshold = 0.80;

/// Fixed-length face vector. Values must be finite and not all zero.
class Embedding {
public:
    explicit Embedding(std::vector<double> values);

    std::size_t dimension() const { return values_.size(); }
    double norm() const { return norm_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> values_;
    double norm_ = 0.0;
};

/// Angular similarity in [-1, 1]: dot(a, b) / (|a| |b|). Symmetric and
/// invariant under positive scaling of either argument.
double cosine_similarity(const Embedding& a, const Embedding& b);

struct Subject {
    std::string subject_id;
    std::string name;
    double weight_kg = 0.0;
    Embedding embedding;
};

struct MatchResult {
    bool matched = false;
    std::optional<std::string> subject_id;  // present iff matched
    double score = -1.0;                    // best similarity seen, in [-1, 1]
};

/// Enrollment gallery with cosine-similarity identification. Subjects keep
/// their enrollment order; exact score ties resolve to the earliest-enrolled
/// subject.
///
/// Concurrency: identification only reads; any number of concurrent
/// identify() calls are safe. enroll() mutates and requires exclusive access.
class Gallery {
public:
    explicit Gallery(std::size_t dimension = kDefaultEmbeddingDim);

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return subjects_.size(); }
    bool empty() const { return subjects_.empty(); }

    void enroll(Subject subject);

    /// Scores the query against every enrolled embedding. Returns the argmax
    /// subject when its score reaches the threshold, otherwise matched=false
    /// with the best score seen. threshold must lie in (0, 1].
    MatchResult identify(const Embedding& query, double threshold) const;

    bool contains(const std::string& subject_id) const;
    const Subject* find(const std::string& subject_id) const;
    const std::vector<Subject>& subjects() const { return subjects_; }

    /// Versioned JSON document:
    ///   {"version": 1, "dimension": D,
    ///    "subjects": [{"subject_id", "name", "weight_kg", "embedding"}]}
    void save(std::ostream& out) const;
    void save_file(const std::string& path) const;
    static Gallery load(std::istream& in);
    static Gallery load_file(const std::string& path);

private:
    std::size_t dimension_;
    std::vector<Subject> subjects_;  // enrollment order
};

/// Rotates `base` by exactly `angle_rad` toward a random direction orthogonal
/// to it, returning a unit vector with cos(result, base) == cos(angle_rad).
/// Requires dimension >= 2 unless the angle is zero.
Embedding perturb_embedding(const Embedding& base, double angle_rad,
                            std::mt19937_64& rng);

/// Deterministic stand-in for a neural face encoder: a seeded generator of
/// unit vectors with controllable inter-subject separation plus per-sighting
/// angular noise. Production deployments would plug a real encoder behind
/// the same Embedding type.
class SyntheticEmbeddingSource {
public:
    /// max_pairwise_cos bounds |cos| between any two vectors this source has
    /// issued; candidates violating it are redrawn.
    SyntheticEmbeddingSource(std::size_t dimension, std::uint64_t seed,
                             double max_pairwise_cos = 0.5);

    /// Next enrollment base vector, separated from all previously issued ones.
    Embedding next();

    /// A sighting of `base` observed with angular noise `angle_rad`.
    Embedding perturb(const Embedding& base, double angle_rad);

    std::size_t dimension() const { return dimension_; }

private:
    std::size_t dimension_;
    double max_pairwise_cos_;
    std::mt19937_64 rng_;
    std::vector<Embedding> issued_;
};

/// One row of a roster CSV (`subject_id,name,weight_kg`).
struct RosterEntry {
    std::string subject_id;
    std::string name;
    double weight_kg = 0.0;
};

/// Parses a roster CSV. Throws ParseError on malformed rows or duplicate
/// subject ids, with the offending row number in the message.
std::vector<RosterEntry> load_roster_csv(std::istream& in);
std::vector<RosterEntry> load_roster_csv_file(const std::string& path);

}  // namespace parktrack
