#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "parktrack/errors.hpp"
#include "parktrack/face_gallery.hpp"
#include "parktrack/rng.hpp"

using namespace parktrack;

namespace {

Embedding make(std::initializer_list<double> values) {
    return Embedding(std::vector<double>(values));
}

Gallery two_subject_gallery() {
    Gallery gallery(2);
    gallery.enroll({"A", "Alice", 60.0, make({1.0, 0.0})});
    gallery.enroll({"B", "Bob", 80.0, make({0.0, 1.0})});
    return gallery;
}

}  // namespace

TEST_CASE("embedding validation") {
    CHECK_THROWS_AS(Embedding(std::vector<double>{}), InvalidEmbedding);
    CHECK_THROWS_AS(make({0.0, 0.0, 0.0}), InvalidEmbedding);
    CHECK_THROWS_AS(make({1.0, std::nan("")}), InvalidEmbedding);
    const Embedding e = make({3.0, 4.0});
    CHECK(e.dimension() == 2);
    CHECK(e.norm() == doctest::Approx(5.0));
}

TEST_CASE("cosine similarity basics") {
    const Embedding v = make({0.3, -1.2, 2.0});
    CHECK(cosine_similarity(v, v) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine_similarity(make({1.0, 0.0}), make({0.0, 1.0})) == 0.0);
    CHECK(cosine_similarity(make({1.0, 0.0}), make({-1.0, 0.0})) ==
          doctest::Approx(-1.0).epsilon(1e-12));

    std::vector<double> doubled;
    for (double x : v.values()) doubled.push_back(2.0 * x);
    CHECK(cosine_similarity(v, Embedding(doubled)) ==
          doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(cosine_similarity(make({1.0}), make({1.0, 0.0})),
                    DimensionMismatch);
}

TEST_CASE("cosine symmetry, bounds, and scale invariance over random pairs") {
    std::mt19937_64 rng(20240802);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t dim = 2 + uniform_index(rng, 31);
        std::vector<double> a(dim), b(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            a[j] = standard_normal(rng);
            b[j] = standard_normal(rng);
        }
        a[0] += 1e-3;  // keep away from the zero vector
        b[0] += 1e-3;
        const Embedding ea(a), eb(b);
        const double ab = cosine_similarity(ea, eb);
        const double ba = cosine_similarity(eb, ea);
        CHECK(ab == ba);
        CHECK(ab >= -1.0);
        CHECK(ab <= 1.0);

        const double scale = std::exp(uniform_range(rng, -3.0, 3.0));
        std::vector<double> scaled(dim);
        for (std::size_t j = 0; j < dim; ++j) scaled[j] = scale * a[j];
        CHECK(cosine_similarity(Embedding(scaled), eb) ==
              doctest::Approx(ab).epsilon(1e-9));
    }
}

TEST_CASE("enroll") {
    Gallery gallery(2);
    CHECK(gallery.empty());
    gallery.enroll({"A", "Alice", 60.0, make({1.0, 0.0})});
    CHECK(gallery.size() == 1);
    CHECK_THROWS_AS(gallery.enroll({"A", "Imposter", 70.0, make({0.0, 1.0})}),
                    DuplicateSubject);
    CHECK_THROWS_AS(gallery.enroll({"C", "Chris", -3.0, make({0.0, 1.0})}),
                    InvalidParameter);
    CHECK_THROWS_AS(gallery.enroll({"D", "Dana", 70.0, make({1.0, 0.0, 0.0})}),
                    DimensionMismatch);

    SUBCASE("a full 22-subject roster enrolls") {
        SyntheticEmbeddingSource source(32, 99);
        Gallery park(32);
        for (int i = 1; i <= 22; ++i) {
            park.enroll({"S" + std::to_string(i), "Subject", 70.0,
                         source.next()});
        }
        CHECK(park.size() == 22);
    }
}

TEST_CASE("identify") {
    const Gallery gallery = two_subject_gallery();

    SUBCASE("exact self-match") {
        const MatchResult r = gallery.identify(make({1.0, 0.0}), 0.8);
        CHECK(r.matched);
        CHECK(*r.subject_id == "A");
        CHECK(r.score == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("empty gallery never matches") {
        const Gallery empty(2);
        const MatchResult r = empty.identify(make({1.0, 0.0}), 0.8);
        CHECK_FALSE(r.matched);
        CHECK_FALSE(r.subject_id.has_value());
    }

    SUBCASE("argmax picks the nearer subject") {
        const MatchResult r = gallery.identify(make({1.0, 1e-6}), 0.8);
        CHECK(r.matched);
        CHECK(*r.subject_id == "A");
        const double to_a = cosine_similarity(make({1.0, 1e-6}), make({1.0, 0.0}));
        const double to_b = cosine_similarity(make({1.0, 1e-6}), make({0.0, 1.0}));
        CHECK(to_a > to_b);
        CHECK(r.score == doctest::Approx(to_a));
    }

    SUBCASE("below threshold reports best score unmatched") {
        const MatchResult r = gallery.identify(make({1.0, 1.0}), 0.9);
        CHECK_FALSE(r.matched);
        CHECK_FALSE(r.subject_id.has_value());
        CHECK(r.score == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    }

    SUBCASE("exact ties resolve to the earliest enrollment") {
        Gallery tie(2);
        tie.enroll({"first", "F", 60.0, make({1.0, 0.0})});
        tie.enroll({"second", "S", 60.0, make({1.0, 0.0})});
        const MatchResult r = tie.identify(make({1.0, 0.0}), 0.5);
        CHECK(*r.subject_id == "first");
    }

    SUBCASE("threshold validation") {
        CHECK_THROWS_AS(gallery.identify(make({1.0, 0.0}), 0.0),
                        InvalidParameter);
        CHECK_THROWS_AS(gallery.identify(make({1.0, 0.0}), 1.5),
                        InvalidParameter);
    }
}

TEST_CASE("identify is scale-invariant and threshold-monotone") {
    std::mt19937_64 rng(20240803);
    SyntheticEmbeddingSource source(16, 5);
    Gallery gallery(16);
    for (int i = 0; i < 6; ++i) {
        gallery.enroll({"G" + std::to_string(i), "g", 70.0, source.next()});
    }
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> q(16);
        for (double& x : q) x = standard_normal(rng);
        q[0] += 1e-3;
        const Embedding query(q);
        const double threshold = uniform_range(rng, 0.05, 1.0);
        const MatchResult base = gallery.identify(query, threshold);

        const double c = std::exp(uniform_range(rng, -4.0, 4.0));
        std::vector<double> scaled(16);
        for (std::size_t j = 0; j < 16; ++j) scaled[j] = c * q[j];
        const MatchResult same = gallery.identify(Embedding(scaled), threshold);
        CHECK(same.matched == base.matched);
        CHECK(same.subject_id == base.subject_id);

        if (base.matched) {
            const double lower = uniform_range(rng, 0.01, threshold);
            const MatchResult relaxed = gallery.identify(query, lower);
            CHECK(relaxed.matched);
            CHECK(*relaxed.subject_id == *base.subject_id);
        }

        // determinism: identical inputs give the identical result
        const MatchResult again = gallery.identify(query, threshold);
        CHECK(again.matched == base.matched);
        CHECK(again.score == base.score);
        CHECK(again.subject_id == base.subject_id);
    }
}

TEST_CASE("gallery persistence round-trips") {
    SyntheticEmbeddingSource source(8, 17);
    Gallery gallery(8);
    gallery.enroll({"A", "Alice", 61.5, source.next()});
    gallery.enroll({"B", "Bob", 82.25, source.next()});

    std::stringstream buffer;
    gallery.save(buffer);
    const Gallery loaded = Gallery::load(buffer);
    CHECK(loaded.dimension() == 8);
    CHECK(loaded.size() == 2);
    CHECK(loaded.subjects()[0].subject_id == "A");  // enrollment order kept
    CHECK(loaded.subjects()[1].subject_id == "B");
    CHECK(loaded.find("B")->weight_kg == 82.25);
    CHECK(cosine_similarity(loaded.find("A")->embedding,
                            gallery.find("A")->embedding) ==
          doctest::Approx(1.0).epsilon(1e-15));

    SUBCASE("version and structure are checked") {
        std::stringstream bad1("{\"version\": 2, \"dimension\": 8, \"subjects\": []}");
        CHECK_THROWS_AS(Gallery::load(bad1), ParseError);
        std::stringstream bad2("not json");
        CHECK_THROWS_AS(Gallery::load(bad2), ParseError);
        std::stringstream bad3("{\"version\": 1}");
        CHECK_THROWS_AS(Gallery::load(bad3), ParseError);
    }
}

TEST_CASE("synthetic source: determinism, separation, and noise angle") {
    SyntheticEmbeddingSource a(64, 123);
    SyntheticEmbeddingSource b(64, 123);
    for (int i = 0; i < 5; ++i) {
        const Embedding ea = a.next();
        const Embedding eb = b.next();
        CHECK(ea.values() == eb.values());  // same seed, same stream
        CHECK(ea.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("pairwise separation holds") {
        SyntheticEmbeddingSource source(16, 7, 0.4);
        std::vector<Embedding> all;
        for (int i = 0; i < 10; ++i) all.push_back(source.next());
        for (std::size_t i = 0; i < all.size(); ++i) {
            for (std::size_t j = i + 1; j < all.size(); ++j) {
                CHECK(std::abs(cosine_similarity(all[i], all[j])) <= 0.4);
            }
        }
    }

    SUBCASE("perturb lands at the requested angle") {
        SyntheticEmbeddingSource source(64, 29);
        const Embedding base = source.next();
        for (double angle : {0.0, 0.1, 0.5, 1.2}) {
            const Embedding noisy = source.perturb(base, angle);
            CHECK(cosine_similarity(noisy, base) ==
                  doctest::Approx(std::cos(angle)).epsilon(1e-9));
        }
    }

    SUBCASE("impossible separation is reported") {
        // Two dimensions cannot hold 10 vectors pairwise below cos 0.1.
        SyntheticEmbeddingSource source(2, 3, 0.1);
        CHECK_THROWS_AS(
            [&] {
                for (int i = 0; i < 10; ++i) source.next();
            }(),
            InvalidParameter);
    }
}

TEST_CASE("roster CSV parsing") {
    SUBCASE("valid roster") {
        std::stringstream in(
            "subject_id,name,weight_kg\nS1,Alice,61.5\nS2,Bob,82\n");
        const auto roster = load_roster_csv(in);
        REQUIRE(roster.size() == 2);
        CHECK(roster[0].subject_id == "S1");
        CHECK(roster[1].weight_kg == 82.0);
    }
    SUBCASE("header only is empty, not an error") {
        std::stringstream in("subject_id,name,weight_kg\n");
        CHECK(load_roster_csv(in).empty());
    }
    SUBCASE("duplicate ids are rejected with the row number") {
        std::stringstream in(
            "subject_id,name,weight_kg\nS1,Alice,61.5\nS1,Bob,82\n");
        CHECK_THROWS_WITH_AS(load_roster_csv(in),
                             doctest::Contains("row 3"), ParseError);
    }
    SUBCASE("malformed rows are rejected") {
        std::stringstream bad_header("id,name,weight\nS1,Alice,61.5\n");
        CHECK_THROWS_AS(load_roster_csv(bad_header), ParseError);
        std::stringstream bad_weight(
            "subject_id,name,weight_kg\nS1,Alice,heavy\n");
        CHECK_THROWS_AS(load_roster_csv(bad_weight), ParseError);
        std::stringstream negative(
            "subject_id,name,weight_kg\nS1,Alice,-4\n");
        CHECK_THROWS_AS(load_roster_csv(negative), ParseError);
    }
}
